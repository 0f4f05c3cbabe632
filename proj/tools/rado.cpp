#include "rado/cli.hpp"

int main(int argc, char** argv) { return rado::cli::dispatch(argc, argv); }
