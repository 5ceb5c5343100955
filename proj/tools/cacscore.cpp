#include "cacs/cli.hpp"

int main(int argc, char** argv) { return cacs::cli::main(argc, argv); }
