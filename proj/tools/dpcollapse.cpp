#include "dpcollapse/cli.hpp"

int main(int argc, char** argv) { return dpcollapse::cli::main_entry(argc, argv); }
