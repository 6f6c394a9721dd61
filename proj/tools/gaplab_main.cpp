#include "gaplab/cli/cli.hpp"

int main(int argc, char** argv) { return gaplab::cli_main(argc, argv); }
