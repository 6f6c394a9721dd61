#include "gaplab/cli/cli.hpp"

#include <cstdio>

namespace gaplab {

int cli_main(int, char**) {
  std::fprintf(stderr, "gaplab: subcommands not wired up yet\n");
  return 1;
}

}  // namespace gaplab
