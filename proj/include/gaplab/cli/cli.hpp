#pragma once

namespace gaplab {

/// Entry point for the gaplab command-line tool. Returns the process exit
/// code: 0 on success, 1 on usage errors, 2 on runtime failures.
int cli_main(int argc, char** argv);

}  // namespace gaplab
