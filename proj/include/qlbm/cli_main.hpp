#pragma once

namespace qlbm::cli {

/// Entry point of the command-line tool. Subcommands: run, compare, tgv,
/// cost. Returns the process exit code: 0 success / tolerance pass,
/// 1 tolerance fail, 2 usage error, 3 numeric failure.
int run_main(int argc, char** argv);

}  // namespace qlbm::cli
