#include "qlbm/cli_main.hpp"

int main(int argc, char** argv) { return qlbm::cli::run_main(argc, argv); }
