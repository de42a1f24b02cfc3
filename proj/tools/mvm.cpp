#include "mvm/cli.hpp"

int main(int argc, char** argv) { return mvm::cli::run_cli(argc, argv); }
