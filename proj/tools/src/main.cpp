#include "pdmicro_cli/commands.hpp"

int main(int argc, char** argv) { return pdm::cli::run_cli(argc, argv); }
