#include "rasplit/cli/commands.hpp"

int main(int argc, char** argv) { return rasplit::cli::cli_main(argc, argv); }
