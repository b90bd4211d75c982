// CLI entry point; subcommands are wired up in cli.hpp.
#include <stepcert/cli.hpp>

int main(int argc, char** argv) { return stepcert::cli_main(argc, argv); }
