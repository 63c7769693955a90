#include "ewmaopt_cli/commands.hpp"

int main(int argc, char** argv) { return ewmaopt::cli::run(argc, argv); }
