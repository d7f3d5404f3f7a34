#include "singdet/cli/commands.hpp"

int main(int argc, char** argv) { return singdet::cli::run({argv, argv + argc}); }
