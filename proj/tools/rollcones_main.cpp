#include "rollcones/cli.hpp"

int main(int argc, char** argv) { return rollcones::cli::run(argc, argv); }
