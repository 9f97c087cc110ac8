#include "advbound/cli.hpp"

int main(int argc, char** argv) { return advbound::cli::run(argc, argv); }
