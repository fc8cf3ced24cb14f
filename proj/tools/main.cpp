#include "pdeacc/cli.hpp"

int main(int argc, char** argv) { return pdeacc::run_cli(argc, argv); }
