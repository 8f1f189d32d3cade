#include "sublin/cli.hpp"

int main(int argc, char** argv) { return sublin::run_cli(argc, argv); }
