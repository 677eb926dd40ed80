#include "twinqft/cli.hpp"

int main(int argc, char** argv) { return twinqft::run_cli(argc, argv); }
