#include "bridgelab/cli.hpp"

int main(int argc, char** argv) { return bridgelab::cli_main(argc, argv); }
