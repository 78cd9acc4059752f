#include "p2plab/cli.hpp"

int main(int argc, char** argv) { return p2plab::run_cli(argc, argv); }
