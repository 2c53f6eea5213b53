#include "sdenet/cli.hpp"

int main(int argc, char** argv) { return sdenet::run_cli(argc, argv); }
