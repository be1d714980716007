#include "heatsift/cli.hpp"

int main(int argc, char** argv) { return heatsift::run_cli(argc, argv); }
