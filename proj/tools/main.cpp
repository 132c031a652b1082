#include "jini/cli.hpp"

int main(int argc, char** argv) { return jini::run_cli(argc, argv); }
