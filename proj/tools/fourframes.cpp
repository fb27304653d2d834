#include "fourframes/cli.hpp"

int main(int argc, char** argv) { return fourframes::run_cli(argc, argv); }
