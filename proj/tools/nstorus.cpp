#include "nstorus/commands.hpp"

int main(int argc, char** argv) { return nstorus::run_cli(argc, argv); }
