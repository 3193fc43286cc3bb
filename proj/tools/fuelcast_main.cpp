#include "fuelcast/cli.hpp"

int main(int argc, char** argv) { return fuelcast::cli::run(argc, argv); }
