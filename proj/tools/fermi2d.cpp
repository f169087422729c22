#include "fermi2d/cli.hpp"

int main(int argc, char** argv) { return fermi2d::cli::run(argc, argv); }
