#include "satolab/cli.hpp"

int main(int argc, char** argv) { return satolab::cli::run(argc, argv); }
