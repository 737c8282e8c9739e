#include "csma/cli.hpp"

int main(int argc, char** argv) { return csma::cli::run(argc, argv); }
