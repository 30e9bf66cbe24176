#include "ffspin/cli.hpp"

int main(int argc, char** argv) { return ffspin::cli::run(argc, argv); }
