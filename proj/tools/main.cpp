#include "twistlocal/cli.hpp"

int main(int argc, char** argv) { return twistlocal::cli::run(argc, argv); }
