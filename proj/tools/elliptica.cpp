#include "elliptica/cli.hpp"

int main(int argc, char** argv) { return elliptica::cli::run(argc, argv); }
