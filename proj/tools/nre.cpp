#include "nre/cli.hpp"

int main(int argc, char** argv) { return nre::cli::run(argc, argv); }
