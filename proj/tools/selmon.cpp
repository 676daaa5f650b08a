#include "selmon/cli.hpp"

int main(int argc, char** argv) { return selmon::cli::run(argc, argv); }
