#include "gclust/cli.hpp"

int main(int argc, char** argv) { return gclust::run_cli(argc, argv); }
