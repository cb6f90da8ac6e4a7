#include "geoest/bench/cli.hpp"

int main(int argc, char** argv) { return geoest::bench::cli_main(argc, argv); }
