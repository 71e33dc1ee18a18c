#include "weakcorr/cli.hpp"

int main(int argc, char** argv) { return weakcorr::cli::run(argc, argv); }
