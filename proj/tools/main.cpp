#include "cli.hpp"
int main(int argc, char** argv) { return corikit::cli::run(argc, argv); }
