#include "cli.hpp"

int main(int argc, char** argv) { return skewlab::cli::run(argc, argv); }
