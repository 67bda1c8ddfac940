#include "cli.hpp"

int main(int argc, char** argv) { return gapratio::cli::run(argc, argv); }
