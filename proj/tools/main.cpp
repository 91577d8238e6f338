#include "cli.hpp"

int main(int argc, char** argv) { return chordiag::cli::run(argc, argv); }
