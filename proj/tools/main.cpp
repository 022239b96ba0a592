#include "rbmld/cli.hpp"

int main(int argc, char** argv) { return rbmld::cli::main(argc, argv); }
