#include "qtomo/cli.hpp"

int main(int argc, char** argv) { return qtomo::cli::run(argc, argv); }
