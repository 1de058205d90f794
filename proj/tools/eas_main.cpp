#include "eas/cli.hpp"

int main(int argc, char** argv) { return eas::cli_main(argc, argv); }
