#include "injury/cli.hpp"

int main(int argc, char** argv) { return injury::cli_main(argc, argv); }
