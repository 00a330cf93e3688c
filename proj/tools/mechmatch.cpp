#include "mechmatch/cli.hpp"

int main(int argc, char** argv) { return mechmatch::run_cli(argc, argv); }
