#include "kdual/cli.hpp"

int main(int argc, char** argv) { return kdual::run_cli(argc, argv); }
