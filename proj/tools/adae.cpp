#include "adae/cli.hpp"

int main(int argc, char** argv) { return adae::run_cli(argc, argv); }
