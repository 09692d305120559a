#include <iostream>

#include "dkg/gateway/cli.hpp"

int main(int argc, char** argv) { return dkg::gateway::run_cli(argc, argv, std::cout, std::cerr); }
