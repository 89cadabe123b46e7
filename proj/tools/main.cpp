#include <string>
#include <vector>

#include "diffgt/cli/cli.hpp"

int main(int argc, char** argv) { return diffgt::run_cli(std::vector<std::string>(argv, argv + argc)); }
