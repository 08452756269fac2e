#include <string>
#include <vector>

#include "dscv/cli.hpp"

int main(int argc, char** argv) { return dscv::cli::run(std::vector<std::string>(argv + 1, argv + argc)); }
