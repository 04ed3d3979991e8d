#include <iostream>
#include <string>
#include <vector>

#include "forge/cli/app.hpp"

int main(int argc, char** argv) {
    return forge::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
