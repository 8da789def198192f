#include <string>
#include <vector>

#include "archconf/cli.hpp"

int main(int argc, char** argv) {
  return archconf::cli::run(std::vector<std::string>(argv, argv + argc));
}
