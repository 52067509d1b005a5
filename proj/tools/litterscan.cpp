#include <string>
#include <vector>

#include "litterscan/cli.hpp"

int main(int argc, char** argv)
{
  return litterscan::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
