#include <cstdio>

#include "polyvf/cli.hpp"

int main(int argc, char** argv) {
  const auto r = polyvf::execute_command(std::vector<std::string>(argv, argv + argc));
  std::fwrite(r.payload.data(), 1, r.payload.size(), stdout);
  return r.exit_code;
}
