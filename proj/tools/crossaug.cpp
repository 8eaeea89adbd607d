#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "crossaug/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::vector<std::string> args(argv + 1, argv + argc);
  crossaug::cli::Context ctx{std::cin, std::cout, std::cerr, std::nullopt};
  if (const char* url = std::getenv(crossaug::cli::kGeneratorUrlEnv); url && *url)
    ctx.generator_url = url;
  return crossaug::cli::run(args, ctx);
}
