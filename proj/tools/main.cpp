#include <cstdlib>
#include <string>
#include <vector>

#include "cli.hpp"
#include "dtc/kernels.hpp"

int main(int argc, char** argv) {
  if (const char* env = std::getenv("DTNS_THREADS")) dtc::kernels::set_thread_cap(std::atoi(env));
  return dtc::cli::run(std::vector<std::string>(argv, argv + argc));
}
