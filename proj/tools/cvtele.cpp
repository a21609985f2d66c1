// cvtele command-line front end.
//
// CVTELE_THREADS sets the OpenMP thread count; nothing else is read from the
// environment.

#include <cstdlib>
#include <iostream>
#include <string>

#include <omp.h>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  if (const char* env = std::getenv("CVTELE_THREADS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) {
      std::cerr << "cvtele: configuration error: CVTELE_THREADS must be a positive integer\n";
      return cvtele::cli::kExitConfig;
    }
    omp_set_num_threads(static_cast<int>(n));
  }
  return cvtele::cli::run(argc, argv);
}
