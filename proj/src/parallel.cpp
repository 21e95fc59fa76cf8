#include "funcate/parallel.hpp"

#include <cstdlib>
#include <string>

namespace funcate {

int threadBudget() {
  const int hardware = std::max(1, omp_get_max_threads());
  const char* env = std::getenv("FUNCATE_THREADS");
  if (env == nullptr || *env == '\0') return hardware;
  int requested = 0;
  try {
    requested = std::stoi(env);
  } catch (...) {
    return hardware;
  }
  if (requested <= 0) return hardware;
  return std::min(requested, hardware);
}

}  // namespace funcate
