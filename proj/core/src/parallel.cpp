#include "gyrox/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gyrox {

int default_threads() {
  if (const char* env = std::getenv("GYROX_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace gyrox
