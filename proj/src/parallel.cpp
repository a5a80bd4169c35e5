#include "ssmt/parallel.hpp"

#include <string>

#include "ssmt/types.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ssmt {

Backend parse_backend(std::string_view name) {
  if (name == "serial") return Backend::serial;
  if (name == "openmp" || name == "omp") return Backend::openmp;
  throw ConfigError("unknown backend '" + std::string(name) + "' (expected serial or openmp)");
}

std::string_view to_string(Backend backend) {
  return backend == Backend::serial ? "serial" : "openmp";
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace ssmt
