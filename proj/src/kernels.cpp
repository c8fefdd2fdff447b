#include "dpcollapse/kernels.hpp"

#include <string>

#include <omp.h>

#include "dpcollapse/errors.hpp"

namespace dpcollapse {

ExecPolicy parse_exec_policy(std::string_view name) {
  if (name == "serial") return ExecPolicy::serial;
  if (name == "parallel" || name == "openmp") return ExecPolicy::parallel;
  throw ConfigError("unknown execution policy '" + std::string(name) + "' (expected serial or parallel)");
}

std::string_view to_string(ExecPolicy policy) { return policy == ExecPolicy::serial ? "serial" : "parallel"; }

int available_threads() { return omp_get_max_threads(); }

}  // namespace dpcollapse
