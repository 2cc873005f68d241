#include "mcc/error.hpp"

#include <cmath>

namespace mcc {

void fail_invalid(const std::string& what) { throw InvalidInput(what); }

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidInput(std::string(what) + ": non-finite value");
}

}  // namespace mcc
