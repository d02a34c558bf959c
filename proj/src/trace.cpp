#include "fracmin/trace.hpp"

namespace fracmin {

std::vector<double> SolverTrace::errors_to_final() const {
  std::vector<double> errors;
  errors.reserve(iterates.size());
  for (const Vector& x : iterates) errors.push_back((x - final_point).norm());
  return errors;
}

}  // namespace fracmin
