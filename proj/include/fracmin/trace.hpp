#pragma once

#include <vector>

#include "fracmin/problem.hpp"

namespace fracmin {

/// State of iterate x^k. `alpha`, `step_norm` and `backtracks` describe the
/// step that produced x^k from x^{k-1}; they are zero for k = 0.
struct IterationRecord {
  long k = 0;
  double objective = kInfinity;  // F(x^k)
  double c = kInfinity;          // c_k as used by the next step (cached ratio)
  double alpha = 0.0;
  double step_norm = 0.0;    // |x^k - x^{k-1}|_2
  double denominator = 0.0;  // g(x^k)
  int backtracks = 0;
};

struct SolverTrace {
  std::vector<IterationRecord> records;  // x^0 .. x^K
  std::vector<Vector> iterates;          // filled when iterates are recorded
  Vector final_point;
  Certificate certificate;

  long iterations() const { return certificate.iterations; }

  /// |x^k - final_point|_2 for every stored iterate.
  std::vector<double> errors_to_final() const;
};

}  // namespace fracmin
