#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "fracmin/common.hpp"
#include "fracmin/trace.hpp"

namespace fracmin {

// Matrix files: one row per line, comma-separated decimal floats, no header.
// Blank lines are ignored. Values are written with 17 significant digits so
// a write/read cycle is exact.

Matrix read_matrix_csv(const std::filesystem::path& path);
Matrix parse_matrix_csv(std::istream& in, const std::string& source = "<stream>");
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// A vector stored as a single column or a single row.
Vector read_vector_csv(const std::filesystem::path& path);
void write_vector_csv(const std::filesystem::path& path, const Vector& v);

/// (M + M^T) / 2.
Matrix symmetrized(const Matrix& m);

/// One line per iterate; k,objective,alpha,step_norm,err_to_final,denominator,backtracks
/// with a header row. err_to_final is empty when iterates were not recorded.
void write_trace_csv(const std::filesystem::path& path, const SolverTrace& trace);
void write_trace_csv(std::ostream& out, const SolverTrace& trace);

struct TraceFile {
  std::vector<IterationRecord> records;
  std::vector<double> errors_to_final;  // empty when the column was blank
};

TraceFile read_trace_csv(const std::filesystem::path& path);

}  // namespace fracmin
