#include "fracmin/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

namespace fracmin {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view field, const std::string& source, long line) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(source + ":" + std::to_string(line) + ": not a number: '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << std::setprecision(17);
  return out;
}

}  // namespace

Matrix parse_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string raw;
  long line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty()) continue;
    std::vector<double> row;
    for (std::string_view field : split(text)) row.push_back(parse_double(field, source, line));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(source + ":" + std::to_string(line) + ": ragged row with " +
                       std::to_string(row.size()) + " fields, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source + ": no data rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse_matrix_csv(in, path.string());
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out = open_output(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Vector read_vector_csv(const std::filesystem::path& path) {
  const Matrix m = read_matrix_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ParseError(path.string() + ": expected a single row or column");
}

void write_vector_csv(const std::filesystem::path& path, const Vector& v) {
  write_matrix_csv(path, Matrix(v));
}

Matrix symmetrized(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("cannot symmetrize a non-square matrix");
  return 0.5 * (m + m.transpose());
}

void write_trace_csv(std::ostream& out, const SolverTrace& trace) {
  const std::vector<double> errors = trace.errors_to_final();
  const auto old_precision = out.precision(17);
  out << "k,objective,alpha,step_norm,err_to_final,denominator,backtracks\n";
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const IterationRecord& r = trace.records[i];
    out << r.k << ',' << r.objective << ',' << r.alpha << ',' << r.step_norm << ',';
    if (i < errors.size()) out << errors[i];
    out << ',' << r.denominator << ',' << r.backtracks << '\n';
  }
  out.precision(old_precision);
}

void write_trace_csv(const std::filesystem::path& path, const SolverTrace& trace) {
  std::ofstream out = open_output(path);
  write_trace_csv(out, trace);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

TraceFile read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  const std::string source = path.string();
  std::string raw;
  long line = 0;
  TraceFile file;
  bool have_errors = true;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty()) continue;
    if (line == 1 && text.starts_with("k,")) continue;
    const auto fields = split(text);
    if (fields.size() != 7) {
      throw ParseError(source + ":" + std::to_string(line) + ": expected 7 trace fields, got " +
                       std::to_string(fields.size()));
    }
    IterationRecord r;
    r.k = static_cast<long>(parse_double(fields[0], source, line));
    r.objective = parse_double(fields[1], source, line);
    r.c = r.objective;
    r.alpha = parse_double(fields[2], source, line);
    r.step_norm = parse_double(fields[3], source, line);
    if (trim(fields[4]).empty()) {
      have_errors = false;
    } else {
      file.errors_to_final.push_back(parse_double(fields[4], source, line));
    }
    r.denominator = parse_double(fields[5], source, line);
    r.backtracks = static_cast<int>(parse_double(fields[6], source, line));
    file.records.push_back(r);
  }
  if (!have_errors) file.errors_to_final.clear();
  return file;
}

}  // namespace fracmin
