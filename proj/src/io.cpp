#include "polycwm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "polycwm/error.hpp"
#include "format.hpp"

namespace polycwm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string where(std::size_t row, std::string_view column) {
  return "row " + std::to_string(row) + ", column " + std::string(column);
}

double parse_double(std::string_view field, std::size_t row, std::string_view column) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::ParseError, where(row, column) + ": not a number '" + std::string(field) + "'");
  }
  if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, where(row, column) + ": non-finite value");
  return v;
}

// Blank -> nullopt; otherwise a positive integer, returned 0-based.
std::optional<std::size_t> parse_label(std::string_view field, std::size_t row, std::string_view column) {
  if (field.empty()) return std::nullopt;
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || v == 0) {
    throw Error(ErrorCode::BadLabel,
                where(row, column) + ": expected a positive integer, got '" + std::string(field) + "'");
  }
  return v - 1;
}

}  // namespace

Dataset read_csv(std::istream& in) {
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw Error(ErrorCode::EmptyFile, "no header row");

  std::string header_line = line;
  if (header_line.size() >= 3 && header_line.compare(0, 3, "\xEF\xBB\xBF") == 0) header_line.erase(0, 3);
  const auto header = split(header_line);
  std::optional<std::size_t> col_x, col_y, col_label, col_truth;
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::optional<std::size_t>* slot = nullptr;
    if (header[c] == "x") slot = &col_x;
    else if (header[c] == "y") slot = &col_y;
    else if (header[c] == "label") slot = &col_label;
    else if (header[c] == "truth") slot = &col_truth;
    else throw Error(ErrorCode::ParseError, "header: unknown column '" + std::string(header[c]) + "'");
    if (*slot) throw Error(ErrorCode::ParseError, "header: duplicate column '" + std::string(header[c]) + "'");
    *slot = c;
  }
  if (!col_x || !col_y) throw Error(ErrorCode::ParseError, "header: columns x and y are required");

  std::vector<double> x, y;
  std::vector<std::optional<std::size_t>> labels;
  std::vector<std::size_t> truth;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ": expected " +
                                             std::to_string(header.size()) + " fields, found " +
                                             std::to_string(fields.size()));
    }
    x.push_back(parse_double(fields[*col_x], row, "x"));
    y.push_back(parse_double(fields[*col_y], row, "y"));
    if (col_label) labels.push_back(parse_label(fields[*col_label], row, "label"));
    if (col_truth) {
      const auto t = parse_label(fields[*col_truth], row, "truth");
      if (!t) throw Error(ErrorCode::BadLabel, where(row, "truth") + ": missing reference label");
      truth.push_back(*t);
    }
  }
  if (row == 0) throw Error(ErrorCode::EmptyFile, "no data rows");
  return Dataset(std::move(x), std::move(y), std::move(labels), std::move(truth));
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path.string() + "'");
  return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
  const std::size_t n = data.size();
  const auto x = data.to_input_order(data.x());
  const auto y = data.to_input_order(data.y());
  std::vector<std::optional<std::size_t>> labels(n);
  for (std::size_t i = 0; i < data.num_labeled(); ++i) labels[data.input_index()[i]] = data.labels()[i];
  const bool with_labels = data.num_labeled() > 0;
  std::vector<std::size_t> truth;
  if (data.has_truth()) truth = data.to_input_order(data.truth());

  out << "x,y";
  if (with_labels) out << ",label";
  if (data.has_truth()) out << ",truth";
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out << format_double(x[i]) << ',' << format_double(y[i]);
    if (with_labels) {
      out << ',';
      if (labels[i]) out << *labels[i] + 1;
    }
    if (data.has_truth()) out << ',' << truth[i] + 1;
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
  write_csv(out, data);
  if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for '" + path.string() + "'");
}

}  // namespace polycwm
