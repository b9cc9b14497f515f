#include "msc/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "msc/errors.hpp"

namespace msc {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_number(std::string_view field, std::size_t row,
                    std::string_view column) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ParseError("row " + std::to_string(row) + ": cannot parse '" +
                         std::string(field) + "' in column " +
                         std::string(column),
                     row);
  return v;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

void append_number(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

Dataset read_dataset(std::istream& in, const LoadOptions& opts) {
  std::string line;
  if (!next_line(in, line)) throw SchemaError("empty file: missing header", 0);
  // owned copy: `line` is reused for the data rows
  const auto header_views = split_commas(line);
  const std::vector<std::string> header(header_views.begin(), header_views.end());
  if (header.size() < 2 || header[header.size() - 2] != "budget" ||
      header.back() != "label") {
    const bool has_label = std::find(header.begin(), header.end(), "label") != header.end();
    const bool has_budget = std::find(header.begin(), header.end(), "budget") != header.end();
    if (!has_budget) throw SchemaError("header is missing column 'budget'", 0);
    if (!has_label) throw SchemaError("header is missing column 'label'", 0);
    throw SchemaError("header must end with 'budget,label'", 0);
  }
  const std::size_t dim = header.size() - 2;
  if (dim == 0) throw SchemaError("header has no feature columns", 0);
  for (std::size_t j = 0; j < dim; ++j)
    if (header[j] != "feature_" + std::to_string(j))
      throw SchemaError("header column " + std::to_string(j + 1) +
                            " must be 'feature_" + std::to_string(j) + "'",
                        0);

  Dataset data(dim);
  std::vector<double> x(dim);
  std::size_t row = 0;
  while (next_line(in, line)) {
    ++row;
    if (line.empty()) {
      // only trailing blank lines are tolerated
      std::string rest;
      while (next_line(in, rest))
        if (!rest.empty())
          throw ParseError("row " + std::to_string(row) + ": blank line", row);
      break;
    }
    const auto fields = split_commas(line);
    if (fields.size() != dim + 2)
      throw ParseError("row " + std::to_string(row) + ": expected " +
                           std::to_string(dim + 2) + " fields, found " +
                           std::to_string(fields.size()),
                       row);
    for (std::size_t j = 0; j < dim; ++j) {
      x[j] = parse_number(fields[j], row, header[j]);
      if (x[j] < 0.0 && !opts.allow_negative_features)
        throw InvariantViolation("row " + std::to_string(row) +
                                     ": negative feature " + std::string(header[j]),
                                 row);
    }
    const double b = parse_number(fields[dim], row, "budget");
    if (!(b > 0.0))
      throw InvariantViolation("row " + std::to_string(row) +
                                   ": budget must be > 0",
                               row);
    const double lab = parse_number(fields[dim + 1], row, "label");
    if (lab != 0.0 && lab != 1.0)
      throw InvariantViolation("row " + std::to_string(row) +
                                   ": label must be 0 or 1",
                               row);
    data.add(x, b, static_cast<int>(lab));
  }
  return data;
}

Dataset load_dataset(const std::filesystem::path& path,
                     const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset " + path.string(), 0);
  return read_dataset(in, opts);
}

void write_dataset(std::ostream& out, const Dataset& data) {
  std::string buf;
  for (std::size_t j = 0; j < data.dim(); ++j)
    buf += "feature_" + std::to_string(j) + ",";
  buf += "budget,label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features(i)) {
      append_number(buf, v);
      buf += ',';
    }
    append_number(buf, data.budget(i));
    buf += ',';
    buf += data.label(i) ? '1' : '0';
    buf += '\n';
  }
  out << buf;
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  write_dataset(out, data);
}

DemandProfile read_profile(std::istream& in) {
  std::string line;
  if (!next_line(in, line) || line != "units,budget")
    throw SchemaError("profile header must be 'units,budget'", 0);
  std::vector<double> units, budgets;
  std::size_t row = 0;
  while (next_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 2)
      throw ParseError("row " + std::to_string(row) + ": expected 2 fields", row);
    const double u = parse_number(f[0], row, "units");
    const double b = parse_number(f[1], row, "budget");
    if (!(u > 0.0) || !(b > 0.0))
      throw InvariantViolation("row " + std::to_string(row) +
                                   ": units and budget must be > 0",
                               row);
    units.push_back(u);
    budgets.push_back(b);
  }
  return make_profile(units, budgets);
}

DemandProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open profile " + path.string(), 0);
  return read_profile(in);
}

void write_profile(std::ostream& out, const DemandProfile& profile) {
  std::string buf = "units,budget\n";
  for (const auto& p : profile.points) {
    append_number(buf, p.units);
    buf += ',';
    append_number(buf, p.budget);
    buf += '\n';
  }
  out << buf;
}

Dataset rescale_budgets(const Dataset& data, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw InputError("budget rescale exponent must be finite and >= 0");
  if (data.empty()) return data;
  const auto b = data.budgets();
  const auto [mn, mx] = std::minmax_element(b.begin(), b.end());
  const double lo = *mn, hi = *mx, top = std::exp2(alpha);
  std::vector<double> out(b.size(), 1.0);
  if (hi > lo) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b[i] == lo) out[i] = 1.0;
      else if (b[i] == hi) out[i] = top;
      else out[i] = 1.0 + (b[i] - lo) / (hi - lo) * (top - 1.0);
    }
  }
  return data.with_budgets(std::move(out));
}

}  // namespace msc
