#include "contestlab/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

namespace contestlab {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

}  // namespace

MissingColumnError::MissingColumnError(std::vector<std::string> missing)
    : ArgumentError("missing column(s): " + join(missing)), missing_(std::move(missing)) {}

Panel Panel::from_records(const std::vector<dgp::ContestRecord>& records) {
  Panel p;
  p.rows_ = records.size();
  for (auto& [name, values] : dgp::numeric_columns(records)) p.set(name, std::move(values));
  p.add_group_codes();
  return p;
}

void Panel::add_group_codes() {
  auto combine = [&](const char* name, const char* a, double scale, const char* b) {
    if (has(name) || !has(a) || !has(b)) return;
    const auto &x = col(a), &y = col(b);
    std::vector<double> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = x[i] * scale + y[i];
    set(name, std::move(v));
  };
  combine("tournament_year", "year", 10000.0, "event_id");
  combine("favorite_year", "favorite_id", 10000.0, "year");
  combine("underdog_year", "underdog_id", 10000.0, "year");
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

bool parse_cell(const std::string& cell, double& v) {
  if (cell.empty()) {
    v = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  return ec == std::errc() && ptr == end;
}

}  // namespace

Panel Panel::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV", 1, -1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  std::vector<std::vector<double>> cols(header.size());
  std::vector<char> numeric(header.size(), 1);
  long row = 1;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    ++n;
    if (cells.size() != header.size())
      throw ParseError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                           " fields, header has " + std::to_string(header.size()),
                       row, static_cast<long>(std::min(cells.size(), header.size())) + 1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!numeric[c]) continue;
      if (parse_cell(cells[c], v)) cols[c].push_back(v);
      else numeric[c] = 0;
    }
  }
  Panel p;
  p.rows_ = n;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (numeric[c] && cols[c].size() == p.rows_) p.set(header[c], std::move(cols[c]));
  p.add_group_codes();
  return p;
}

Panel Panel::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_csv(in);
}

std::size_t Panel::index_of(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  return static_cast<std::size_t>(it - names_.begin());
}

bool Panel::has(const std::string& name) const { return index_of(name) < names_.size(); }

const std::vector<double>& Panel::col(const std::string& name) const {
  const auto i = index_of(name);
  if (i == names_.size()) throw MissingColumnError({name});
  return data_[i];
}

void Panel::set(const std::string& name, std::vector<double> values) {
  if (names_.empty() && rows_ == 0) rows_ = values.size();
  if (values.size() != rows_)
    throw ArgumentError("column '" + name + "' has " + std::to_string(values.size()) +
                        " rows, panel has " + std::to_string(rows_));
  const auto i = index_of(name);
  if (i == names_.size()) {
    names_.push_back(name);
    data_.push_back(std::move(values));
  } else {
    data_[i] = std::move(values);
  }
}

void Panel::require(const std::vector<std::string>& names) const {
  std::vector<std::string> missing;
  for (const auto& n : names)
    if (!has(n) && std::find(missing.begin(), missing.end(), n) == missing.end())
      missing.push_back(n);
  if (!missing.empty()) throw MissingColumnError(std::move(missing));
}

Panel Panel::select(const std::vector<std::size_t>& rows) const {
  Panel out;
  out.rows_ = rows.size();
  out.names_ = names_;
  out.data_.resize(data_.size());
  for (std::size_t c = 0; c < data_.size(); ++c) {
    auto& dst = out.data_[c];
    dst.reserve(rows.size());
    for (std::size_t r : rows) {
      if (r >= rows_) throw ArgumentError("row index out of range");
      dst.push_back(data_[c][r]);
    }
  }
  return out;
}

Panel Panel::filter(const std::function<bool(std::size_t)>& keep) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < rows_; ++i)
    if (keep(i)) rows.push_back(i);
  return select(rows);
}

}  // namespace contestlab
