#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "contestlab/errors.hpp"
#include "contestlab/tournament_dgp.hpp"

namespace contestlab {

// One or more requested columns are absent from a panel.
class MissingColumnError : public ArgumentError {
 public:
  explicit MissingColumnError(std::vector<std::string> missing);
  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

// Column-oriented numeric table. Missing values are NaN.
class Panel {
 public:
  Panel() = default;

  // All numeric contest columns plus the fixed-effect codes
  // tournament_year, favorite_year and underdog_year.
  static Panel from_records(const std::vector<dgp::ContestRecord>& records);

  // Generic numeric CSV: empty cells are NaN, columns holding any
  // non-numeric cell are skipped. Adds the fixed-effect codes when the
  // identifier columns are present. Throws ParseError on ragged rows.
  static Panel read_csv(std::istream& in);
  static Panel read_csv(const std::string& path);

  std::size_t rows() const { return rows_; }
  const std::vector<std::string>& names() const { return names_; }
  bool has(const std::string& name) const;
  const std::vector<double>& col(const std::string& name) const;
  // Adds or replaces a column; its length must match the panel.
  void set(const std::string& name, std::vector<double> values);
  // Throws MissingColumnError listing every absent name.
  void require(const std::vector<std::string>& names) const;

  Panel select(const std::vector<std::size_t>& rows) const;
  Panel filter(const std::function<bool(std::size_t)>& keep) const;

 private:
  void add_group_codes();
  std::size_t index_of(const std::string& name) const;
  std::size_t rows_ = 0;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> data_;
};

}  // namespace contestlab
