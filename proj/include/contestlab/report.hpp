#pragma once

#include <string>
#include <vector>

#include "contestlab/estimators.hpp"
#include "json.hpp"

namespace contestlab::report {

using json = nlohmann::json;

// "***", "**", "*" or "" for significance at 1%, 5% and 10%.
const char* stars(double p_value);

// Fixed-point with the given decimals; NaN prints as "NA".
std::string fixed(double v, int decimals = 3);

json to_json(const est::EstimateResult& r);
json to_json(const est::DoseResponseCurve& c);

struct Column {
  std::string header;
  est::EstimateResult result;
};

// Coefficient rows with stars and standard errors in parentheses below, one
// column per regression. Rows missing from a column are left blank. Footer
// lines give N, clusters and, for 2SLS, the first-stage F.
std::string text_table(const std::string& title, const std::vector<Column>& columns,
                       const std::vector<std::string>& rows);

// grid,estimate,se,lower,upper
std::string curve_csv(const est::DoseResponseCurve& c);

// Stable pretty print used for every emitted JSON file.
std::string dump(const json& j);

}  // namespace contestlab::report
