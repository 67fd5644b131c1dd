#include "contestlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace contestlab::report {

const char* stars(double p) {
  if (!(p >= 0)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  // Avoid "-0.000".
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const est::EstimateResult& r) {
  json coefs = json::array();
  for (std::size_t k = 0; k < r.names.size(); ++k) {
    const auto& name = r.names[k];
    const auto [lo, hi] = r.ci(name, 0.90);
    coefs.push_back({{"name", name},
                     {"estimate", number(r.coef(name))},
                     {"se", number(r.se(name))},
                     {"t", number(r.t_stat(name))},
                     {"p", number(r.p_value(name))},
                     {"ci90", {number(lo), number(hi)}}});
  }
  json j = {{"label", r.label},
            {"method", r.method},
            {"outcome", r.outcome},
            {"coefficients", coefs},
            {"n_obs", r.n_obs},
            {"n_clusters", r.n_clusters},
            {"singletons_dropped", r.singletons_dropped},
            {"df", r.df},
            {"r2_within", number(r.r2_within)},
            {"notes", r.notes}};
  if (r.first_stage) {
    j["first_stage"] = {{"coefficient", number(r.first_stage->coefficient)},
                        {"se", number(r.first_stage->se)},
                        {"f_stat", number(r.first_stage->f_stat)},
                        {"weak", r.first_stage->weak}};
  }
  return j;
}

json to_json(const est::DoseResponseCurve& c) {
  json pts = json::array();
  for (std::size_t g = 0; g < c.grid.size(); ++g)
    pts.push_back({number(c.grid[g]), number(c.estimate[g]), number(c.se[g]), number(c.lower[g]),
                   number(c.upper[g])});
  return {{"columns", {"a", "estimate", "se", "lower", "upper"}},
          {"points", pts},
          {"bandwidth", number(c.bandwidth.h)},
          {"kernel", ml::to_string(c.bandwidth.kernel)},
          {"level", c.level}};
}

std::string text_table(const std::string& title, const std::vector<Column>& columns,
                       const std::vector<std::string>& rows) {
  std::size_t label_w = 12;
  for (const auto& r : rows) label_w = std::max(label_w, r.size());
  label_w = std::max<std::size_t>(label_w, 16);
  std::size_t col_w = 12;
  for (const auto& c : columns) col_w = std::max(col_w, c.header.size() + 2);

  auto pad_left = [](const std::string& s, std::size_t w) {
    return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
  };
  auto pad_right = [](const std::string& s, std::size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
  };
  const std::size_t width = label_w + columns.size() * col_w;
  const std::string rule(width, '-');

  std::string out = title + "\n" + rule + "\n" + pad_right("", label_w);
  for (const auto& c : columns) out += pad_left(c.header, col_w);
  out += "\n" + rule + "\n";
  for (const auto& row : rows) {
    std::string est = pad_right(row, label_w), se = pad_right("", label_w);
    for (const auto& c : columns) {
      const auto& names = c.result.names;
      if (std::find(names.begin(), names.end(), row) == names.end()) {
        est += pad_left("", col_w);
        se += pad_left("", col_w);
        continue;
      }
      // Stars are left-aligned after the number so decimals line up.
      const std::string s = stars(c.result.p_value(row));
      est += pad_left(fixed(c.result.coef(row)) + pad_right(s, 3), col_w);
      se += pad_left("(" + fixed(c.result.se(row)) + ")   ", col_w);
    }
    out += est + "\n" + se + "\n";
  }
  out += rule + "\n";
  auto footer = [&](const std::string& label, auto value) {
    std::string line = pad_right(label, label_w);
    for (const auto& c : columns) line += pad_left(value(c.result) + "   ", col_w);
    out += line + "\n";
  };
  footer("N", [](const est::EstimateResult& r) { return std::to_string(r.n_obs); });
  footer("Clusters", [](const est::EstimateResult& r) {
    return r.n_clusters ? std::to_string(r.n_clusters) : std::string("-");
  });
  const bool any_iv = std::any_of(columns.begin(), columns.end(),
                                  [](const Column& c) { return c.result.first_stage.has_value(); });
  if (any_iv)
    footer("First-stage F", [](const est::EstimateResult& r) {
      return r.first_stage ? fixed(r.first_stage->f_stat, 1) : std::string("-");
    });
  out += rule + "\n";
  out += "*, **, *** significant at 10%, 5%, 1%. Cluster-robust (CR1) standard errors in parentheses.\n";
  return out;
}

std::string curve_csv(const est::DoseResponseCurve& c) {
  std::string out = "a,estimate,se,lower,upper\n";
  char buf[160];
  auto cell = [&](double v) { return std::isnan(v) ? std::string() : (std::snprintf(buf, sizeof buf, "%.10g", v), std::string(buf)); };
  for (std::size_t g = 0; g < c.grid.size(); ++g)
    out += cell(c.grid[g]) + "," + cell(c.estimate[g]) + "," + cell(c.se[g]) + "," +
           cell(c.lower[g]) + "," + cell(c.upper[g]) + "\n";
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace contestlab::report
