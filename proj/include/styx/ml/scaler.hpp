#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "styx/error.hpp"
#include "styx/ml/matrix.hpp"

namespace styx::ml {

/// Rows of possibly-missing feature values.
using SparseRows = std::vector<std::vector<std::optional<double>>>;

/// Standardizes features with training statistics. Missing values take the
/// training mean of their column; columns that are constant or entirely
/// missing in training are dropped.
struct Scaler {
  std::size_t input_width = 0;
  std::vector<std::size_t> retained;     // input column indices kept, ascending
  std::vector<double> mean;              // per retained column
  std::vector<double> sd;                // per retained column, sample sd
  std::vector<double> impute;            // per input column; NaN for all-missing columns
  std::vector<std::size_t> dropped;      // input columns dropped
  std::vector<std::string> warnings;

  Matrix transform(const SparseRows& rows) const {
    Matrix out(rows.size(), retained.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != input_width) throw Error("scaler: row width " + std::to_string(rows[i].size()) +
                                                     " does not match fitted width " + std::to_string(input_width));
      for (std::size_t k = 0; k < retained.size(); ++k) {
        const std::size_t c = retained[k];
        const double x = rows[i][c] ? *rows[i][c] : impute[c];
        out(i, k) = (x - mean[k]) / sd[k];
      }
    }
    return out;
  }

  bool operator==(const Scaler&) const = default;
};

inline Scaler fit_scaler(const SparseRows& rows) {
  if (rows.size() < 2) throw Error("fit_scaler needs at least 2 rows");
  Scaler s;
  s.input_width = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != s.input_width) throw Error("fit_scaler: ragged rows");

  const double n = static_cast<double>(rows.size());
  for (std::size_t c = 0; c < s.input_width; ++c) {
    double sum = 0;
    std::size_t present = 0;
    for (const auto& r : rows)
      if (r[c]) {
        sum += *r[c];
        ++present;
      }
    if (present == 0) {
      s.impute.push_back(std::nan(""));
      s.dropped.push_back(c);
      s.warnings.push_back("column " + std::to_string(c) + " is entirely missing; dropped");
      continue;
    }
    const double fill = sum / static_cast<double>(present);
    s.impute.push_back(fill);
    double m = 0;
    for (const auto& r : rows) m += r[c] ? *r[c] : fill;
    m /= n;
    double ss = 0;
    for (const auto& r : rows) {
      const double d = (r[c] ? *r[c] : fill) - m;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (n - 1));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(m)))) {
      s.dropped.push_back(c);
      continue;
    }
    s.retained.push_back(c);
    s.mean.push_back(m);
    s.sd.push_back(sd);
  }
  return s;
}

}  // namespace styx::ml
