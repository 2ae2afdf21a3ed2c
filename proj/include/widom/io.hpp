#pragma once

// File formats: symbols and factors as JSON, scans as CSV, reports as JSON.
//
// Symbol JSON: {"n": N, "coeffs": [{"k": k, "re": [[...]], "im": [[...]]}, ...],
//               "gamma": optional}
// Numbers are written with 17 significant digits, so a read-back is bit-exact.

#include <iosfwd>
#include <string>
#include <vector>

#include "widom/approx.hpp"
#include "widom/decay_fit.hpp"
#include "widom/factor.hpp"
#include "widom/series.hpp"

namespace widom::io {

/// %.17g
std::string format_double(double x);

std::string symbol_to_json(const LaurentMatrixSeries& a);
/// Throws ConfigInvalid on malformed input.
LaurentMatrixSeries symbol_from_json(const std::string& text);

/// Throws IoError when the file cannot be opened or written.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

LaurentMatrixSeries read_symbol(const std::string& path);
void write_symbol(const std::string& path, const LaurentMatrixSeries& a);

/// {"normalization", "method", "u_minus", "u_plus", ...} with each factor in
/// the symbol format. `left` selects v_± instead of u_±.
std::string factors_to_json(const WHFactors& w, bool left);
std::string residuals_to_json(const FactorResiduals& r);

std::string decay_fit_to_json(const DecayFit& fit);
std::string smoothness_to_json(const SmoothnessReport& r);

/// Header row plus rows, comma separated, numbers via format_double.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void row(const std::vector<double>& values);
  std::string str() const;

 private:
  std::size_t width_;
  std::string text_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws ConfigInvalid when absent.
  std::size_t column(const std::string& name) const;
  bool has(const std::string& name) const;
};

/// Throws ConfigInvalid on ragged or non-numeric rows.
CsvTable parse_csv(const std::string& text);

}  // namespace widom::io
