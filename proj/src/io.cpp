#include "widom/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "widom/error.hpp"

namespace widom::io {
namespace {

using nlohmann::json;

void append_matrix(std::string& out, const Matrix& m, bool imag) {
  out += '[';
  for (Index r = 0; r < m.rows(); ++r) {
    if (r > 0) out += ", ";
    out += '[';
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ", ";
      out += format_double(imag ? m(r, c).imag() : m(r, c).real());
    }
    out += ']';
  }
  out += ']';
}

std::string symbol_body(const LaurentMatrixSeries& a, const std::string& indent) {
  std::string out = "{\n" + indent + "  \"n\": " + std::to_string(a.block_size()) + ",\n";
  if (a.smoothness()) out += indent + "  \"gamma\": " + format_double(*a.smoothness()) + ",\n";
  out += indent + "  \"coeffs\": [";
  bool first = true;
  for (const auto& [k, blk] : a.coeffs()) {
    out += first ? "\n" : ",\n";
    first = false;
    out += indent + "    {\"k\": " + std::to_string(k) + ", \"re\": ";
    append_matrix(out, blk, false);
    out += ", \"im\": ";
    append_matrix(out, blk, true);
    out += '}';
  }
  out += first ? "]\n" : "\n" + indent + "  ]\n";
  out += indent + "}";
  return out;
}

[[noreturn]] void bad_symbol(const std::string& what) { fail(ErrorKind::ConfigInvalid, "symbol JSON: " + what); }

Matrix read_block(const json& re, const json& im, Index n) {
  if (!re.is_array() || static_cast<Index>(re.size()) != n) bad_symbol("\"re\" must be an n x n array");
  if (!im.is_null() && (!im.is_array() || static_cast<Index>(im.size()) != n))
    bad_symbol("\"im\" must be an n x n array");
  Matrix m(n, n);
  for (Index r = 0; r < n; ++r) {
    if (!re[r].is_array() || static_cast<Index>(re[r].size()) != n) bad_symbol("\"re\" rows must have n entries");
    for (Index c = 0; c < n; ++c) {
      double y = 0.0;
      if (!im.is_null()) {
        if (!im[r].is_array() || static_cast<Index>(im[r].size()) != n) bad_symbol("\"im\" rows must have n entries");
        y = im[r][c].get<double>();
      }
      m(r, c) = Complex(re[r][c].get<double>(), y);
    }
  }
  return m;
}

json fit_json(const DecayFit& fit) {
  json pts = json::array();
  for (const FitPoint& p : fit.points) pts.push_back({{"n", p.n}, {"magnitude", p.magnitude}});
  json j = {{"points", pts},
            {"slope", fit.slope},
            {"intercept", fit.intercept},
            {"r_squared", fit.r_squared},
            {"slope_stderr", fit.slope_stderr},
            {"superpolynomial", fit.superpolynomial}};
  j["target_slope"] = fit.target_slope ? json(*fit.target_slope) : json(nullptr);
  j["within_band"] = fit.within_band ? json(*fit.within_band) : json(nullptr);
  return j;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string symbol_to_json(const LaurentMatrixSeries& a) { return symbol_body(a, "") + "\n"; }

LaurentMatrixSeries symbol_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad_symbol(e.what());
  }
  try {
    if (!j.is_object() || !j.contains("n") || !j.contains("coeffs")) bad_symbol("need \"n\" and \"coeffs\"");
    const Index n = j["n"].get<Index>();
    if (n < 1) bad_symbol("\"n\" must be positive");
    LaurentMatrixSeries::CoeffMap coeffs;
    for (const json& c : j["coeffs"]) {
      const int k = c.at("k").get<int>();
      const Matrix blk = read_block(c.at("re"), c.contains("im") ? c["im"] : json(nullptr), n);
      auto [it, fresh] = coeffs.emplace(k, blk);
      if (!fresh) it->second += blk;
    }
    std::optional<double> gamma;
    if (j.contains("gamma") && !j["gamma"].is_null()) gamma = j["gamma"].get<double>();
    return LaurentMatrixSeries(n, std::move(coeffs), gamma);
  } catch (const json::exception& e) {
    bad_symbol(e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::IoError, "write failed for " + path);
}

LaurentMatrixSeries read_symbol(const std::string& path) { return symbol_from_json(read_file(path)); }

void write_symbol(const std::string& path, const LaurentMatrixSeries& a) { write_file(path, symbol_to_json(a)); }

std::string factors_to_json(const WHFactors& w, bool left) {
  std::string out = "{\n";
  out += "  \"normalization\": " + json(w.normalization).dump() + ",\n";
  out += "  \"method\": " + json(w.method).dump() + ",\n";
  out += "  \"side\": \"" + std::string(left ? "left" : "right") + "\",\n";
  const std::vector<std::pair<std::string, const LaurentMatrixSeries*>> parts =
      left ? std::vector<std::pair<std::string, const LaurentMatrixSeries*>>{{"v_plus", &w.v_plus},
                                                                            {"v_minus", &w.v_minus},
                                                                            {"v_plus_inv", &w.v_plus_inv},
                                                                            {"v_minus_inv", &w.v_minus_inv}}
           : std::vector<std::pair<std::string, const LaurentMatrixSeries*>>{{"u_minus", &w.u_minus},
                                                                            {"u_plus", &w.u_plus},
                                                                            {"u_minus_inv", &w.u_minus_inv},
                                                                            {"u_plus_inv", &w.u_plus_inv}};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out += "  \"" + parts[i].first + "\": " + symbol_body(*parts[i].second, "  ");
    out += i + 1 < parts.size() ? ",\n" : "\n";
  }
  out += "}\n";
  return out;
}

std::string residuals_to_json(const FactorResiduals& r) {
  const json j = {{"product_residual_right", r.product_residual_right},
                  {"product_residual_left", r.product_residual_left},
                  {"leakage", r.leakage},
                  {"inverse_margin", r.inverse_margin},
                  {"section", r.section},
                  {"check_grid", r.check_grid}};
  return j.dump(2) + "\n";
}

std::string decay_fit_to_json(const DecayFit& fit) { return fit_json(fit).dump(2) + "\n"; }

std::string smoothness_to_json(const SmoothnessReport& r) {
  json errs = json::array();
  for (const FitPoint& p : r.per_n_errors) errs.push_back({{"n", p.n}, {"error", p.magnitude}});
  const json j = {{"gamma_estimate", r.gamma_estimate},
                  {"per_n_errors", errs},
                  {"seminorm_estimate", r.seminorm_estimate},
                  {"jackson_constant", r.jackson_constant},
                  {"bound_spread", r.bound_spread},
                  {"fit", fit_json(r.fit)}};
  return j.dump(2) + "\n";
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : width_(columns.size()) {
  for (std::size_t i = 0; i < columns.size(); ++i) text_ += (i ? "," : "") + columns[i];
  text_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  require(values.size() == width_, "CSV row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) text_ += (i ? "," : "") + format_double(values[i]);
  text_ += '\n';
}

std::string CsvWriter::str() const { return text_; }

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  fail(ErrorKind::ConfigInvalid, "CSV has no column \"" + name + "\"");
}

bool CsvTable::has(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::ConfigInvalid, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.columns = split(line, ',');
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.columns.size()) {
      fail(ErrorKind::ConfigInvalid, "CSV line " + std::to_string(lineno) + " has the wrong number of fields");
    }
    std::vector<double> row;
    for (const std::string& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != c.size()) {
        fail(ErrorKind::ConfigInvalid, "CSV line " + std::to_string(lineno) + ": \"" + c + "\" is not a number");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace widom::io
