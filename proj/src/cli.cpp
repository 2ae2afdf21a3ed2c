#include "widom/cli.hpp"

#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "widom/approx.hpp"
#include "widom/asymptotics.hpp"
#include "widom/error.hpp"
#include "widom/factor.hpp"
#include "widom/io.hpp"
#include "widom/parallel.hpp"
#include "widom/scalar_function.hpp"
#include "widom/toeplitz.hpp"
#include "widom/traces.hpp"

namespace widom::cli {
namespace {

[[noreturn]] void bad_config(const std::string& what) { fail(ErrorKind::ConfigInvalid, what); }

int parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) bad_config("n-grid: " + what + " \"" + s + "\" is not an integer");
  return v;
}

void emit(const ExperimentConfig& c, std::ostream& out, const std::string& text) {
  if (c.output_path.empty()) {
    out << text;
  } else {
    io::write_file(c.output_path, text);
  }
}

double require_gamma(const ExperimentConfig& c, const LaurentMatrixSeries& a) {
  if (c.gamma) return *c.gamma;
  if (a.smoothness()) return *a.smoothness();
  bad_config(c.command + " needs --gamma or a symbol with a \"gamma\" tag");
}

LaurentMatrixSeries block_fixture(double rho) {
  Matrix r(2, 2);
  r << 1.0, 0.2, 0.0, 1.0;
  return LaurentMatrixSeries(
      2, {{-1, -rho * r.transpose()}, {0, (1.0 + rho * rho) * Matrix::Identity(2, 2)}, {1, -rho * r}});
}

void gen_symbol(const ExperimentConfig& c, std::ostream& out) {
  const int chosen = int(c.zygmund.has_value()) + int(c.rational.has_value()) + int(c.block.has_value());
  if (chosen != 1) bad_config("gen-symbol needs exactly one of --zygmund, --rational, --block");
  LaurentMatrixSeries a;
  if (c.zygmund) {
    a = zygmund_test_symbol(*c.zygmund, c.levels, static_cast<std::uint64_t>(c.seed));
  } else if (c.rational) {
    const double rho = *c.rational;
    if (!(std::abs(rho) < 1.0)) bad_config("--rational needs |rho| < 1");
    a = LaurentMatrixSeries::scalar({{-1, -rho}, {0, 1.0 + rho * rho}, {1, -rho}});
  } else {
    if (!(std::abs(*c.block) < 1.0)) bad_config("--block needs |rho| < 1");
    a = block_fixture(*c.block);
  }
  emit(c, out, io::symbol_to_json(a));
}

void factor(const ExperimentConfig& c, std::ostream& out) {
  const LaurentMatrixSeries a = io::read_symbol(c.symbol_path);
  const WHFactors w = canonical_wh(a, c.m > 0 ? c.m : 256);
  emit(c, out, io::factors_to_json(w, c.left));
  if (!c.report_path.empty()) io::write_file(c.report_path, io::residuals_to_json(w.residuals));
}

std::vector<int> linear_range(const ExperimentConfig& c) {
  if (c.n_min < 0 || c.n_max < c.n_min || c.step < 1) bad_config("need 0 <= n-min <= n-max and step >= 1");
  std::vector<int> ns;
  for (int n = c.n_min; n <= c.n_max; n += c.step) ns.push_back(n);
  return ns;
}

void logdet_scan(const ExperimentConfig& c, std::ostream& out) {
  const LaurentMatrixSeries a = io::read_symbol(c.symbol_path);
  const std::vector<int> ns = linear_range(c);
  const std::vector<Complex> v = log_det_scan(a, ns);
  io::CsvWriter csv({"n", "re_logdet", "im_logdet"});
  for (std::size_t i = 0; i < ns.size(); ++i) csv.row({double(ns[i]), v[i].real(), v[i].imag()});
  emit(c, out, csv.str());
}

void trace_scan_cmd(const ExperimentConfig& c, std::ostream& out) {
  const LaurentMatrixSeries a = io::read_symbol(c.symbol_path);
  const ScalarFunction f = ScalarFunction::parse(c.f_spec);
  const std::vector<int> ns = linear_range(c);
  std::vector<Complex> v(ns.size());
  parallel_for(ns.size(), [&](std::size_t i) { v[i] = trace_f_direct(a, ns[i], f); });
  io::CsvWriter csv({"n", "re", "im"});
  for (std::size_t i = 0; i < ns.size(); ++i) csv.row({double(ns[i]), v[i].real(), v[i].imag()});
  emit(c, out, csv.str());
}

void expand(const ExperimentConfig& c, std::ostream& out) {
  const LaurentMatrixSeries a = io::read_symbol(c.symbol_path);
  const std::vector<int> ns = parse_n_grid(c.n_grid);
  if (c.p < 1) bad_config("--p must be at least 1");
  const ExpansionModel model = expansion_model(a, c.p, canonical_wh(a, c.m > 0 ? c.m : 256));
  const auto reports = expansion_scan(a, ns, model);
  io::CsvWriter csv({"n", "p", "log_G_term_re", "log_G_term_im", "correction_sum_re", "correction_sum_im",
                     "log_E_constant_re", "log_E_constant_im", "predicted_re", "predicted_im", "direct_re",
                     "direct_im", "residual_re", "residual_im", "residual_abs"});
  for (const auto& r : reports) {
    csv.row({double(r.n), double(r.p), r.log_G_term.real(), r.log_G_term.imag(), r.correction_sum.real(),
             r.correction_sum.imag(), r.log_E_constant.real(), r.log_E_constant.imag(), r.predicted.real(),
             r.predicted.imag(), r.direct.real(), r.direct.imag(), r.residual.real(), r.residual.imag(),
             std::abs(r.residual)});
  }
  emit(c, out, csv.str());
}

void widom_trace(const ExperimentConfig& c, std::ostream& out) {
  const LaurentMatrixSeries a = io::read_symbol(c.symbol_path);
  const ScalarFunction f = ScalarFunction::parse(c.f_spec);
  const std::vector<int> ns = parse_n_grid(c.n_grid);
  const ContourSpec contour = build_contour(estimate_spectrum(a), c.margin, c.nodes);
  const TraceScan scan = trace_scan(a, f, ns, contour);
  io::CsvWriter csv({"n", "direct_re", "direct_im", "asymptotic_re", "asymptotic_im", "residual_abs"});
  for (const TraceRow& r : scan.rows) {
    csv.row({double(r.n), r.direct.real(), r.direct.imag(), r.asymptotic.real(), r.asymptotic.imag(),
             r.residual_abs});
  }
  emit(c, out, csv.str());
  if (!c.fit_path.empty()) {
    const std::optional<double> gamma = c.gamma ? c.gamma : a.smoothness();
    io::write_file(c.fit_path, io::decay_fit_to_json(trace_remainder_fit(scan, gamma)));
  }
}

void decay_fit(const ExperimentConfig& c, std::ostream& out) {
  const io::CsvTable t = io::parse_csv(io::read_file(c.input_path));
  const std::size_t n_col = t.column("n");
  const std::size_t v_col = t.column(c.column);
  std::vector<FitPoint> pts;
  for (const auto& row : t.rows) pts.push_back({row[n_col], std::abs(row[v_col])});
  DecayFit fit = fit_decay(pts);
  if (c.gamma) {
    const double p = t.has("p") && !t.rows.empty() ? t.rows.front()[t.column("p")] : 1.0;
    apply_target(fit, -(2.0 * *c.gamma * p - 1.0) + 0.3);
  }
  emit(c, out, io::decay_fit_to_json(fit));
}

void approx_scan(const ExperimentConfig& c, std::ostream& out) {
  const LaurentMatrixSeries a = io::read_symbol(c.symbol_path);
  const double gamma = require_gamma(c, a);
  const std::vector<int> ns = parse_n_grid(c.n_grid);
  std::vector<double> errs(ns.size());
  parallel_for(ns.size(), [&](std::size_t i) { errs[i] = near_best_laurent_approx(a, ns[i]).error; });
  double constant = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) constant = std::max(constant, errs[i] * std::pow(ns[i], gamma));
  io::CsvWriter csv({"n", "error", "bound"});
  for (std::size_t i = 0; i < ns.size(); ++i) csv.row({double(ns[i]), errs[i], constant * std::pow(ns[i], -gamma)});
  emit(c, out, csv.str());
}

void smoothness(const ExperimentConfig& c, std::ostream& out) {
  const LaurentMatrixSeries a = io::read_symbol(c.symbol_path);
  const double gamma = require_gamma(c, a);
  emit(c, out, io::smoothness_to_json(jackson_decay_check(a, gamma, parse_n_grid(c.n_grid))));
}

}  // namespace

std::vector<int> parse_n_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::istringstream in(spec);
  for (std::string s; std::getline(in, s, ':');) parts.push_back(s);
  if (parts.size() < 3 || parts.size() > 4) bad_config("n-grid \"" + spec + "\": expected min:max:linear|geometric[:step]");
  const int lo = parse_int(parts[0], "min");
  const int hi = parse_int(parts[1], "max");
  if (lo < 0 || hi < lo) bad_config("n-grid \"" + spec + "\": need 0 <= min <= max");
  std::vector<int> ns;
  if (parts[2] == "linear") {
    const int step = parts.size() == 4 ? parse_int(parts[3], "step") : 1;
    if (step < 1) bad_config("n-grid step must be positive");
    for (long n = lo; n <= hi; n += step) ns.push_back(static_cast<int>(n));
  } else if (parts[2] == "geometric") {
    const int factor = parts.size() == 4 ? parse_int(parts[3], "factor") : 2;
    if (factor < 2 || lo < 1) bad_config("geometric n-grid needs min >= 1 and factor >= 2");
    for (long n = lo; n <= hi; n *= factor) ns.push_back(static_cast<int>(n));
  } else {
    bad_config("n-grid \"" + spec + "\": spacing must be linear or geometric");
  }
  return ns;
}

void validate(const ExperimentConfig& c) {
  const std::vector<std::string> inputs{c.symbol_path, c.input_path};
  const std::vector<std::string> outputs{c.output_path, c.report_path, c.fit_path};
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i].empty()) continue;
    for (const std::string& in : inputs)
      if (outputs[i] == in) bad_config("output path " + outputs[i] + " is also an input");
    for (std::size_t j = i + 1; j < outputs.size(); ++j)
      if (outputs[i] == outputs[j]) bad_config("output path " + outputs[i] + " is used twice");
  }
  if (c.nodes < 64 || (c.nodes & (c.nodes - 1)) != 0) bad_config("--nodes must be a power of two >= 64");
  if (!(c.margin > 0.0)) bad_config("--margin must be positive");
}

void execute(const ExperimentConfig& c, std::ostream& out) {
  validate(c);
  if (c.command == "gen-symbol") return gen_symbol(c, out);
  if (c.command == "factor") return factor(c, out);
  if (c.command == "logdet-scan") return logdet_scan(c, out);
  if (c.command == "trace-scan") return trace_scan_cmd(c, out);
  if (c.command == "expand") return expand(c, out);
  if (c.command == "widom-trace") return widom_trace(c, out);
  if (c.command == "decay-fit") return decay_fit(c, out);
  if (c.command == "approx-scan") return approx_scan(c, out);
  if (c.command == "smoothness") return smoothness(c, out);
  bad_config("unknown subcommand \"" + c.command + "\"");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ExperimentConfig c;
  int threads = 0;
  CLI::App app{"Toeplitz determinant and trace asymptotics toolkit", "widom"};
  app.require_subcommand(1);
  app.add_option("--threads", threads, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);

  auto symbol_in = [&](CLI::App* s) { s->add_option("--symbol", c.symbol_path, "symbol JSON")->required(); };
  auto output = [&](CLI::App* s) { s->add_option("-o,--output", c.output_path, "output file (default stdout)"); };
  // One grid string per subcommand so each keeps its own default.
  std::map<std::string, std::string> grids;
  auto grid = [&](CLI::App* s, const std::string& def) {
    grids[s->get_name()] = def;
    s->add_option("--n-grid", grids[s->get_name()], "min:max:linear|geometric[:step]")->capture_default_str();
  };
  auto range = [&](CLI::App* s) {
    s->add_option("--n-min", c.n_min)->capture_default_str();
    s->add_option("--n-max", c.n_max)->capture_default_str();
    s->add_option("--step", c.step)->capture_default_str();
  };
  std::vector<std::pair<CLI::App*, std::string>> subs;
  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    subs.emplace_back(s, name);
    return s;
  };

  CLI::App* gen = sub("gen-symbol", "write a fixture symbol");
  gen->add_option("--zygmund", c.zygmund, "lacunary fixture with this gamma");
  gen->add_option("--levels", c.levels, "lacunary levels J")->capture_default_str();
  gen->add_option("--seed", c.seed, "phase seed (0: zero phases)")->capture_default_str();
  gen->add_option("--rational", c.rational, "scalar (1 - rho/t)(1 - rho t)");
  gen->add_option("--block", c.block, "2x2 fixture with coupling [[1,0.2],[0,1]] and this rho");
  output(gen);

  CLI::App* fac = sub("factor", "canonical Wiener-Hopf factors");
  symbol_in(fac);
  fac->add_flag("--left", c.left, "emit the left factors v_+, v_-");
  fac->add_option("--m", c.m, "finite section for block symbols (default 256)");
  fac->add_option("--report", c.report_path, "residual report JSON");
  output(fac);

  CLI::App* lds = sub("logdet-scan", "log det T_n(a) over a range of n");
  symbol_in(lds);
  range(lds);
  output(lds);

  CLI::App* trs = sub("trace-scan", "tr f(T_n(a)) over a range of n");
  symbol_in(trs);
  range(trs);
  trs->add_option("--f", c.f_spec, "square | exp | log | poly:c0,c1,... | rational:p...;q...")->capture_default_str();
  output(trs);

  CLI::App* exp = sub("expand", "log det T_n(a) against its order-p expansion");
  symbol_in(exp);
  exp->add_option("--p", c.p, "expansion order")->capture_default_str();
  exp->add_option("--m", c.m, "finite section for block factorization (default 256)");
  grid(exp, "8:512:geometric");
  output(exp);

  CLI::App* wt = sub("widom-trace", "tr f(T_n(a)) against (n+1) G_f + E_f");
  symbol_in(wt);
  wt->add_option("--f", c.f_spec)->capture_default_str();
  wt->add_option("--margin", c.margin, "contour clearance around the spectrum estimate")->capture_default_str();
  wt->add_option("--nodes", c.nodes, "contour nodes")->capture_default_str();
  wt->add_option("--gamma", c.gamma, "smoothness for the target band (default: symbol tag)");
  wt->add_option("--fit-out", c.fit_path, "decay fit JSON");
  grid(wt, "8:512:geometric");
  output(wt);

  CLI::App* df = sub("decay-fit", "log-log fit of a CSV column against n");
  df->add_option("--input", c.input_path, "CSV from expand or widom-trace")->required();
  df->add_option("--column", c.column)->capture_default_str();
  df->add_option("--gamma", c.gamma, "smoothness for the target band");
  output(df);

  CLI::App* as = sub("approx-scan", "near-best approximation errors");
  symbol_in(as);
  as->add_option("--gamma", c.gamma, "rate for the bound column (default: symbol tag)");
  grid(as, "4:64:geometric");
  output(as);

  CLI::App* sm = sub("smoothness", "Jackson rate report");
  symbol_in(sm);
  sm->add_option("--gamma", c.gamma, "claimed smoothness (default: symbol tag)");
  grid(sm, "4:64:geometric");
  output(sm);

  // The first bare word must name a subcommand.
  for (int i = 1; i < argc; ++i) {
    const std::string word = argv[i];
    if (word == "--threads") {
      ++i;
      continue;
    }
    if (word.rfind("-", 0) == 0) continue;
    bool known = false;
    for (const auto& entry : subs) known = known || entry.second == word;
    if (!known) {
      err << "error: " << error_name(ErrorKind::ConfigInvalid) << ": unknown subcommand \"" << word << "\"\n";
      return exit_code(ErrorKind::ConfigInvalid);
    }
    break;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);  // --help
    err << "error: " << error_name(ErrorKind::ConfigInvalid) << ": " << e.what() << "\n";
    return exit_code(ErrorKind::ConfigInvalid);
  }
  for (const auto& [s, name] : subs) {
    if (s->parsed()) c.command = name;
  }
  if (grids.count(c.command)) c.n_grid = grids[c.command];

  set_thread_count(threads);
  try {
    execute(c, out);
  } catch (const Error& e) {
    err << "error: " << error_name(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace widom::cli
