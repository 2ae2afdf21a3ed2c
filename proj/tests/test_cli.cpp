#include "doctest.h"

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "widom/cli.hpp"
#include "widom/error.hpp"
#include "widom/io.hpp"

using namespace widom;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "widom");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("widom_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("parse_n_grid") {
  CHECK(cli::parse_n_grid("8:512:geometric") == std::vector<int>{8, 16, 32, 64, 128, 256, 512});
  CHECK(cli::parse_n_grid("4:100:geometric:3") == std::vector<int>{4, 12, 36});
  CHECK(cli::parse_n_grid("1:5:linear") == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(cli::parse_n_grid("0:10:linear:5") == std::vector<int>{0, 5, 10});
  for (const char* bad : {"8:4:linear", "0:8:geometric", "8:512", "a:9:linear", "1:9:cubic", "1:9:linear:0"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(cli::parse_n_grid(bad), Error);
  }
}

TEST_CASE("subcommands") {
  TempDir dir;
  const std::string sym = dir.file("s.json");

  SUBCASE("unknown subcommand is a configuration error") {
    const auto r = invoke({"frobnicate"});
    CHECK(r.code == 2);
    CHECK(r.err.find("ConfigInvalid") != std::string::npos);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"expand", "--no-such-flag"}).code == 2);
    CHECK(invoke({"--help"}).code == 0);
  }

  SUBCASE("gen-symbol then expand") {
    REQUIRE(invoke({"gen-symbol", "--zygmund", "0.75", "--levels", "8", "--seed", "7", "-o", sym}).code == 0);
    const auto a = io::read_symbol(sym);
    CHECK(a.smoothness() == 0.75);
    CHECK(a.max_offset() == 256);
    const auto r = invoke({"expand", "--symbol", sym, "--p", "1", "--n-grid", "8:512:geometric"});
    REQUIRE(r.code == 0);
    const auto t = io::parse_csv(r.out);
    CHECK(t.columns.front() == "n");
    CHECK(t.has("residual_abs"));
    REQUIRE(t.rows.size() == 7);
    for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i][0] > t.rows[i - 1][0]);

    // Same config, same bytes, regardless of thread count.
    const auto again = invoke({"--threads", "1", "expand", "--symbol", sym, "--p", "1", "--n-grid", "8:512:geometric"});
    CHECK(again.out == r.out);

    const std::string csv = dir.file("e.csv");
    io::write_file(csv, r.out);
    const auto fit = invoke({"decay-fit", "--input", csv, "--gamma", "0.75"});
    REQUIRE(fit.code == 0);
    const auto j = nlohmann::json::parse(fit.out);
    CHECK(j["slope"].get<double>() < 0.0);
    CHECK(j["target_slope"].get<double>() == doctest::Approx(-0.2));
  }

  SUBCASE("factor on the rational fixture") {
    REQUIRE(invoke({"gen-symbol", "--rational", "0.5", "-o", sym}).code == 0);
    const std::string report = dir.file("r.json");
    const auto r = invoke({"factor", "--symbol", sym, "--report", report});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const auto u_minus = io::symbol_from_json(j["u_minus"].dump());
    const auto u_plus = io::symbol_from_json(j["u_plus"].dump());
    CHECK(std::abs(u_minus.scalar_coeff(0) - 1.0) < 1e-8);
    CHECK(std::abs(u_minus.scalar_coeff(-1) + 0.5) < 1e-8);
    CHECK(std::abs(u_plus.scalar_coeff(0) - 1.0) < 1e-8);
    CHECK(std::abs(u_plus.scalar_coeff(1) + 0.5) < 1e-8);
    for (int k = 2; k < 10; ++k) CHECK(std::abs(u_plus.scalar_coeff(k)) < 1e-8);
    const auto rep = nlohmann::json::parse(io::read_file(report));
    CHECK(rep["product_residual_right"].get<double>() <= 1e-8);
  }

  SUBCASE("scans and traces") {
    REQUIRE(invoke({"gen-symbol", "--rational", "0.5", "-o", sym}).code == 0);
    const auto ld = io::parse_csv(invoke({"logdet-scan", "--symbol", sym, "--n-max", "1"}).out);
    CHECK(ld.columns == std::vector<std::string>{"n", "re_logdet", "im_logdet"});
    CHECK(ld.rows[1][1] == doctest::Approx(std::log(1.3125)).epsilon(1e-14));

    const auto ts = io::parse_csv(invoke({"trace-scan", "--symbol", sym, "--f", "square", "--n-max", "1"}).out);
    CHECK(ts.rows[1][1] == doctest::Approx(3.625).epsilon(1e-14));

    const auto wt = invoke({"widom-trace", "--symbol", sym, "--f", "poly:0,0,1", "--n-grid", "1:16:geometric"});
    REQUIRE(wt.code == 0);
    const auto t = io::parse_csv(wt.out);
    CHECK(t.columns == std::vector<std::string>{"n", "direct_re", "direct_im", "asymptotic_re", "asymptotic_im",
                                                "residual_abs"});
    for (const auto& row : t.rows) CHECK(row[5] < 1e-9);

    // Band-limited symbol, polynomial f: the fit has nothing to fit.
    const auto exact = invoke({"widom-trace", "--symbol", sym, "--n-grid", "4:32:geometric", "--fit-out",
                               dir.file("fit.json")});
    CHECK(exact.code == exit_code(ErrorKind::FitDegenerate));
    CHECK(exact.err.find("exact regime") != std::string::npos);
  }

  SUBCASE("approximation reports") {
    REQUIRE(invoke({"gen-symbol", "--zygmund", "1.0", "--levels", "8", "-o", sym}).code == 0);
    const auto as = invoke({"approx-scan", "--symbol", sym, "--n-grid", "4:64:geometric"});
    REQUIRE(as.code == 0);
    const auto t = io::parse_csv(as.out);
    CHECK(t.columns == std::vector<std::string>{"n", "error", "bound"});
    for (const auto& row : t.rows) CHECK(row[1] <= row[2] * (1 + 1e-12));
    const auto sm = invoke({"smoothness", "--symbol", sym});
    REQUIRE(sm.code == 0);
    const double g = nlohmann::json::parse(sm.out)["gamma_estimate"].get<double>();
    CHECK(std::abs(g - 1.0) <= 0.25);
  }

  SUBCASE("configuration errors") {
    REQUIRE(invoke({"gen-symbol", "--rational", "0.5", "-o", sym}).code == 0);
    CHECK(invoke({"expand", "--symbol", sym, "-o", sym}).code == 2);
    CHECK(invoke({"gen-symbol"}).code == 2);
    CHECK(invoke({"gen-symbol", "--rational", "0.5", "--zygmund", "1"}).code == 2);
    CHECK(invoke({"smoothness", "--symbol", sym}).code == 2);  // no gamma anywhere
    CHECK(invoke({"widom-trace", "--symbol", sym, "--nodes", "100"}).code == 2);
    CHECK(invoke({"expand", "--symbol", dir.file("missing.json")}).code == exit_code(ErrorKind::IoError));
    const auto wind = dir.file("t.json");
    io::write_file(wind, R"({"n": 1, "coeffs": [{"k": 1, "re": [[1]]}]})");
    CHECK(invoke({"expand", "--symbol", wind}).code == exit_code(ErrorKind::NonZeroWinding));
  }
}
