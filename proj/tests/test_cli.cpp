#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "eislab/app/config.hpp"
#include "eislab/app/experiment.hpp"
#include "eislab/app/panel.hpp"
#include "eislab/core/error.hpp"

using namespace eislab;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "test.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("eislab_test_" + name);
  fs::remove_all(d);
  return d;
}

fs::path write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> listing(const fs::path& d) {
  std::vector<std::string> out;
  if (!fs::exists(d)) return out;
  for (const auto& e : fs::directory_iterator(d)) out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

// Panel with log(c / (w - c)) = 0.3 + slope x exactly.
Panel linear_panel(double slope) {
  Panel p;
  p.groups = {"g"};
  p.group_psi = {1.0};
  for (std::size_t i = 0; i < 9; ++i) {
    PanelRow r;
    r.agent = i;
    r.alpha_t = -0.2 + 0.05 * static_cast<double>(i);
    r.wealth = 1.0 + 0.1 * static_cast<double>(i);
    const double ratio = std::exp(0.3 + slope * r.alpha_t);
    r.consumption = r.wealth * ratio / (1.0 + ratio);
    r.g = 1.0;
    p.rows.push_back(r);
  }
  return p;
}

const char* kFigure = R"({"figure1": {"beta": 0.5, "psis": [0.5, 1.0, 2.0], "rates": [1.0, 1.25, 1.5], "resolution": 21}})";

const char* kIdentify = R"({"identify": {
  "groups": [{"label": "a", "psi": 0.5, "agents": 20}, {"label": "b", "psi": 2.0, "agents": 20}],
  "template": {"horizon": 3, "transition": {"probs": [0.5, 0.5], "returns": [[1.02, 1.02], [0.9, 1.25]]}},
  "design": {"kind": "uniform_grid", "lo": -0.25, "hi": 0.25, "points": 5, "idiosyncratic_sd": 0.1},
  "periods": 10, "noise": [0.0, 0.01]}})";

}  // namespace

TEST_CASE("configuration errors name the location") {
  const std::string syntax = config_error("{\n  \"figure1\": {\"beta\": 0.5,,}\n}");
  CHECK(syntax.find("test.json:2:") != std::string::npos);
  CHECK(syntax.find("syntax error") != std::string::npos);
  const std::string unknown = config_error(R"({"figure1": {"beta": 0.5, "bta": 1}})");
  CHECK(unknown.find("figure1.bta") != std::string::npos);
  const std::string top = config_error(R"({"nonsense": 1})");
  CHECK(top.find("nonsense") != std::string::npos);
  const std::string type = config_error(R"({"grid": {"n": "many"}})");
  CHECK(type.find("grid.n") != std::string::npos);
  const std::string domain =
      config_error(R"({"setting": {"horizon": 2, "period": {"aggregator": {"family": "epstein_zin", "beta": 1.5, "psi": 2},
      "ce": {"kind": "quasi_arithmetic", "risk": 2}, "transition": {"probs": [1], "returns": [[1.1]]}}}})");
  CHECK(domain.find("setting.period.aggregator") != std::string::npos);
  const std::string shock = config_error(R"({"shocks": [{"kind": "cs99", "magnitude": 1}]})");
  CHECK(shock.find("shocks[0].kind") != std::string::npos);
}

TEST_CASE("valid configuration is parsed") {
  const Config c = parse_config(R"({
    "setting": {"horizon": 3, "period": {"aggregator": {"family": "cobb_douglas", "beta": 0.8},
      "ce": {"kind": "quasi_arithmetic", "risk": {"kind": "crra", "gamma": 3}},
      "transition": {"probs": [0.5, 0.5], "returns": [[1.0, 1.0], [0.9, 1.2]]}}},
    "grid": {"w_min": 0.1, "w_max": 5, "n": 40, "order": "linear"},
    "shocks": [{"kind": "fosd_returns", "magnitudes": [0.9, 0.8]}]})");
  REQUIRE(c.setting.has_value());
  CHECK(c.setting->horizon() == 3);
  CHECK(c.setting->periods[2].next.portfolios() == 2);
  CHECK(c.grid.grid.n == 40);
  REQUIRE(c.shocks.size() == 1);
  CHECK(c.shocks[0].magnitudes.size() == 2);
}

TEST_CASE("EIS estimate from the reduced form") {
  const auto two = estimate_eis(linear_panel(-0.1), ShifterColumn::Total, 0.1);
  REQUIRE(two.size() == 1);
  REQUIRE(two[0].psi_hat.has_value());
  CHECK(two[0].reduced_form == doctest::Approx(-0.1).epsilon(1e-10));
  CHECK(*two[0].psi_hat == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(two[0].sign_one_minus_psi == -1);
  const auto one = estimate_eis(linear_panel(0.0), ShifterColumn::Total, 0.1);
  CHECK(std::abs(one[0].reduced_form) < 1e-12);
  CHECK(*one[0].psi_hat == doctest::Approx(1.0).epsilon(1e-10));
  const auto unscaled = estimate_eis(linear_panel(0.5), ShifterColumn::Total, std::nullopt, -1);
  CHECK_FALSE(unscaled[0].psi_hat.has_value());
  CHECK(unscaled[0].sign_one_minus_psi == -1);
  CHECK_THROWS(estimate_eis(linear_panel(0.5), ShifterColumn::Total, 0.0));
  CHECK_THROWS(estimate_eis(linear_panel(0.5), ShifterColumn::Idiosyncratic, 1.0));
}

TEST_CASE("synthetic panel") {
  const std::vector<PopulationGroup> groups{{"low", 0.5, 0.9, 2.0, 15}, {"unit", 1.0, 0.9, 2.0, 15}};
  PanelTemplate tmpl;
  tmpl.transition.probs = {0.5, 0.5};
  tmpl.transition.returns = {{1.02, 1.02}, {0.9, 1.25}};
  ShifterDesign design;
  PanelOptions opt;
  const Panel a = synth_panel(groups, tmpl, design, opt, 42);
  opt.workers = 4;
  const Panel b = synth_panel(groups, tmpl, design, opt, 42);
  std::ostringstream sa, sb;
  write_panel_csv(sa, a);
  write_panel_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(a.rows.size() == 30 * 10);
  // Unit EIS: the consumption share does not respond to the shifter.
  double lo = 1.0, hi = 0.0;
  for (const auto& r : a.rows) {
    if (r.group != 1) continue;
    lo = std::min(lo, r.consumption / r.wealth);
    hi = std::max(hi, r.consumption / r.wealth);
  }
  CHECK(hi - lo < 1e-12);
  const auto est = estimate_eis(a, ShifterColumn::Total, 1.0);
  CHECK(*est[0].psi_hat == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(*est[1].psi_hat == doctest::Approx(1.0).epsilon(1e-8));
  const Panel c = synth_panel(groups, tmpl, design, opt, 43);
  std::ostringstream sc;
  write_panel_csv(sc, c);
  CHECK(sc.str() != sa.str());
}

TEST_CASE("worker count from the environment") {
  ::setenv("EISLAB_WORKERS", "3", 1);
  CHECK(workers_from_env() == 3);
  ::setenv("EISLAB_WORKERS", "0", 1);
  CHECK_THROWS_AS(workers_from_env(), ConfigError);
  ::setenv("EISLAB_WORKERS", "two", 1);
  CHECK_THROWS_AS(workers_from_env(), ConfigError);
  ::setenv("EISLAB_WORKERS", "4x", 1);
  CHECK_THROWS_AS(workers_from_env(), ConfigError);
  ::unsetenv("EISLAB_WORKERS");
  CHECK(workers_from_env() >= 1);
}

TEST_CASE("invalid input leaves no outputs") {
  const fs::path d = fresh_dir("bad");
  const fs::path cfg = write_file(d / "bad.json", R"({"figure1": {"beta": 0.5, "psis": [0.5], "rates": [1.0], "oops": 1}})");
  std::ostringstream log, err;
  const int code = run_experiment(ExperimentOptions{"figure1", cfg, d / "out", 0, 1}, log, err);
  CHECK(code == 2);
  CHECK(err.str().find("oops") != std::string::npos);
  CHECK(listing(d / "out").empty());
  // Command that needs a section the configuration lacks.
  const fs::path fig = write_file(d / "fig.json", kFigure);
  CHECK(run_experiment(ExperimentOptions{"solve", fig, d / "out2", 0, 1}, log, err) == 2);
  CHECK(listing(d / "out2").empty());
  fs::remove_all(d);
}

TEST_CASE("outputs are reproducible across reruns and worker counts") {
  const fs::path d = fresh_dir("repro");
  for (const auto& [command, text] : {std::pair{"figure1", kFigure}, std::pair{"identify", kIdentify}}) {
    const fs::path cfg = write_file(d / (std::string(command) + ".json"), text);
    std::ostringstream log, err;
    const fs::path o1 = d / (std::string(command) + "1"), o2 = d / (std::string(command) + "2"),
                   o3 = d / (std::string(command) + "3");
    CHECK(run_experiment(ExperimentOptions{command, cfg, o1, 7, 1}, log, err) == 0);
    CHECK(run_experiment(ExperimentOptions{command, cfg, o2, 7, 1}, log, err) == 0);
    CHECK(run_experiment(ExperimentOptions{command, cfg, o3, 7, 4}, log, err) == 0);
    const auto files = listing(o1);
    CHECK(files.size() >= 2);
    CHECK(files == listing(o2));
    CHECK(files == listing(o3));
    for (const auto& f : files) {
      CAPTURE(f);
      CHECK(slurp(o1 / f) == slurp(o2 / f));
      CHECK(slurp(o1 / f) == slurp(o3 / f));
    }
  }
  fs::remove_all(d);
}

TEST_CASE("command-line front end") {
  const fs::path d = fresh_dir("cli");
  const fs::path cfg = write_file(d / "fig.json", kFigure);
  const std::string bin = EISLAB_BINARY;
  auto run = [&](const std::string& args) {
    const int status = std::system((bin + " " + args + " > " + (d / "log.txt").string() + " 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("figure1 --config " + cfg.string() + " --out " + (d / "ok").string() + " --seed 3") == 0);
  CHECK(fs::exists(d / "ok" / "figure1.csv"));
  CHECK(fs::exists(d / "ok" / "summary.json"));
  CHECK(slurp(d / "log.txt").find("PASS") != std::string::npos);
  CHECK(run("figure1 --out " + (d / "x").string()) != 0);
  CHECK(run("nonsense --config " + cfg.string() + " --out " + (d / "x").string()) != 0);
  CHECK(run("figure1 --config " + (d / "missing.json").string() + " --out " + (d / "x").string()) != 0);
  CHECK_FALSE(fs::exists(d / "x"));
  fs::remove_all(d);
}
