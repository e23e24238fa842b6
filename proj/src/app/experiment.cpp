#include "eislab/app/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "eislab/app/csv.hpp"
#include "eislab/app/panel.hpp"
#include "eislab/core/error.hpp"
#include "eislab/core/validate.hpp"
#include "eislab/numerics/parallel.hpp"
#include "eislab/shocks/verify.hpp"
#include "eislab/solver/backward.hpp"
#include "eislab/solver/homothetic.hpp"
#include "eislab/solver/serialize.hpp"
#include "eislab/statics/random_env.hpp"
#include "eislab/statics/statics.hpp"
#include "eislab/twoperiod/two_period.hpp"

namespace eislab {
namespace {

namespace fs = std::filesystem;

class Run {
 public:
  Run(const Config& cfg, fs::path dir, std::uint64_t seed, std::size_t workers)
      : cfg_(cfg), dir_(std::move(dir)), seed_(seed), workers_(std::max<std::size_t>(1, workers)) {}

  ExperimentResult& result() { return res_; }

  void two_period();
  void figure1();
  void solve();
  void statics();
  void shock();
  void identify();

 private:
  std::ofstream open(const std::string& name) {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw Error("cannot write " + (dir_ / name).string());
    res_.files.push_back(name);
    return os;
  }
  void check(std::string name, bool passed, std::string detail) {
    res_.assertions.push_back({std::move(name), passed, std::move(detail)});
  }
  const Setting& setting(const char* command) const {
    if (!cfg_.setting) throw ConfigError(cfg_.source.string() + ": the " + std::string(command) + " command needs a setting section");
    return *cfg_.setting;
  }
  SolveOptions solve_options() const {
    SolveOptions o;
    o.income = cfg_.grid.income;
    o.permanent_nodes = cfg_.grid.permanent_nodes;
    o.workers = workers_;
    return o;
  }
  Solution solve_on(const Setting& s, const GridPlan& plan) const {
    if (cfg_.cache) return solve_cached(s, plan, solve_options(), dir_.parent_path() / "cache");
    return solve_backward(s, plan, solve_options());
  }
  void setting_statics();
  void remv();

  const Config& cfg_;
  fs::path dir_;
  std::uint64_t seed_;
  std::size_t workers_;
  ExperimentResult res_;
};

std::string fmt(double x) { return format_double(x); }

// Compact number for assertion names.
std::string label(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

std::string shock_label(const Shock& s) {
  std::ostringstream os;
  os << "cs" << shock_number(s.kind) << "_" << shock_name(s.kind) << "_m" << s.magnitude;
  return os.str();
}

void Run::two_period() {
  TwoPeriodConfig c = cfg_.two_period.value_or(TwoPeriodConfig{{}, 500, 1e-8});
  std::mt19937_64 rng(seed_);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < c.random; ++i) {
    TwoPeriodProblem p;
    const double beta = 0.3 + 0.65 * u(rng);
    const double psi = std::exp(std::log(0.2) + (std::log(5.0) - std::log(0.2)) * u(rng));
    p.aggregator = Aggregator::epstein_zin(beta, psi);
    p.e1 = 0.5 + 1.5 * u(rng);
    p.e2 = u(rng);
    p.rf = 0.8 + 0.8 * u(rng);
    p.rho = 0.5 + u(rng);
    c.problems.push_back(p);
  }

  struct Row {
    TwoPeriodSolution closed, numeric;
    double rel = 0.0;
    bool has_signs = false;
    TwoPeriodSigns signs;
    bool knife_rf = false;
  };
  std::vector<Row> rows(c.problems.size());
  parallel_for(rows.size(), workers_, [&](std::size_t i) {
    Row& r = rows[i];
    r.closed = solve_two_period(c.problems[i]);
    r.numeric = solve_two_period_numeric(c.problems[i]);
    r.rel = std::abs(r.closed.c1 - r.numeric.c1) / r.closed.c1;
    try {
      r.signs = two_period_signs(c.problems[i]);
      r.has_signs = true;
      r.knife_rf = std::abs(1.0 - r.signs.epsilon * r.signs.psi) <= kKnifeEdge;
    } catch (const PreconditionError&) {
      r.has_signs = false;  // no saving: epsilon undefined
    }
  });

  auto os = open("two_period.csv");
  CsvWriter w(os, {"beta", "psi", "e1", "e2", "rf", "rho", "c1", "c2", "c1_numeric", "rel_error", "epsilon", "dc_drho",
                   "dc_drho_fd", "dc_drf", "dc_drf_fd", "sign_rho", "sign_rf", "rho_agrees", "rf_agrees"});
  double worst = 0.0;
  std::size_t rho_bad = 0, rf_bad = 0, rf_checked = 0, rho_checked = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& p = c.problems[i];
    const auto& r = rows[i];
    worst = std::max(worst, r.rel);
    const double nan = std::nan("");
    const TwoPeriodSigns& s = r.signs;
    if (r.has_signs) {
      if (s.dc_drho_sign != 0) {
        ++rho_checked;
        if (!s.rho_agrees) ++rho_bad;
      }
      if (!r.knife_rf && s.dc_drf_sign != 0) {
        ++rf_checked;
        if (!s.rf_agrees) ++rf_bad;
      }
    }
    w.row({p.aggregator.beta(), p.aggregator.psi(), p.e1, p.e2, p.rf, p.rho, r.closed.c1, r.closed.c2, r.numeric.c1,
           r.rel, r.has_signs ? s.epsilon : nan, r.has_signs ? s.dc_drho : nan, r.has_signs ? s.dc_drho_fd : nan,
           r.has_signs ? s.dc_drf : nan, r.has_signs ? s.dc_drf_fd : nan, r.has_signs ? s.dc_drho_sign : 0,
           r.has_signs ? s.dc_drf_sign : 0, static_cast<int>(!r.has_signs || s.rho_agrees),
           static_cast<int>(!r.has_signs || s.rf_agrees)});
  }
  check("closed_form_matches_numeric_argmax", worst <= c.tolerance,
        "max relative c1 difference " + fmt(worst) + " over " + std::to_string(rows.size()) + " problems");
  check("rho_response_sign", rho_bad == 0,
        std::to_string(rho_checked - rho_bad) + "/" + std::to_string(rho_checked) + " signs agree");
  check("rf_response_sign", rf_bad == 0,
        std::to_string(rf_checked - rf_bad) + "/" + std::to_string(rf_checked) + " signs agree (knife-edge excluded)");
}

void Run::figure1() {
  const Figure1Config c = cfg_.figure1.value_or(Figure1Config{});
  const Figure1Data d = figure1_data(c.beta, c.psis, c.rates, c.resolution, c.e1, c.e2);
  {
    auto os = open("figure1.csv");
    CsvWriter w(os, {"panel", "curve_id", "c1", "c2"});
    for (const auto& r : d.rows) w.row({r.panel, r.curve, r.c1, r.c2});
  }
  // One file per panel, in the order of the configured psis.
  std::vector<std::string> panels;
  for (const auto& r : d.rows) {
    if (std::find(panels.begin(), panels.end(), r.panel) == panels.end()) panels.push_back(r.panel);
  }
  for (std::size_t k = 0; k < panels.size(); ++k) {
    auto os = open("figure1_panel" + std::to_string(k + 1) + ".csv");
    CsvWriter w(os, {"panel", "curve_id", "c1", "c2"});
    for (const auto& r : d.rows) {
      if (r.panel == panels[k]) w.row({r.panel, r.curve, r.c1, r.c2});
    }
  }
  auto os = open("figure1_optima.csv");
  CsvWriter w(os, {"psi", "rf", "c1", "c2"});
  for (const auto& o : d.optima) w.row({o.psi, o.rf, o.c1, o.c2});

  // Shape of the optimal-consumption response to rf (stated for e2 = 0, where epsilon = 1).
  if (c.e2 != 0.0) return;
  std::vector<double> sorted_rates = c.rates;
  std::sort(sorted_rates.begin(), sorted_rates.end());
  for (double psi : c.psis) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& o : d.optima) {
      if (o.psi == psi) pts.emplace_back(o.rf, o.c1);
    }
    std::sort(pts.begin(), pts.end());
    double lo = INFINITY, hi = -INFINITY;
    bool inc = true, dec = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      lo = std::min(lo, pts[i].second);
      hi = std::max(hi, pts[i].second);
      if (i > 0) {
        inc = inc && pts[i].second > pts[i - 1].second;
        dec = dec && pts[i].second < pts[i - 1].second;
      }
    }
    const std::string name = "figure1_psi=" + label(psi);
    if (std::abs(psi - 1.0) < 1e-10) {
      check(name + "_c1_constant", hi - lo < 1e-10, "c1 spread " + fmt(hi - lo));
    } else if (psi < 1.0) {
      check(name + "_c1_increasing_in_rf", inc, "c1 from " + fmt(pts.front().second) + " to " + fmt(pts.back().second));
    } else {
      check(name + "_c1_decreasing_in_rf", dec, "c1 from " + fmt(pts.front().second) + " to " + fmt(pts.back().second));
    }
  }
}

void Run::solve() {
  const Setting& s = setting("solve");
  {
    const RegularityReport rep = validate_setting(s);
    auto os = open("regularity.csv");
    CsvWriter w(os, {"check", "passed", "severity", "detail"});
    for (const auto& c : rep.checks) {
      w.row({c.name, static_cast<int>(c.passed), std::string(c.severity == Severity::Error ? "error" : "warning"),
             c.detail});
    }
    check("strongly_regular", true, rep.strongly_regular ? "all regularity checks pass" : "see regularity.csv");
  }
  const GridPlan plan = plan_grids({&s}, cfg_.grid.grid, cfg_.grid.income, cfg_.grid.permanent_nodes);
  const Solution sol = solve_on(s, plan);
  {
    auto os = open("solution.csv");
    write_solution_csv(os, sol);
  }
  bool finite = true;
  for (std::size_t t = 0; t < sol.horizon(); ++t) {
    for (const auto& row : sol.tables(t).value) {
      for (double v : row.values()) finite = finite && std::isfinite(v) && v >= 0.0;
    }
  }
  check("values_finite_nonnegative", finite, "V_t at every node");

  std::string why;
  if (!homothetic_setting(s, &why)) return;
  const Solution hom = solve_homothetic(s);
  auto os = open("homothetic.csv");
  CsvWriter w(os, {"t", "b", "g", "share", "theta", "b_grid_max_rel_error", "share_grid_max_rel_error"});
  double worst_b = 0.0, worst_share = 0.0;
  for (std::size_t t = 0; t < sol.horizon(); ++t) {
    const PeriodTables& tab = sol.tables(t);
    const auto& x = tab.value[0].nodes();
    double eb = 0.0, es = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      eb = std::max(eb, std::abs(tab.value[0].values()[j] / x[j] - hom.b()[t]) / hom.b()[t]);
      es = std::max(es, std::abs(tab.consumption[0][j] / x[j] - hom.share()[t]) / hom.share()[t]);
    }
    worst_b = std::max(worst_b, eb);
    worst_share = std::max(worst_share, es);
    w.row({t, hom.b()[t], hom.g()[t], hom.share()[t], hom.homothetic_portfolio()[t], eb, es});
  }
  check("homothetic_recursion_matches_grid", worst_b <= 1e-4 && worst_share <= 1e-4,
        "max relative error: values " + fmt(worst_b) + ", shares " + fmt(worst_share));
}

void Run::statics() {
  const StaticsConfig c = cfg_.statics.value_or(StaticsConfig{});
  std::mt19937_64 rng(seed_);

  // Sign-rule suite: environments are drawn sequentially, evaluated in parallel.
  std::vector<RandomEnvironment> envs;
  for (std::size_t i = 0; i < c.environments; ++i) envs.push_back(random_environment(rng, c.random));
  std::vector<ResponseReport> reps(envs.size());
  std::vector<double> remv(envs.size(), std::nan(""));
  parallel_for(envs.size(), workers_, [&](std::size_t i) {
    reps[i] = consumption_response(envs[i].env, envs[i].w, envs[i].alpha);
    if (envs[i].homothetic) remv[i] = compute_remv(envs[i].env, envs[i].w, envs[i].alpha);
  });
  {
    auto os = open("responses.csv");
    CsvWriter w(os, {"w", "alpha", "psi", "eps", "c_alpha", "c_alpha_fd", "sign_pred", "sign_obs", "concave_flag",
                     "residual", "knife_edge", "asserted", "homothetic"});
    for (std::size_t i = 0; i < reps.size(); ++i) {
      const auto& r = reps[i];
      w.row({r.w, r.alpha, r.psi, r.eps, r.c_alpha, r.c_alpha_fd, r.sign_pred, r.sign_obs, static_cast<int>(r.concave),
             r.residual, static_cast<int>(r.knife_edge), static_cast<int>(r.asserted),
             static_cast<int>(envs[i].homothetic)});
    }
  }
  std::size_t asserted = 0, agree = 0;
  double worst_res = 0.0, worst_remv = 0.0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (reps[i].asserted) {
      ++asserted;
      if (reps[i].agrees) ++agree;
      worst_res = std::max(worst_res, std::abs(reps[i].residual));
    }
    if (envs[i].homothetic) worst_remv = std::max(worst_remv, std::abs(remv[i] - 1.0));
  }
  if (c.environments > 0) {
    check("sign_rule_agreement", agree == asserted,
          std::to_string(agree) + "/" + std::to_string(asserted) + " asserted signs agree (" +
              fmt(asserted ? 100.0 * static_cast<double>(agree) / static_cast<double>(asserted) : 100.0) + "%)");
    check("response_identity_residual", worst_res <= 1e-6, "max |LHS - RHS| " + fmt(worst_res));
    check("homothetic_remv_is_one", worst_remv <= 1e-6, "max |REMV - 1| " + fmt(worst_remv));
  }

  // Monotonicity certificates with the brute-force argmax cross-check.
  std::vector<RandomEnvironment> cenvs;
  for (std::size_t i = 0; i < c.certificates; ++i) cenvs.push_back(random_environment(rng, c.random));
  std::vector<Certificate> certs(cenvs.size());
  parallel_for(cenvs.size(), workers_, [&](std::size_t i) {
    const double w = cenvs[i].w;
    certs[i] = monotone_condition(cenvs[i].env, Box{0.5 * w, 2.0 * w}, Box{cenvs[i].env.alpha_lo, cenvs[i].env.alpha_hi},
                                  c.certificate);
  });
  if (c.certificates == 0) return;
  auto os = open("certificates.csv");
  CsvWriter w(os, {"environment", "homothetic", "psi", "verdict", "min_lhs", "max_lhs", "margin", "min_simplified",
                   "max_simplified", "comparisons", "violations", "outside_box"});
  std::size_t certified = 0, bad = 0;
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const Certificate& k = certs[i];
    w.row({i, static_cast<int>(k.homothetic), cenvs[i].psi, k.verdict_name(), k.min_lhs, k.max_lhs, k.margin,
           k.min_simplified, k.max_simplified, k.comparisons, k.violations, k.outside_box});
    if (k.verdict != Certificate::Verdict::Mixed && k.margin >= c.certificate_margin) {
      ++certified;
      if (k.violations > 0) ++bad;
    }
  }
  check("monotonicity_certificate_sound", bad == 0 && certified > 0,
        std::to_string(certified) + " environments certified with margin >= " + fmt(c.certificate_margin) + ", " +
            std::to_string(bad) + " with brute-force violations");

  if (cfg_.setting && !cfg_.shocks.empty() && !c.wealth.empty()) setting_statics();
}

// Responses along shock paths of the configured setting.
void Run::setting_statics() {
  const StaticsConfig c = *cfg_.statics;
  const Setting& base = *cfg_.setting;
  auto os = open("setting_responses.csv");
  CsvWriter w(os, {"shock", "w", "alpha", "psi", "eps", "c_alpha", "c_alpha_fd", "sign_pred", "sign_obs",
                   "concave_flag", "smooth", "asserted", "delta_c_integral", "delta_c_direct"});
  std::size_t asserted = 0, agree = 0, discrete_bad = 0, discrete_n = 0;
  for (const auto& spec : cfg_.shocks) {
    for (double m : spec.magnitudes) {
      Shock sh = spec.shock;
      sh.magnitude = m;
      ShockPath path{apply_shock(base, sh), base, 0.0, 1.0};
      const GridPlan plan =
          plan_grids({&path.at_alpha0, &path.at_alpha1}, cfg_.grid.grid, cfg_.grid.income, cfg_.grid.permanent_nodes);
      auto z = std::make_shared<const Solution>(solve_on(path.at_alpha0, plan));
      auto b = std::make_shared<const Solution>(solve_on(path.at_alpha1, plan));
      const double p = b->initial_permanent();
      const Environment env = path_environment(z, b, path, c.period, p);
      for (double wealth : c.wealth) {
        const ResponseReport r = consumption_response(env, wealth, c.alpha);
        double integral = std::nan(""), direct = std::nan("");
        try {
          const DiscreteResponse d = discrete_response(env, wealth, 0.0, 1.0);
          integral = d.integral;
          direct = d.direct;
          ++discrete_n;
          if (!d.agrees) ++discrete_bad;
        } catch (const PreconditionError&) {
          // kink on the path: the integral form does not apply
        }
        if (r.asserted) {
          ++asserted;
          if (r.agrees) ++agree;
        }
        w.row({shock_label(sh), wealth, r.alpha, r.psi, r.eps, r.c_alpha, r.c_alpha_fd, r.sign_pred, r.sign_obs,
               static_cast<int>(r.concave), static_cast<int>(r.smooth), static_cast<int>(r.asserted), integral,
               direct});
      }
    }
  }
  check("setting_response_signs", agree == asserted,
        std::to_string(agree) + "/" + std::to_string(asserted) + " asserted signs agree");
  check("setting_discrete_changes", discrete_bad == 0,
        std::to_string(discrete_n - discrete_bad) + "/" + std::to_string(discrete_n) +
            " integrated responses match direct re-solves");
}

void Run::shock() {
  const Setting& base = setting("shock");
  if (cfg_.shocks.empty() && !cfg_.remv) {
    throw ConfigError(cfg_.source.string() + ": the shock command needs a shocks or remv section");
  }
  std::string why;
  const bool hom = homothetic_setting(base, &why);
  std::optional<Solution> hom_base;
  if (hom) hom_base = solve_homothetic(base);

  struct Item {
    Shock shock;
    DropReport drop;
    bool hom_applicable = false;
    double g_base = 0.0, g_shocked = 0.0, delta_c = 0.0;
  };
  std::vector<Item> items;
  for (const auto& spec : cfg_.shocks) {
    for (double m : spec.magnitudes) {
      Item it;
      it.shock = spec.shock;
      it.shock.magnitude = m;
      items.push_back(it);
    }
  }
  for (auto& it : items) {
    const Setting shocked = apply_shock(base, it.shock);
    it.drop = verify_continuation_drop(base, shocked, cfg_.grid.grid, needs_concavity(it.shock.kind), solve_options());
    if (hom && homothetic_setting(shocked)) {
      const Solution z = solve_homothetic(shocked);
      it.g_base = hom_base->g()[0];
      it.g_shocked = z.g()[0];
      // Path runs from the shocked endpoint (alpha = 0) to the baseline (alpha = 1).
      it.delta_c = hom_base->share()[0] - z.share()[0];
      it.hom_applicable = true;
    }
  }

  if (!items.empty()) {
    auto os = open("shocks.csv");
    CsvWriter w(os, {"shock", "kind", "name", "magnitude", "nodes", "violations", "worst_excess", "worst_t",
                     "worst_s", "concavity_required", "concave", "downgraded", "passed"});
    for (const auto& it : items) {
      const DropReport& d = it.drop;
      w.row({shock_label(it.shock), shock_number(it.shock.kind), shock_name(it.shock.kind), it.shock.magnitude,
             d.nodes, d.violations, d.worst_excess, d.worst_period, d.worst_savings,
             static_cast<int>(d.concavity_required), static_cast<int>(d.concave), static_cast<int>(d.downgraded),
             static_cast<int>(d.passed)});
      std::string detail = std::to_string(d.nodes) + " nodes, worst excess " + fmt(d.worst_excess);
      for (const auto& warn : d.warnings) detail += "; " + warn;
      check(shock_label(it.shock) + "_continuation_drop", d.passed, detail);
    }
  }

  if (hom && !items.empty()) {
    auto os = open("shock_consumption.csv");
    CsvWriter w(os, {"shock", "psi", "g_base", "g_shocked", "delta_c_per_wealth", "predicted_sign", "observed_sign"});
    const double psi = base.periods[0].aggregator.psi();
    const bool builtin = base.periods[0].aggregator.family() != AggregatorFamily::Custom;
    for (const auto& it : items) {
      if (!it.hom_applicable) continue;
      const double dg = it.g_base - it.g_shocked;
      const int pred = std::abs(1.0 - psi) <= kKnifeEdge ? 0 : sign_of(1.0 - psi) * sign_of(dg);
      const int obs = std::abs(it.delta_c) <= 1e-8 ? 0 : sign_of(it.delta_c);
      w.row({shock_label(it.shock), psi, it.g_base, it.g_shocked, it.delta_c, pred, obs});
      if (!builtin) continue;
      const std::string name = shock_label(it.shock) + "_consumption_sign";
      if (std::abs(1.0 - psi) <= kKnifeEdge) {
        check(name, std::abs(it.delta_c) <= 1e-8, "psi = 1: delta c " + fmt(it.delta_c));
      } else if (dg > 1e-12 * it.g_base) {
        check(name, obs == pred, "delta c " + fmt(it.delta_c) + ", predicted sign " + std::to_string(pred));
      }
    }
  }
  if (cfg_.remv) remv();
}

void Run::remv() {
  const RemvConfig& rc = *cfg_.remv;
  const Setting& s = setting("shock");
  if (!s.income) throw ConfigError(cfg_.source.string() + ": remv needs a setting with an income block");
  const Setting shocked = apply_shock(s, rc.shock);
  std::optional<Solution> b, z;
  auto os = open("remv.csv");
  CsvWriter w(os, {"savings", "permanent", "eps_direct", "eps_formula", "difference", "agrees"});
  std::size_t n = 0, bad = 0;
  bool zero_exact = true;
  std::vector<std::vector<CsvWriter::Field>> limit_rows;
  for (double sv : rc.savings) {
    for (double p : rc.permanent) {
      RemvCheck r;
      if (p == 0.0) {
        r = income_remv_check(s, rc.shock, sv, 0.0, cfg_.grid.grid, rc.period);
        zero_exact = zero_exact && r.eps_direct == 1.0 && r.eps_formula == 1.0;
      } else {
        if (!b) {
          SolveOptions opt = solve_options();
          opt.income = IncomeMode::Reduced;
          const GridPlan plan = plan_grids({&s, &shocked}, cfg_.grid.grid, IncomeMode::Reduced);
          b = solve_backward(s, plan, opt);
          z = solve_backward(shocked, plan, opt);
        }
        r = income_remv_check(*b, *z, rc.period, sv, p);
      }
      ++n;
      if (!r.agrees) ++bad;
      w.row({sv, p, r.eps_direct, r.eps_formula, r.eps_direct - r.eps_formula, static_cast<int>(r.agrees)});
      for (const auto& [ratio, eps] : r.limit) limit_rows.push_back({sv, p, ratio, eps});
    }
  }
  {
    auto los = open("remv_limit.csv");
    CsvWriter lw(los, {"savings", "permanent", "p_over_s", "eps_formula"});
    for (const auto& r : limit_rows) lw.row(r);
  }
  check("income_remv_formula", bad == 0, std::to_string(n - bad) + "/" + std::to_string(n) + " points agree to 1e-5");
  check("income_remv_at_zero_income", zero_exact, "both expressions equal 1 at p = 0");
}

void Run::identify() {
  if (!cfg_.identify) throw ConfigError(cfg_.source.string() + ": the identify command needs an identify section");
  const IdentifyConfig& c = *cfg_.identify;
  auto est_os = open("estimates.csv");
  CsvWriter ew(est_os, {"noise_sd", "group", "psi", "observations", "reduced_form", "psi_hat", "relative_error",
                        "sign_one_minus_psi"});
  for (std::size_t k = 0; k < c.noise.size(); ++k) {
    const double sd = c.noise[k];
    PanelOptions opt = c.options;
    opt.noise_sd = sd;
    opt.workers = workers_;
    const Panel panel = synth_panel(c.groups, c.panel_template, c.design, opt, seed_);
    {
      auto os = open("panel_noise" + std::to_string(k) + ".csv");
      write_panel_csv(os, panel);
    }
    const auto est = estimate_eis(panel, c.column, c.first_stage, c.first_stage_sign);
    // Point tolerance widens with the noise level.
    const double tol = sd == 0.0 ? 0.01 : sd <= 1e-3 ? 0.02 : sd <= 1e-2 ? 0.05 : INFINITY;
    std::size_t within = 0, sign_ok = 0, sign_n = 0;
    double worst = 0.0;
    for (std::size_t g = 0; g < est.size(); ++g) {
      const double psi = c.groups[g].psi;
      const double rel = est[g].psi_hat ? std::abs(*est[g].psi_hat - psi) / psi : std::nan("");
      ew.row({sd, est[g].label, psi, est[g].observations, est[g].reduced_form,
              est[g].psi_hat ? *est[g].psi_hat : std::nan(""), rel, est[g].sign_one_minus_psi});
      if (est[g].psi_hat) {
        worst = std::max(worst, rel);
        if (rel <= tol) ++within;
      }
      if (std::abs(psi - 1.0) >= c.sign_threshold) {
        ++sign_n;
        if (est[g].sign_one_minus_psi == sign_of(1.0 - psi)) ++sign_ok;
      }
    }
    const std::string lvl = "noise_sd=" + label(sd);
    if (c.first_stage && std::isfinite(tol)) {
      check("identify_point_" + lvl, within == est.size(),
            "max relative error " + fmt(worst) + " (tolerance " + label(tol) + ")");
    }
    if (sd == c.sign_noise || (k + 1 == c.noise.size() && !c.first_stage)) {
      check("identify_sign_" + lvl, sign_ok == sign_n,
            std::to_string(sign_ok) + "/" + std::to_string(sign_n) + " groups with |psi - 1| >= " +
                label(c.sign_threshold) + " signed correctly");
    }
  }
}

std::string summary_json(const ExperimentResult& r, const Config& cfg, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  j["config"] = cfg.source.filename().string();
  j["seed"] = seed;
  j["passed"] = r.passed();
  j["assertions"] = nlohmann::ordered_json::array();
  for (const auto& a : r.assertions) {
    j["assertions"].push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  }
  j["files"] = r.files;
  return j.dump(2) + "\n";
}

}  // namespace

bool ExperimentResult::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

std::size_t workers_from_env() {
  const char* v = std::getenv("EISLAB_WORKERS");
  if (!v || !*v) return std::max(1u, std::thread::hardware_concurrency());
  char* end = nullptr;
  const long long n = std::strtoll(v, &end, 10);
  if (*end != '\0' || n <= 0) throw ConfigError(std::string("EISLAB_WORKERS must be a positive integer, got '") + v + "'");
  return static_cast<std::size_t>(n);
}

ExperimentResult run_command(const std::string& command, const Config& cfg, const fs::path& dir, std::uint64_t seed,
                             std::size_t workers) {
  Run run(cfg, dir, seed, workers);
  run.result().command = command;
  if (command == "two-period") {
    run.two_period();
  } else if (command == "figure1") {
    run.figure1();
  } else if (command == "solve") {
    run.solve();
  } else if (command == "statics") {
    run.statics();
  } else if (command == "shock") {
    run.shock();
  } else if (command == "identify") {
    run.identify();
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return run.result();
}

int run_experiment(const ExperimentOptions& opt, std::ostream& log, std::ostream& err) {
  fs::path staging;
  try {
    const Config cfg = load_config(opt.config);
    fs::create_directories(opt.out);
    std::random_device rd;
    staging = opt.out / (".staging-" + std::to_string(rd()));
    fs::create_directories(staging);
    ExperimentResult res = run_command(opt.command, cfg, staging, opt.seed, opt.workers);
    {
      std::ofstream os(staging / "summary.json", std::ios::binary);
      os << summary_json(res, cfg, opt.seed);
      if (!os) throw Error("cannot write summary.json");
    }
    res.files.push_back("summary.json");
    for (const auto& f : res.files) fs::rename(staging / f, opt.out / f);
    fs::remove_all(staging);
    for (const auto& a : res.assertions) log << (a.passed ? "PASS " : "FAIL ") << a.name << ": " << a.detail << "\n";
    log << (res.passed() ? "all assertions passed" : "some assertions failed") << "\n";
    return res.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    if (!staging.empty()) {
      std::error_code ec;
      fs::remove_all(staging, ec);
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace eislab
