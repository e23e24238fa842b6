#include "eislab/app/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

#include "eislab/core/error.hpp"
#include "eislab/core/quadrature.hpp"
#include "eislab/shocks/entrepreneur.hpp"

namespace eislab {
namespace {

using json = nlohmann::json;

// A JSON value together with its path, for error messages.
class Field {
 public:
  Field(const json& j, std::string path, const std::string* source) : j_(j), path_(std::move(path)), source_(source) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(*source_ + ": field '" + (path_.empty() ? "<root>" : path_) + "': " + msg);
  }

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }

  Field at(const char* key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) Field(j_, join(key), source_).fail("missing required field");
    return Field(j_.at(key), join(key), source_);
  }

  Field at(std::size_t i) const { return Field(j_.at(i), path_ + "[" + std::to_string(i) + "]", source_); }

  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  // Rejects keys outside `allowed`, which catches misspelled fields.
  void allow(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!ok.count(it.key())) Field(it.value(), join(it.key().c_str()), source_).fail("unknown field");
    }
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  double number(const char* key, double def) const { return has(key) ? at(key).number() : def; }

  std::size_t count() const {
    if (!j_.is_number_integer() && !j_.is_number_unsigned()) fail("expected a nonnegative integer");
    const long long v = j_.get<long long>();
    if (v < 0) fail("expected a nonnegative integer");
    return static_cast<std::size_t>(v);
  }
  std::size_t count(const char* key, std::size_t def) const { return has(key) ? at(key).count() : def; }

  std::string text() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  std::string text(const char* key, const std::string& def) const { return has(key) ? at(key).text() : def; }

  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }
  bool boolean(const char* key, bool def) const { return has(key) ? at(key).boolean() : def; }

  std::vector<double> numbers() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
    return out;
  }
  std::vector<double> numbers(const char* key, std::vector<double> def) const {
    return has(key) ? at(key).numbers() : def;
  }

  std::vector<std::vector<double>> matrix() const {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).numbers());
    return out;
  }

  // Runs a library constructor and reports its precondition failures at this field.
  template <class F>
  auto guard(F&& f) const -> decltype(f()) {
    try {
      return f();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      fail(e.what());
    }
  }

 private:
  std::string join(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }

  const json& j_;
  std::string path_;
  const std::string* source_;
};

Curvature parse_curvature(const Field& f) {
  if (f.raw().is_number()) return f.guard([&] { return Curvature::crra(f.number()); });
  f.allow({"kind", "gamma", "a"});
  const std::string kind = f.text("kind", "crra");
  if (kind == "crra") {
    const double g = f.at("gamma").number();
    return f.guard([&] { return Curvature::crra(g); });
  }
  if (kind == "cara") {
    const double a = f.at("a").number();
    return f.guard([&] { return Curvature::cara(a); });
  }
  f.at("kind").fail("unknown curvature '" + kind + "' (expected crra or cara)");
}

CertaintyEquivalent parse_ce(const Field& f) {
  f.allow({"kind", "risk", "ambiguity", "mu", "priors"});
  const std::string kind = f.text("kind", "quasi_arithmetic");
  const Curvature risk = f.has("risk") ? parse_curvature(f.at("risk")) : Curvature::crra(1.0);
  if (kind == "quasi_arithmetic") return CertaintyEquivalent::quasi_arithmetic(risk);
  if (kind == "smooth_ambiguity") {
    const Curvature amb = parse_curvature(f.at("ambiguity"));
    auto mu = f.at("mu").numbers();
    auto priors = f.at("priors").matrix();
    return f.guard([&] { return CertaintyEquivalent::smooth_ambiguity(risk, amb, mu, priors); });
  }
  if (kind == "multi_prior") {
    auto priors = f.at("priors").matrix();
    return f.guard([&] { return CertaintyEquivalent::multi_prior(risk, priors); });
  }
  f.at("kind").fail("unknown certainty equivalent '" + kind +
                    "' (expected quasi_arithmetic, smooth_ambiguity or multi_prior)");
}

Aggregator parse_aggregator(const Field& f) {
  f.allow({"family", "beta", "psi"});
  const std::string fam = f.text("family", "epstein_zin");
  const double beta = f.at("beta").number();
  if (fam == "epstein_zin") {
    const double psi = f.at("psi").number();
    return f.guard([&] { return Aggregator::epstein_zin(beta, psi); });
  }
  if (fam == "cobb_douglas") return f.guard([&] { return Aggregator::cobb_douglas(beta); });
  f.at("family").fail("unknown aggregator family '" + fam + "' (expected epstein_zin or cobb_douglas)");
}

EntrepreneurBlock parse_entrepreneur(const Field& f) {
  f.allow({"capital_share", "capital_price", "leverage_cap", "capital_grid", "leverage_grid", "productivity", "wage",
           "depreciation", "capital_price_next", "debt_rate", "tax", "financial_returns"});
  EntrepreneurBlock e;
  const double a = f.at("capital_share").number();
  e.technology = f.guard([&] { return std::make_shared<const CobbDouglasTechnology>(a); });
  e.capital_price = f.number("capital_price", 1.0);
  e.leverage_cap = f.number("leverage_cap", 0.5);
  e.capital_grid = f.at("capital_grid").numbers();
  e.leverage_grid = f.numbers("leverage_grid", {0.0});
  e.productivity = f.at("productivity").numbers();
  e.wage = f.at("wage").numbers();
  e.depreciation = f.at("depreciation").numbers();
  e.capital_price_next = f.at("capital_price_next").numbers();
  e.debt_rate = f.at("debt_rate").numbers();
  e.tax = f.at("tax").numbers();
  e.financial_returns = f.at("financial_returns").matrix();
  return e;
}

// Portfolios of a risk-free asset and one log-normal risky asset, discretized
// by Gauss-Hermite quadrature: R(theta) = (1 - theta) rf + theta e^X.
void parse_portfolio(const Field& f, Transition& tr) {
  f.allow({"risk_free", "mu", "sigma", "nodes", "shares"});
  const double rf = f.at("risk_free").number();
  const double mu = f.at("mu").number();
  const double sigma = f.at("sigma").number();
  const std::size_t n = f.count("nodes", 5);
  const auto shares = f.at("shares").numbers();
  const DiscreteDistribution d = f.guard([&] { return lognormal_nodes(mu, sigma, n); });
  tr.probs = d.probs;
  for (double th : shares) {
    if (th < 0.0 || th > 1.0) f.at("shares").fail("portfolio shares must lie in [0, 1]");
    std::vector<double> r;
    for (double x : d.values) r.push_back((1.0 - th) * rf + th * x);
    tr.returns.push_back(std::move(r));
  }
}

Transition parse_transition(const Field& f) {
  f.allow({"probs", "returns", "portfolio", "income", "entrepreneur"});
  Transition tr;
  if (f.has("portfolio")) {
    if (f.has("returns") || f.has("probs")) f.fail("give either portfolio or probs/returns");
    parse_portfolio(f.at("portfolio"), tr);
  } else {
    tr.probs = f.at("probs").numbers();
    if (f.has("returns")) tr.returns = f.at("returns").matrix();
  }
  if (f.has("income")) {
    const Field inc = f.at("income");
    inc.allow({"transitory", "permanent"});
    IncomeShocks s;
    s.transitory = inc.numbers("transitory", std::vector<double>(tr.probs.size(), 1.0));
    s.permanent = inc.numbers("permanent", std::vector<double>(tr.probs.size(), 1.0));
    tr.income = s;
  }
  if (f.has("entrepreneur")) {
    tr.entrepreneur = parse_entrepreneur(f.at("entrepreneur"));
  } else if (tr.returns.empty()) {
    f.at("returns").fail("missing required field");
  }
  return tr;
}

Period parse_period(const Field& f) {
  f.allow({"aggregator", "ce", "transition"});
  return Period{parse_aggregator(f.at("aggregator")),
                f.has("ce") ? parse_ce(f.at("ce")) : CertaintyEquivalent::quasi_arithmetic(Curvature::crra(1.0)),
                parse_transition(f.at("transition"))};
}

Setting parse_setting(const Field& f) {
  f.allow({"horizon", "period", "periods", "terminal", "income"});
  Setting s;
  if (f.has("periods")) {
    if (f.has("period") || f.has("horizon")) f.fail("give either periods or horizon/period");
    const Field ps = f.at("periods");
    for (std::size_t i = 0; i < ps.size(); ++i) s.periods.push_back(parse_period(ps.at(i)));
  } else {
    const std::size_t T = f.at("horizon").count();
    const Period p = parse_period(f.at("period"));
    s.periods.assign(T, p);
  }
  if (s.periods.empty()) f.fail("the horizon must be at least one period");
  if (f.has("terminal")) {
    const Field t = f.at("terminal");
    t.allow({"coef", "intercept"});
    if (t.has("coef")) {
      s.terminal.coef = t.at("coef").raw().is_number() ? std::vector<double>{t.at("coef").number()}
                                                       : t.at("coef").numbers();
    }
    s.terminal.intercept = t.number("intercept", 0.0);
  }
  if (f.has("income")) {
    const Field inc = f.at("income");
    inc.allow({"initial_permanent", "borrowing_constraint"});
    IncomeBlock b;
    b.initial_permanent = inc.number("initial_permanent", 1.0);
    b.borrowing_constraint = inc.boolean("borrowing_constraint", true);
    s.income = b;
  }
  f.guard([&] {
    reduce_entrepreneur_blocks(s);
    check_setting(s);
    return 0;
  });
  return s;
}

GridConfig parse_grid(const Field& f) {
  f.allow({"w_min", "w_max", "n", "order", "income_mode", "permanent_nodes"});
  GridConfig g;
  g.grid.w_min = f.number("w_min", g.grid.w_min);
  g.grid.w_max = f.number("w_max", g.grid.w_max);
  g.grid.n = f.count("n", g.grid.n);
  const std::string order = f.text("order", "monotone_cubic");
  if (order == "monotone_cubic") {
    g.grid.order = Interpolation::MonotoneCubic;
  } else if (order == "linear") {
    g.grid.order = Interpolation::Linear;
  } else {
    f.at("order").fail("expected monotone_cubic or linear");
  }
  const std::string mode = f.text("income_mode", "auto");
  if (mode == "auto") {
    g.income = IncomeMode::Auto;
  } else if (mode == "reduced") {
    g.income = IncomeMode::Reduced;
  } else if (mode == "full") {
    g.income = IncomeMode::Full;
  } else {
    f.at("income_mode").fail("expected auto, reduced or full");
  }
  g.permanent_nodes = f.count("permanent_nodes", g.permanent_nodes);
  f.guard([&] {
    g.grid.check();
    return 0;
  });
  return g;
}

Shock parse_shock(const Field& f, bool with_magnitudes) {
  if (with_magnitudes) {
    f.allow({"kind", "magnitude", "magnitudes", "period", "component", "keep", "extra_prior"});
  } else {
    f.allow({"kind", "magnitude", "period", "component", "keep", "extra_prior"});
  }
  Shock s;
  const std::string kind = f.at("kind").text();
  s.kind = f.at("kind").guard([&] { return parse_shock_kind(kind); });
  s.magnitude = f.number("magnitude", 1.0);
  if (f.has("period")) s.period = f.at("period").count();
  const std::string comp = f.text("component", "transitory");
  if (comp == "transitory") {
    s.component = IncomeComponent::Transitory;
  } else if (comp == "permanent") {
    s.component = IncomeComponent::Permanent;
  } else {
    f.at("component").fail("expected transitory or permanent");
  }
  if (f.has("keep")) {
    const Field k = f.at("keep");
    for (std::size_t i = 0; i < k.size(); ++i) s.keep.push_back(k.at(i).count());
  }
  s.extra_prior = f.numbers("extra_prior", {});
  return s;
}

TwoPeriodProblem parse_problem(const Field& f) {
  f.allow({"e1", "e2", "rf", "rho", "aggregator"});
  TwoPeriodProblem p;
  p.e1 = f.number("e1", p.e1);
  p.e2 = f.number("e2", p.e2);
  p.rf = f.number("rf", p.rf);
  p.rho = f.number("rho", p.rho);
  if (f.has("aggregator")) p.aggregator = parse_aggregator(f.at("aggregator"));
  f.guard([&] {
    check_problem(p);
    return 0;
  });
  return p;
}

TwoPeriodConfig parse_two_period(const Field& f) {
  f.allow({"problems", "random", "tolerance"});
  TwoPeriodConfig c;
  if (f.has("problems")) {
    const Field ps = f.at("problems");
    for (std::size_t i = 0; i < ps.size(); ++i) c.problems.push_back(parse_problem(ps.at(i)));
  }
  c.random = f.count("random", 0);
  c.tolerance = f.number("tolerance", c.tolerance);
  if (c.problems.empty() && c.random == 0) f.fail("needs problems or a positive random count");
  return c;
}

Figure1Config parse_figure1(const Field& f) {
  f.allow({"beta", "psis", "rates", "resolution", "e1", "e2"});
  Figure1Config c;
  c.beta = f.number("beta", c.beta);
  c.psis = f.numbers("psis", c.psis);
  c.rates = f.numbers("rates", c.rates);
  c.resolution = static_cast<int>(f.count("resolution", static_cast<std::size_t>(c.resolution)));
  c.e1 = f.number("e1", c.e1);
  c.e2 = f.number("e2", c.e2);
  if (c.resolution < 2) f.at("resolution").fail("expected at least 2");
  if (c.psis.empty() || c.rates.empty()) f.fail("psis and rates must be nonempty");
  return c;
}

StaticsConfig parse_statics(const Field& f) {
  f.allow({"environments", "certificates", "homothetic_probability", "psi_lo", "psi_hi", "certificate",
           "certificate_margin", "wealth", "period", "alpha"});
  StaticsConfig c;
  c.environments = f.count("environments", c.environments);
  c.certificates = f.count("certificates", c.certificates);
  c.random.homothetic_probability = f.number("homothetic_probability", c.random.homothetic_probability);
  c.random.psi_lo = f.number("psi_lo", c.random.psi_lo);
  c.random.psi_hi = f.number("psi_hi", c.random.psi_hi);
  if (!(c.random.psi_lo > 0.0 && c.random.psi_lo <= c.random.psi_hi)) f.fail("need 0 < psi_lo <= psi_hi");
  if (f.has("certificate")) {
    const Field k = f.at("certificate");
    k.allow({"wealth_points", "share_points", "alpha_points", "share_lo", "share_hi", "ladder", "scan"});
    auto& o = c.certificate;
    o.wealth_points = k.count("wealth_points", o.wealth_points);
    o.share_points = k.count("share_points", o.share_points);
    o.alpha_points = k.count("alpha_points", o.alpha_points);
    o.share.lo = k.number("share_lo", o.share.lo);
    o.share.hi = k.number("share_hi", o.share.hi);
    o.ladder = k.count("ladder", o.ladder);
    o.scan = k.count("scan", o.scan);
    if (!(o.share.lo > 0.0 && o.share.lo < o.share.hi && o.share.hi < 1.0)) k.fail("need 0 < share_lo < share_hi < 1");
  }
  c.certificate_margin = f.number("certificate_margin", c.certificate_margin);
  c.wealth = f.numbers("wealth", {});
  c.period = f.count("period", 0);
  c.alpha = f.number("alpha", c.alpha);
  return c;
}

RemvConfig parse_remv(const Field& f) {
  f.allow({"shock", "savings", "permanent", "period"});
  RemvConfig c;
  c.shock = parse_shock(f.at("shock"), false);
  c.savings = f.numbers("savings", c.savings);
  c.permanent = f.numbers("permanent", c.permanent);
  c.period = f.count("period", 0);
  for (double s : c.savings) {
    if (!(s > 0.0)) f.at("savings").fail("savings must be positive");
  }
  for (double p : c.permanent) {
    if (!(p >= 0.0)) f.at("permanent").fail("permanent income must be nonnegative");
  }
  return c;
}

IdentifyConfig parse_identify(const Field& f) {
  f.allow({"groups", "template", "design", "periods", "wealth_log_mean", "wealth_log_sd", "noise", "column",
           "first_stage", "first_stage_sign", "sign_threshold", "sign_noise"});
  IdentifyConfig c;
  const Field gs = f.at("groups");
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const Field g = gs.at(i);
    g.allow({"label", "psi", "beta", "gamma", "agents"});
    PopulationGroup p;
    p.psi = g.at("psi").number();
    p.label = g.text("label", "psi=" + g.at("psi").raw().dump());
    p.beta = g.number("beta", p.beta);
    p.gamma = g.number("gamma", p.gamma);
    p.agents = g.count("agents", p.agents);
    if (!(p.psi > 0.0)) g.at("psi").fail("psi must be positive");
    if (!(p.beta > 0.0 && p.beta < 1.0)) g.at("beta").fail("beta must lie in (0, 1)");
    c.groups.push_back(p);
  }
  if (c.groups.empty()) gs.fail("at least one group is required");
  if (f.has("template")) {
    const Field t = f.at("template");
    t.allow({"horizon", "transition"});
    c.panel_template.horizon = t.count("horizon", c.panel_template.horizon);
    c.panel_template.transition = parse_transition(t.at("transition"));
    if (c.panel_template.transition.income || c.panel_template.transition.entrepreneur) {
      t.at("transition").fail("panel templates must be homothetic: no income or entrepreneur blocks");
    }
  } else {
    c.panel_template.transition.probs = {0.5, 0.5};
    c.panel_template.transition.returns = {{1.02, 1.02}, {0.92, 1.2}, {0.82, 1.38}};
  }
  if (f.has("design")) {
    const Field d = f.at("design");
    d.allow({"kind", "lo", "hi", "points", "idiosyncratic_sd"});
    const std::string kind = d.text("kind", "uniform_grid");
    if (kind == "uniform_grid") {
      c.design.kind = ShifterDesign::Kind::UniformGrid;
    } else if (kind == "two_point") {
      c.design.kind = ShifterDesign::Kind::TwoPoint;
    } else {
      d.at("kind").fail("expected uniform_grid or two_point");
    }
    c.design.lo = d.number("lo", c.design.lo);
    c.design.hi = d.number("hi", c.design.hi);
    c.design.points = d.count("points", c.design.points);
    c.design.idiosyncratic_sd = d.number("idiosyncratic_sd", c.design.idiosyncratic_sd);
  }
  c.options.periods = f.count("periods", c.options.periods);
  c.options.wealth_log_mean = f.number("wealth_log_mean", c.options.wealth_log_mean);
  c.options.wealth_log_sd = f.number("wealth_log_sd", c.options.wealth_log_sd);
  c.noise = f.numbers("noise", c.noise);
  const std::string col = f.text("column", "total");
  if (col == "total") {
    c.column = ShifterColumn::Total;
  } else if (col == "common") {
    c.column = ShifterColumn::Common;
  } else if (col == "idiosyncratic") {
    c.column = ShifterColumn::Idiosyncratic;
  } else {
    f.at("column").fail("expected total, common or idiosyncratic");
  }
  if (f.raw().is_object() && f.raw().contains("first_stage") && f.raw().at("first_stage").is_null()) {
    c.first_stage.reset();
  } else if (f.has("first_stage")) {
    c.first_stage = f.at("first_stage").number();
  }
  c.first_stage_sign = static_cast<int>(f.number("first_stage_sign", 1.0));
  c.sign_threshold = f.number("sign_threshold", c.sign_threshold);
  c.sign_noise = f.number("sign_noise", c.sign_noise);
  return c;
}

// Line and column of a byte offset, for parse errors.
std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Config parse_config(const std::string& text, const std::filesystem::path& source) {
  const std::string src = source.string();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::ostringstream os;
    os << src << ":" << line << ":" << col << ": syntax error: " << e.what();
    throw ConfigError(os.str());
  }
  const Field root(j, "", &src);
  root.allow({"setting", "grid", "shocks", "two_period", "figure1", "statics", "remv", "identify", "cache"});
  Config c;
  c.source = source;
  if (root.has("setting")) c.setting = parse_setting(root.at("setting"));
  if (root.has("grid")) c.grid = parse_grid(root.at("grid"));
  if (root.has("shocks")) {
    const Field ss = root.at("shocks");
    for (std::size_t i = 0; i < ss.size(); ++i) {
      const Field f = ss.at(i);
      ShockSpec spec;
      spec.shock = parse_shock(f, true);
      spec.magnitudes = f.has("magnitudes") ? f.at("magnitudes").numbers() : std::vector<double>{spec.shock.magnitude};
      if (spec.magnitudes.empty()) f.at("magnitudes").fail("at least one magnitude is required");
      c.shocks.push_back(std::move(spec));
    }
  }
  if (root.has("two_period")) c.two_period = parse_two_period(root.at("two_period"));
  if (root.has("figure1")) c.figure1 = parse_figure1(root.at("figure1"));
  if (root.has("statics")) c.statics = parse_statics(root.at("statics"));
  if (root.has("remv")) c.remv = parse_remv(root.at("remv"));
  if (root.has("identify")) c.identify = parse_identify(root.at("identify"));
  c.cache = root.boolean("cache", false);
  return c;
}

Config load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError(file.string() + ": cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file);
}

}  // namespace eislab
