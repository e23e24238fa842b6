#include "eislab/app/panel.hpp"

#include <cmath>
#include <random>
#include <string>

#include "eislab/app/csv.hpp"
#include "eislab/core/error.hpp"
#include "eislab/numerics/parallel.hpp"
#include "eislab/solver/homothetic.hpp"

namespace eislab {
namespace {

double shifter_of(const PanelRow& r, ShifterColumn c) {
  switch (c) {
    case ShifterColumn::Common:
      return r.alpha_t;
    case ShifterColumn::Idiosyncratic:
      return r.alpha_it;
    case ShifterColumn::Total:
      break;
  }
  return r.alpha_t + r.alpha_it;
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

Setting group_setting(const PopulationGroup& g, const PanelTemplate& tmpl) {
  if (tmpl.horizon == 0) throw PreconditionError("panel template needs a positive horizon");
  Setting s;
  for (std::size_t t = 0; t < tmpl.horizon; ++t) {
    s.periods.push_back(Period{Aggregator::epstein_zin(g.beta, g.psi),
                               CertaintyEquivalent::quasi_arithmetic(Curvature::crra(g.gamma)), tmpl.transition});
  }
  check_setting(s);
  return s;
}

Panel synth_panel(const std::vector<PopulationGroup>& groups, const PanelTemplate& tmpl, const ShifterDesign& design,
                  const PanelOptions& opt, std::uint64_t seed) {
  if (groups.empty()) throw PreconditionError("panel needs at least one population group");
  if (opt.periods == 0) throw PreconditionError("panel needs at least one period");
  if (!(opt.noise_sd >= 0.0) || !(opt.wealth_log_sd >= 0.0) || !(design.idiosyncratic_sd >= 0.0)) {
    throw PreconditionError("panel standard deviations must be nonnegative");
  }
  if (!(design.lo <= design.hi)) throw PreconditionError("shifter range must have lo <= hi");
  if (design.kind == ShifterDesign::Kind::UniformGrid && design.points < 2) {
    throw PreconditionError("uniform shifter grid needs at least two points");
  }

  std::vector<Setting> settings;
  std::vector<Solution> base;
  for (const auto& g : groups) {
    Setting s = group_setting(g, tmpl);
    std::string why;
    if (!homothetic_setting(s, &why)) throw PreconditionError("panel template is not homothetic: " + why);
    base.push_back(solve_homothetic(s));
    settings.push_back(std::move(s));
  }

  Panel p;
  p.seed = seed;
  for (const auto& g : groups) {
    p.groups.push_back(g.label);
    p.group_psi.push_back(g.psi);
  }

  // Common shifter path, one value per period.
  std::mt19937_64 rng(seed);
  std::vector<double> alpha_t(opt.periods);
  for (std::size_t t = 0; t < opt.periods; ++t) {
    if (design.kind == ShifterDesign::Kind::TwoPoint) {
      alpha_t[t] = (t % 2 == 0) ? design.lo : design.hi;
    } else {
      const std::size_t k = t % design.points;
      alpha_t[t] = design.lo + (design.hi - design.lo) * static_cast<double>(k) / static_cast<double>(design.points - 1);
    }
  }

  // One independent stream per agent keeps the panel identical for any worker count.
  struct AgentSpec {
    std::size_t group;
    std::uint64_t stream;
  };
  std::vector<AgentSpec> agents;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (std::size_t a = 0; a < groups[gi].agents; ++a) agents.push_back({gi, rng()});
  }
  p.rows.resize(agents.size() * opt.periods);

  parallel_for(agents.size(), opt.workers, [&](std::size_t i) {
    const AgentSpec& spec = agents[i];
    std::mt19937_64 arng(spec.stream);
    std::normal_distribution<double> z(0.0, 1.0);
    const Aggregator& f = settings[spec.group].periods[0].aggregator;
    const double g0 = base[spec.group].g()[0];
    for (std::size_t t = 0; t < opt.periods; ++t) {
      PanelRow r;
      r.agent = i;
      r.period = t;
      r.group = spec.group;
      r.wealth = std::exp(opt.wealth_log_mean + opt.wealth_log_sd * z(arng));
      r.alpha_t = alpha_t[t];
      r.alpha_it = design.idiosyncratic_sd * z(arng);
      // Scaling first-period returns by e^x scales g_0 by e^x (homogeneity of M).
      r.g = g0 * std::exp(r.alpha_t + r.alpha_it);
      const double share = homothetic_step(f, r.g).share;
      double c = share * r.wealth;
      if (opt.noise_sd > 0.0) {
        double noisy;
        do {
          noisy = c * std::exp(opt.noise_sd * z(arng));
        } while (!(noisy < r.wealth));
        c = noisy;
      }
      r.consumption = c;
      p.rows[i * opt.periods + t] = r;
    }
  });
  return p;
}

void write_panel_csv(std::ostream& os, const Panel& p) {
  CsvWriter w(os, {"agent", "period", "group", "psi", "c", "w", "alpha_t", "alpha_it", "g"});
  for (const auto& r : p.rows) {
    w.row({r.agent, r.period, p.groups[r.group], p.group_psi[r.group], r.consumption, r.wealth, r.alpha_t, r.alpha_it,
           r.g});
  }
}

std::vector<GroupEstimate> estimate_eis(const Panel& p, ShifterColumn column, std::optional<double> first_stage,
                                        int first_stage_sign) {
  if (first_stage && *first_stage == 0.0) {
    throw PreconditionError("first stage d log g / dx is zero: agents do not act on the shifter");
  }
  if (!first_stage && first_stage_sign == 0) throw PreconditionError("first-stage sign must be +1 or -1");
  std::vector<GroupEstimate> out;
  for (std::size_t gi = 0; gi < p.groups.size(); ++gi) {
    double n = 0.0, sx = 0.0, sy = 0.0;
    for (const auto& r : p.rows) {
      if (r.group != gi) continue;
      n += 1.0;
      sx += shifter_of(r, column);
      sy += std::log(r.consumption / (r.wealth - r.consumption));
    }
    GroupEstimate e;
    e.label = p.groups[gi];
    e.observations = static_cast<std::size_t>(n);
    if (n < 2.0) throw PreconditionError("group " + e.label + " has fewer than two observations");
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& r : p.rows) {
      if (r.group != gi) continue;
      const double dx = shifter_of(r, column) - mx;
      sxx += dx * dx;
      sxy += dx * (std::log(r.consumption / (r.wealth - r.consumption)) - my);
    }
    if (!(sxx > 1e-300)) throw PreconditionError("group " + e.label + " has no shifter variation");
    e.reduced_form = sxy / sxx;
    if (first_stage) {
      e.psi_hat = 1.0 - e.reduced_form / *first_stage;
      e.sign_one_minus_psi = sign_of(1.0 - *e.psi_hat);
    } else {
      e.sign_one_minus_psi = sign_of(e.reduced_form) * sign_of(static_cast<double>(first_stage_sign));
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace eislab
