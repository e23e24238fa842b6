#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "eislab/core/setting.hpp"

namespace eislab {

// Agents sharing preferences; psi is homogeneous within a group.
struct PopulationGroup {
  std::string label;
  double psi = 1.0;
  double beta = 0.9;
  double gamma = 2.0;
  std::size_t agents = 100;
};

// Homothetic template the groups are solved on: horizon and per-period
// transition (probabilities and gross returns, no income).
struct PanelTemplate {
  std::size_t horizon = 3;
  Transition transition;
};

// Shifter x = alpha_t + alpha_it scales every first-period return by e^x, so
// d log g / dx = 1 exactly. alpha_t follows the design; alpha_it is
// N(0, idiosyncratic_sd^2).
struct ShifterDesign {
  enum class Kind { TwoPoint, UniformGrid };
  Kind kind = Kind::UniformGrid;
  double lo = -0.25;
  double hi = 0.25;
  std::size_t points = 5;  // uniform grid only
  double idiosyncratic_sd = 0.0;
};

struct PanelOptions {
  std::size_t periods = 10;
  double noise_sd = 0.0;          // multiplicative log-normal noise on consumption
  double wealth_log_mean = 0.0;   // log-normal wealth draws
  double wealth_log_sd = 0.5;
  std::size_t workers = 1;
};

struct PanelRow {
  std::size_t agent = 0;
  std::size_t period = 0;
  std::size_t group = 0;
  double consumption = 0.0;
  double wealth = 0.0;
  double alpha_t = 0.0;
  double alpha_it = 0.0;
  double g = 0.0;  // true continuation scale at the agent's shifter
};

struct Panel {
  std::vector<std::string> groups;
  std::vector<double> group_psi;
  std::vector<PanelRow> rows;
  std::uint64_t seed = 0;
};

// Homothetic setting of one group on the template.
Setting group_setting(const PopulationGroup& g, const PanelTemplate& tmpl);

// Throws PreconditionError for a template that is not homothetic.
Panel synth_panel(const std::vector<PopulationGroup>& groups, const PanelTemplate& tmpl, const ShifterDesign& design,
                  const PanelOptions& opt, std::uint64_t seed);

void write_panel_csv(std::ostream& os, const Panel& p);

enum class ShifterColumn { Total, Common, Idiosyncratic };

struct GroupEstimate {
  std::string label;
  std::size_t observations = 0;
  double reduced_form = 0.0;  // d log(c / (w - c)) / dx
  std::optional<double> psi_hat;
  int sign_one_minus_psi = 0;
};

// Within-group least squares of log(c / (w - c)) on the shifter. With a known
// first stage d log g / dx the EIS is psi = 1 - reduced_form / first_stage;
// with only its sign, sign(1 - psi) = sign(reduced_form) * first_stage_sign.
// Throws PreconditionError on a zero first stage or no shifter variation.
std::vector<GroupEstimate> estimate_eis(const Panel& p, ShifterColumn column, std::optional<double> first_stage,
                                        int first_stage_sign = 1);

}  // namespace eislab
