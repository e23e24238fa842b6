#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eislab/app/panel.hpp"
#include "eislab/core/setting.hpp"
#include "eislab/shocks/shock.hpp"
#include "eislab/solver/grid.hpp"
#include "eislab/statics/random_env.hpp"
#include "eislab/statics/statics.hpp"
#include "eislab/twoperiod/two_period.hpp"

namespace eislab {

struct GridConfig {
  WealthGrid grid;
  IncomeMode income = IncomeMode::Auto;
  std::size_t permanent_nodes = 9;
};

// A shock kind with the magnitudes it is applied at.
struct ShockSpec {
  Shock shock;
  std::vector<double> magnitudes;
};

struct TwoPeriodConfig {
  std::vector<TwoPeriodProblem> problems;
  // Additional randomly drawn Epstein-Zin problems.
  std::size_t random = 0;
  double tolerance = 1e-8;  // closed form vs numeric argmax, relative
};

struct Figure1Config {
  double beta = 0.5;
  std::vector<double> psis{0.5, 1.0, 2.0};
  std::vector<double> rates{1.0, 1.25, 1.5};
  int resolution = 101;
  double e1 = 1.0;
  double e2 = 0.0;
};

struct StaticsConfig {
  std::size_t environments = 1000;
  std::size_t certificates = 100;
  RandomEnvironmentOptions random;
  CertificateOptions certificate;
  double certificate_margin = 0.1;
  // Optional evaluation of a configured setting and shock: wealth points at period `period`.
  std::vector<double> wealth;
  std::size_t period = 0;
  double alpha = 0.5;
};

struct RemvConfig {
  Shock shock;
  std::vector<double> savings{1.0};
  std::vector<double> permanent{0.0, 0.5, 1.0};
  std::size_t period = 0;
};

struct IdentifyConfig {
  std::vector<PopulationGroup> groups;
  PanelTemplate panel_template;
  ShifterDesign design;
  PanelOptions options;
  std::vector<double> noise{0.0, 1e-3, 1e-2, 0.05};
  ShifterColumn column = ShifterColumn::Total;
  std::optional<double> first_stage = 1.0;
  int first_stage_sign = 1;
  double sign_threshold = 0.25;  // |psi - 1| at which signs are asserted
  double sign_noise = 0.05;      // noise level at which signs are asserted
};

struct Config {
  std::filesystem::path source;
  std::optional<Setting> setting;
  GridConfig grid;
  std::vector<ShockSpec> shocks;
  std::optional<TwoPeriodConfig> two_period;
  std::optional<Figure1Config> figure1;
  std::optional<StaticsConfig> statics;
  std::optional<RemvConfig> remv;
  std::optional<IdentifyConfig> identify;
  // Reuse binary solution caches inside the output directory.
  bool cache = false;
};

// Parses a JSON configuration. Throws ConfigError naming the line and column
// of syntax errors and the path of invalid fields (for example
// "setting.periods[2].aggregator.psi").
Config parse_config(const std::string& text, const std::filesystem::path& source = "<string>");
Config load_config(const std::filesystem::path& file);

}  // namespace eislab
