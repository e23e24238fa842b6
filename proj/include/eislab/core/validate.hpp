#pragma once

#include <string>
#include <vector>

#include "eislab/core/setting.hpp"

namespace eislab {

enum class Severity { Error, Warning };

struct RegularityCheck {
  std::string name;
  bool passed = true;
  Severity severity = Severity::Error;
  std::string detail;
};

// Which of the discrete/interior/smooth conditions a setting satisfies.
// `strongly_regular` is set when every check passes (warnings included).
struct RegularityReport {
  std::vector<RegularityCheck> checks;
  bool strongly_regular = false;

  const RegularityCheck* find(const std::string& name) const;
  bool passed(const std::string& name) const;
};

// Diagnostic only; never throws on an irregular setting.
RegularityReport validate_setting(const Setting& s);

}  // namespace eislab
