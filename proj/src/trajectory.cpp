#include "mems/trajectory.hpp"

#include <stdexcept>

namespace mems {

void StepControls::validate() const {
  if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max)) {
    throw InvariantError("step controls need 0 < dt_min <= dt_init <= dt_max");
  }
  if (!(touch_eps > 0.0 && touch_eps < 0.1)) throw InvariantError("touch_eps must lie in (0, 0.1)");
  if (!(cfl_source > 0.0)) throw InvariantError("cfl_source must be positive");
  if (!(T_max > 0.0)) throw InvariantError("T_max must be positive");
}

std::string to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Touchdown:
      return "Touchdown";
    case OutcomeKind::Survived:
      return "Survived";
    case OutcomeKind::NumericalFailure:
      return "NumericalFailure";
  }
  return "NumericalFailure";
}

OutcomeKind outcome_from_string(const std::string& s) {
  if (s == "Touchdown") return OutcomeKind::Touchdown;
  if (s == "Survived") return OutcomeKind::Survived;
  if (s == "NumericalFailure") return OutcomeKind::NumericalFailure;
  throw std::invalid_argument("unknown outcome '" + s + "'");
}

}  // namespace mems
