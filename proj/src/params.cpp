#include "intens/params.hpp"

#include <cmath>
#include <sstream>

#include "intens/error.hpp"

namespace intens {

void SemanticParams::validate() const {
  for (Modifier m : all_modifiers()) {
    const ThresholdPair& t = pair(m);
    if (!(t.lo < t.hi)) {
      std::ostringstream os;
      os << "threshold ordering violated for '" << to_string(m) << "': lo=" << t.lo
         << " hi=" << t.hi;
      throw ConfigError(os.str());
    }
  }
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(epsilon > 0.0 && epsilon < 0.01))
    throw ConfigError("epsilon must lie in (0, 0.01)");
}

void PragmaticParams::validate() const {
  if (!(informativity_weight >= 0.0))
    throw ConfigError("informativity weight must be nonnegative");
  if (!(modifier_cost >= 0.0)) throw ConfigError("modifier cost must be nonnegative");
  if (!std::isfinite(social_weight)) throw ConfigError("social weight must be finite");
}

SocialValues::SocialValues() {
  values_.setConstant(std::numeric_limits<double>::quiet_NaN());
}

double SocialValues::value(Predicate p, Modifier m) const {
  const double v = values_(static_cast<int>(p), static_cast<int>(m));
  if (std::isnan(v)) {
    std::ostringstream os;
    os << "missing politeness cell: " << to_string(p) << "/" << to_string(m);
    throw DataError(os.str());
  }
  return v;
}

void SocialValues::set(Predicate p, Modifier m, double v) {
  values_(static_cast<int>(p), static_cast<int>(m)) = v;
}

bool SocialValues::has(Predicate p, Modifier m) const {
  return !std::isnan(values_(static_cast<int>(p), static_cast<int>(m)));
}

void PolitenessTable::validate_complete() const {
  for (Country c : all_countries())
    for (Predicate p : all_predicates())
      for (Modifier m : all_modifiers())
        if (!slice(c).has(p, m)) {
          std::ostringstream os;
          os << "missing politeness cell: " << to_string(c) << "/" << to_string(p) << "/"
             << to_string(m);
          throw DataError(os.str());
        }
}

}  // namespace intens
