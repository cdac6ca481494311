#ifndef INTENS_TYPES_HPP
#define INTENS_TYPES_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace intens {

enum class Country : int { UK = 0, US = 1 };
enum class Experiment : int { Dialogue = 0, Narrator = 1, Politeness = 2 };

/// Gradable predicates used in the stimuli.
enum class Predicate : int {
  Exhausted = 0,
  Boring,
  Difficult,
  Concerned,
  Understandable,
  Impressive,
  Helpful,
};

/// Degree modifiers, ordered weakest to strongest. None denotes the bare form.
enum class Modifier : int {
  None = 0,
  Slightly,
  KindOf,
  Quite,
  Very,
  Extremely,
};

enum class Valence : int { Negative = 0, Positive = 1 };

inline constexpr int kCountryCount = 2;
inline constexpr int kExperimentCount = 3;
inline constexpr int kPredicateCount = 7;
inline constexpr int kModifierCount = 6;  // none + five modifiers

constexpr std::array<Country, kCountryCount> all_countries() {
  return {Country::UK, Country::US};
}

constexpr std::array<Predicate, kPredicateCount> all_predicates() {
  return {Predicate::Exhausted,      Predicate::Boring,     Predicate::Difficult,
          Predicate::Concerned,      Predicate::Understandable,
          Predicate::Impressive,     Predicate::Helpful};
}

constexpr std::array<Modifier, kModifierCount> all_modifiers() {
  return {Modifier::None,  Modifier::Slightly, Modifier::KindOf,
          Modifier::Quite, Modifier::Very,     Modifier::Extremely};
}

Valence valence(Predicate p);

std::string_view to_string(Country c);
std::string_view to_string(Experiment e);
std::string_view to_string(Predicate p);
std::string_view to_string(Modifier m);

std::optional<Country> parse_country(std::string_view s);
std::optional<Experiment> parse_experiment(std::string_view s);
std::optional<Predicate> parse_predicate(std::string_view s);
std::optional<Modifier> parse_modifier(std::string_view s);

/// A predicate with an optional degree modifier.
struct Utterance {
  Predicate predicate;
  Modifier modifier = Modifier::None;

  Valence valence() const { return intens::valence(predicate); }
  bool modified() const { return modifier != Modifier::None; }

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

/// The six forms of one predicate: bare plus the five modified variants,
/// in modifier order. This is the alternative set the speaker chooses from.
std::array<Utterance, kModifierCount> utterance_forms(Predicate p);

}  // namespace intens

#endif
