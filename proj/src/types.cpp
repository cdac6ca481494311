#include "intens/types.hpp"

namespace intens {

Valence valence(Predicate p) {
  switch (p) {
    case Predicate::Understandable:
    case Predicate::Impressive:
    case Predicate::Helpful:
      return Valence::Positive;
    case Predicate::Exhausted:
    case Predicate::Boring:
    case Predicate::Difficult:
    case Predicate::Concerned:
      return Valence::Negative;
  }
  return Valence::Negative;
}

std::string_view to_string(Country c) {
  return c == Country::UK ? "UK" : "US";
}

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Dialogue:
      return "dialogue";
    case Experiment::Narrator:
      return "narrator";
    case Experiment::Politeness:
      return "politeness";
  }
  return "";
}

std::string_view to_string(Predicate p) {
  switch (p) {
    case Predicate::Exhausted:
      return "exhausted";
    case Predicate::Boring:
      return "boring";
    case Predicate::Difficult:
      return "difficult";
    case Predicate::Concerned:
      return "concerned";
    case Predicate::Understandable:
      return "understandable";
    case Predicate::Impressive:
      return "impressive";
    case Predicate::Helpful:
      return "helpful";
  }
  return "";
}

std::string_view to_string(Modifier m) {
  switch (m) {
    case Modifier::None:
      return "none";
    case Modifier::Slightly:
      return "slightly";
    case Modifier::KindOf:
      return "kind_of";
    case Modifier::Quite:
      return "quite";
    case Modifier::Very:
      return "very";
    case Modifier::Extremely:
      return "extremely";
  }
  return "";
}

std::optional<Country> parse_country(std::string_view s) {
  for (Country c : all_countries())
    if (s == to_string(c)) return c;
  return std::nullopt;
}

std::optional<Experiment> parse_experiment(std::string_view s) {
  for (Experiment e : {Experiment::Dialogue, Experiment::Narrator, Experiment::Politeness})
    if (s == to_string(e)) return e;
  return std::nullopt;
}

std::optional<Predicate> parse_predicate(std::string_view s) {
  for (Predicate p : all_predicates())
    if (s == to_string(p)) return p;
  return std::nullopt;
}

std::optional<Modifier> parse_modifier(std::string_view s) {
  for (Modifier m : all_modifiers())
    if (s == to_string(m)) return m;
  return std::nullopt;
}

std::array<Utterance, kModifierCount> utterance_forms(Predicate p) {
  std::array<Utterance, kModifierCount> forms{};
  for (int i = 0; i < kModifierCount; ++i)
    forms[static_cast<std::size_t>(i)] = Utterance{p, static_cast<Modifier>(i)};
  return forms;
}

}  // namespace intens
