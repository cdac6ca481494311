#include "intens/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "intens/error.hpp"

namespace intens {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

using GroupKey = std::pair<std::string, Experiment>;

}  // namespace

std::vector<TrialRecord> parse_trials(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> errors;
  std::vector<TrialRecord> trials;
  std::set<std::tuple<std::string, Experiment, Predicate, Modifier>> seen;

  if (!std::getline(in, line)) throw DataError("empty input: missing CSV header");
  {
    auto fields = split_csv_line(line);
    std::string joined;
    for (std::size_t i = 0; i < fields.size(); ++i)
      joined += (i ? "," : "") + fields[i];
    if (joined != kCsvHeader)
      throw DataError("unexpected CSV header: '" + joined + "' (expected '" + kCsvHeader + "')");
  }

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    auto complain = [&](const std::string& what) {
      errors.push_back("line " + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() != 6) {
      complain("expected 6 fields, got " + std::to_string(fields.size()));
      continue;
    }

    TrialRecord rec;
    rec.participant_id = fields[0];
    bool ok = true;
    if (rec.participant_id.empty()) {
      complain("empty participant_id");
      ok = false;
    }
    if (auto c = parse_country(fields[1]))
      rec.country = *c;
    else {
      complain("unknown country '" + fields[1] + "'");
      ok = false;
    }
    if (auto e = parse_experiment(fields[2]))
      rec.experiment = *e;
    else {
      complain("unknown experiment '" + fields[2] + "'");
      ok = false;
    }
    if (auto p = parse_predicate(fields[3]))
      rec.predicate = *p;
    else {
      complain("unknown predicate '" + fields[3] + "'");
      ok = false;
    }
    if (auto m = parse_modifier(fields[4]))
      rec.modifier = *m;
    else {
      complain("unknown modifier '" + fields[4] + "'");
      ok = false;
    }
    {
      const std::string& s = fields[5];
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        complain("unparseable response '" + s + "'");
        ok = false;
      } else if (v < 0.0 || v > 1.0) {
        complain("response " + s + " outside [0,1]");
        ok = false;
      } else {
        rec.response = v;
      }
    }
    if (!ok) continue;

    auto key = std::make_tuple(rec.participant_id, rec.experiment, rec.predicate, rec.modifier);
    if (!seen.insert(key).second) {
      complain("duplicate (participant, experiment, predicate, modifier) = (" +
               rec.participant_id + ", " + std::string(to_string(rec.experiment)) + ", " +
               std::string(to_string(rec.predicate)) + ", " +
               std::string(to_string(rec.modifier)) + ")");
      continue;
    }
    trials.push_back(std::move(rec));
  }

  if (!errors.empty()) {
    std::string msg = "CSV validation failed (" + std::to_string(errors.size()) + " rows):";
    for (const auto& e : errors) msg += "\n  " + e;
    throw DataError(msg);
  }
  return trials;
}

std::vector<TrialRecord> load_trials(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trials(buf.str());
}

ZScoreResult zscore_by_participant(std::vector<TrialRecord> trials) {
  std::map<GroupKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < trials.size(); ++i)
    groups[{trials[i].participant_id, trials[i].experiment}].push_back(i);

  ZScoreResult result;
  std::set<std::size_t> dropped;
  for (auto& [key, idx] : groups) {
    double sum = 0.0;
    std::set<double> distinct;
    for (std::size_t i : idx) {
      sum += trials[i].response;
      distinct.insert(trials[i].response);
    }
    const auto n = static_cast<double>(idx.size());
    if (idx.size() < 2 || distinct.size() < 2) {
      result.warnings.push_back("participant '" + key.first + "' (" +
                                std::string(to_string(key.second)) +
                                ") excluded: fewer than two distinct responses");
      for (std::size_t i : idx) dropped.insert(i);
      continue;
    }
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t i : idx) {
      const double d = trials[i].response - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    for (std::size_t i : idx) trials[i].response_z = (trials[i].response - mean) / sd;
  }

  result.trials.reserve(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i)
    if (!dropped.count(i)) result.trials.push_back(std::move(trials[i]));
  return result;
}

EffectScoreResult effect_scores(std::span<const TrialRecord> trials) {
  for (const auto& t : trials)
    if (std::isnan(t.response_z))
      throw UsageError("effect_scores: trials must be z-scored first");

  // (participant, experiment, predicate) -> trials of that scenario family
  std::map<std::tuple<std::string, Experiment, Predicate>, std::vector<const TrialRecord*>> groups;
  for (const auto& t : trials)
    groups[{t.participant_id, t.experiment, t.predicate}].push_back(&t);

  EffectScoreResult result;
  for (auto& [key, recs] : groups) {
    const TrialRecord* baseline = nullptr;
    for (const TrialRecord* r : recs)
      if (r->modifier == Modifier::None) baseline = r;
    for (const TrialRecord* r : recs) {
      if (r->modifier == Modifier::None) continue;
      if (!baseline) {
        result.warnings.push_back("no unmodified baseline for participant '" +
                                  std::get<0>(key) + "', predicate '" +
                                  std::string(to_string(std::get<2>(key))) + "'; skipped");
        break;
      }
      result.scores.push_back(EffectScore{r->participant_id, r->country, r->predicate,
                                          r->modifier, r->response_z - baseline->response_z});
    }
  }
  return result;
}

PolitenessTable build_politeness_table(std::span<const TrialRecord> trials) {
  double sums[kCountryCount][kPredicateCount][kModifierCount] = {};
  long counts[kCountryCount][kPredicateCount][kModifierCount] = {};

  for (const auto& t : trials) {
    if (t.experiment != Experiment::Politeness) continue;
    if (std::isnan(t.response_z))
      throw UsageError("build_politeness_table: trials must be z-scored first");
    sums[static_cast<int>(t.country)][static_cast<int>(t.predicate)]
        [static_cast<int>(t.modifier)] += t.response_z;
    counts[static_cast<int>(t.country)][static_cast<int>(t.predicate)]
          [static_cast<int>(t.modifier)] += 1;
  }

  PolitenessTable table;
  for (Country c : all_countries())
    for (Predicate p : all_predicates())
      for (Modifier m : all_modifiers()) {
        const long n = counts[static_cast<int>(c)][static_cast<int>(p)][static_cast<int>(m)];
        if (n == 0) {
          std::ostringstream os;
          os << "empty politeness cell: " << to_string(c) << "/" << to_string(p) << "/"
             << to_string(m);
          throw DataError(os.str());
        }
        table.set(c, p, m,
                  sums[static_cast<int>(c)][static_cast<int>(p)][static_cast<int>(m)] /
                      static_cast<double>(n));
      }
  return table;
}

PolitenessTable valence_flip(const PolitenessTable& table) {
  PolitenessTable flipped;
  for (Country c : all_countries())
    for (Predicate p : all_predicates()) {
      const double sign = valence(p) == Valence::Negative ? -1.0 : 1.0;
      for (Modifier m : all_modifiers()) flipped.set(c, p, m, sign * table.value(c, p, m));
    }
  return flipped;
}

std::vector<EffectScore> valence_flip(std::vector<EffectScore> scores) {
  for (auto& s : scores)
    if (valence(s.predicate) == Valence::Negative) s.effect = -s.effect;
  return scores;
}

std::vector<TrialRecord> filter_experiment(std::span<const TrialRecord> trials, Experiment e) {
  std::vector<TrialRecord> out;
  for (const auto& t : trials)
    if (t.experiment == e) out.push_back(t);
  return out;
}

std::string canonical_csv(std::span<const TrialRecord> trials) {
  std::vector<const TrialRecord*> order;
  order.reserve(trials.size());
  for (const auto& t : trials) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const TrialRecord* a, const TrialRecord* b) {
    return std::tie(a->experiment, a->country, a->participant_id, a->predicate, a->modifier) <
           std::tie(b->experiment, b->country, b->participant_id, b->predicate, b->modifier);
  });

  std::string out = kCsvHeader;
  out += '\n';
  for (const TrialRecord* t : order) {
    out += t->participant_id;
    out += ',';
    out += to_string(t->country);
    out += ',';
    out += to_string(t->experiment);
    out += ',';
    out += to_string(t->predicate);
    out += ',';
    out += to_string(t->modifier);
    out += ',';
    out += format_double(t->response);
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::string data_hash(std::span<const TrialRecord> trials) {
  return hex64(fnv1a64(canonical_csv(trials)));
}

}  // namespace intens
