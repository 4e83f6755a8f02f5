#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "oblit/corpus.hpp"
#include "oblit/detector.hpp"
#include "oblit/error.hpp"
#include "oblit/keyvalue.hpp"
#include "oblit/metrics.hpp"
#include "oblit/ngram.hpp"
#include "oblit/rng.hpp"
#include "oblit/tabulator.hpp"
#include "oblit/text.hpp"

namespace oblit {

enum class GenerationMode { Exact, Sampled };

inline const char* to_string(GenerationMode m) { return m == GenerationMode::Exact ? "exact" : "sampled"; }

inline GenerationMode parse_generation_mode(const std::string& s) {
  if (s == "exact") return GenerationMode::Exact;
  if (s == "sampled") return GenerationMode::Sampled;
  throw InvalidArgument("mode must be exact or sampled, got \"" + s + "\"");
}

/// Shape of a synthetic corpus. Follower counts are per topic per year for
/// lags 0..horizon after the topic's first foundational year.
struct GeneratorSpec {
  std::size_t num_topics = 20;
  std::size_t foundational_per_topic = 2;
  std::vector<double> foundational_weights;  // empty: equal
  std::size_t catchphrase_min_words = 2;
  std::size_t catchphrase_max_words = 3;
  std::size_t exclusive_words = 6;     // topic jargon beyond the catchphrase
  std::size_t jargon_per_context = 2;
  std::size_t background_vocabulary = 300;
  std::size_t background_per_context = 1;  // noise words inside topic contexts
  std::size_t background_context_words = 3;
  std::size_t background_papers = 400;
  std::size_t peripheral_per_topic = 10;
  std::size_t peripheral_citations = 3;
  std::size_t full_text_words = 12;
  int first_year_min = 1990;
  int first_year_max = 2000;
  int horizon = 20;
  std::size_t mentions_per_year = 6;
  std::size_t cite_only_per_year = 2;
  double p_cite_start = 0.8;  // p(cite|mention) at lag 0, linear to p_cite_end at the horizon
  double p_cite_end = 0.64;
  double indirect_start = 0.6;  // share of hidden followers citing an explicit follower
  double indirect_end = 0.6;
  double origin_omit_fraction = 0.75;
  std::size_t eponym_topics = 5;
  std::size_t experiment_topics = 2;
  bool scaling = false;  // replaces the per-year schedule with c, h drawn per topic
  double scaling_exponent = 0.763;
  double scaling_prefactor = 1.0;
  double scaling_noise_sd = 0.2;  // natural-log scale
  double scaling_c_min = 30;
  double scaling_c_max = 600;
  std::uint64_t seed = 7;
  GenerationMode mode = GenerationMode::Exact;

  double p_cite_at(int lag) const {
    if (horizon == 0) return p_cite_start;
    return p_cite_start + (p_cite_end - p_cite_start) * static_cast<double>(lag) / static_cast<double>(horizon);
  }
  double indirect_at(int lag) const {
    if (horizon == 0) return indirect_start;
    return indirect_start + (indirect_end - indirect_start) * static_cast<double>(lag) / static_cast<double>(horizon);
  }

  void validate() const {
    auto prob = [](double p, const char* name) {
      if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(name) + " must be in [0, 1]");
    };
    prob(p_cite_start, "p_cite_start");
    prob(p_cite_end, "p_cite_end");
    prob(indirect_start, "indirect_start");
    prob(indirect_end, "indirect_end");
    prob(origin_omit_fraction, "origin_omit_fraction");
    if (num_topics == 0) throw InvalidArgument("num_topics must be >= 1");
    if (foundational_per_topic == 0) throw InvalidArgument("foundational_per_topic must be >= 1");
    if (!foundational_weights.empty()) {
      if (foundational_weights.size() != foundational_per_topic) {
        throw InvalidArgument("foundational_weights needs one weight per foundational paper");
      }
      for (double w : foundational_weights)
        if (!(w > 0.0)) throw InvalidArgument("foundational_weights must be positive");
    }
    if (catchphrase_min_words == 0 || catchphrase_min_words > catchphrase_max_words) {
      throw InvalidArgument("need 1 <= catchphrase_min_words <= catchphrase_max_words");
    }
    if (jargon_per_context > 0 && exclusive_words == 0) throw InvalidArgument("jargon_per_context needs exclusive_words");
    if (background_vocabulary == 0) throw InvalidArgument("background_vocabulary must be >= 1");
    if (background_papers == 0) throw InvalidArgument("background_papers must be >= 1");
    if (first_year_min < 1800 || first_year_max < first_year_min || first_year_max + horizon > 2100) {
      throw InvalidArgument("topic years must fit in [1800, 2100]");
    }
    if (first_year_min - 1 < 1800) throw InvalidArgument("first_year_min leaves no room for background papers");
    if (horizon < 0) throw InvalidArgument("horizon must be >= 0");
    if (eponym_topics + experiment_topics > num_topics) {
      throw InvalidArgument("eponym_topics + experiment_topics exceeds num_topics");
    }
    if (scaling) {
      if (!(scaling_c_min >= 1.0 && scaling_c_max >= scaling_c_min)) throw InvalidArgument("need 1 <= scaling_c_min <= scaling_c_max");
      if (!(scaling_prefactor > 0.0) || !(scaling_noise_sd >= 0.0)) throw InvalidArgument("bad scaling parameters");
      if (scaling_c_min < 2.0 * static_cast<double>(foundational_per_topic)) {
        throw InvalidArgument("infeasible spec: more foundational papers than citing followers");
      }
    } else {
      // Worst case over lags of the number of citing followers.
      double citing = 0.0;
      for (int lag = 0; lag <= horizon; ++lag) {
        citing += static_cast<double>(cite_only_per_year) +
                  std::floor(static_cast<double>(mentions_per_year) * std::min(p_cite_start, p_cite_end));
      }
      if (mode == GenerationMode::Exact && citing < static_cast<double>(foundational_per_topic)) {
        throw InvalidArgument("infeasible spec: more foundational papers than citing followers");
      }
      if (mentions_per_year + cite_only_per_year == 0) throw InvalidArgument("infeasible spec: no followers");
    }
  }
};

inline GeneratorSpec read_generator_spec(std::istream& in) {
  GeneratorSpec s;
  for (const auto& kv : read_key_values(in)) {
    const std::string& k = kv.key;
    if (k == "num_topics") s.num_topics = kv.as_uint();
    else if (k == "foundational_per_topic") s.foundational_per_topic = kv.as_uint();
    else if (k == "foundational_weights") s.foundational_weights = kv.as_reals();
    else if (k == "catchphrase_min_words") s.catchphrase_min_words = kv.as_uint();
    else if (k == "catchphrase_max_words") s.catchphrase_max_words = kv.as_uint();
    else if (k == "exclusive_words") s.exclusive_words = kv.as_uint();
    else if (k == "jargon_per_context") s.jargon_per_context = kv.as_uint();
    else if (k == "background_vocabulary") s.background_vocabulary = kv.as_uint();
    else if (k == "background_per_context") s.background_per_context = kv.as_uint();
    else if (k == "background_context_words") s.background_context_words = kv.as_uint();
    else if (k == "background_papers") s.background_papers = kv.as_uint();
    else if (k == "peripheral_per_topic") s.peripheral_per_topic = kv.as_uint();
    else if (k == "peripheral_citations") s.peripheral_citations = kv.as_uint();
    else if (k == "full_text_words") s.full_text_words = kv.as_uint();
    else if (k == "first_year_min") s.first_year_min = kv.as_int();
    else if (k == "first_year_max") s.first_year_max = kv.as_int();
    else if (k == "horizon") s.horizon = kv.as_int();
    else if (k == "mentions_per_year") s.mentions_per_year = kv.as_uint();
    else if (k == "cite_only_per_year") s.cite_only_per_year = kv.as_uint();
    else if (k == "p_cite_start") s.p_cite_start = kv.as_real();
    else if (k == "p_cite_end") s.p_cite_end = kv.as_real();
    else if (k == "indirect_start") s.indirect_start = kv.as_real();
    else if (k == "indirect_end") s.indirect_end = kv.as_real();
    else if (k == "origin_omit_fraction") s.origin_omit_fraction = kv.as_real();
    else if (k == "eponym_topics") s.eponym_topics = kv.as_uint();
    else if (k == "experiment_topics") s.experiment_topics = kv.as_uint();
    else if (k == "scaling") s.scaling = kv.as_bool();
    else if (k == "scaling_exponent") s.scaling_exponent = kv.as_real();
    else if (k == "scaling_prefactor") s.scaling_prefactor = kv.as_real();
    else if (k == "scaling_noise_sd") s.scaling_noise_sd = kv.as_real();
    else if (k == "scaling_c_min") s.scaling_c_min = kv.as_real();
    else if (k == "scaling_c_max") s.scaling_c_max = kv.as_real();
    else if (k == "seed") s.seed = kv.as_uint();
    else if (k == "mode") {
      try {
        s.mode = parse_generation_mode(kv.value);
      } catch (const InvalidArgument& e) {
        throw ParseError(kv.line, k, e.what());
      }
    } else {
      throw ParseError(kv.line, k, "unknown generator key");
    }
  }
  return s;
}

inline GeneratorSpec read_generator_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read generator spec: " + path);
  return read_generator_spec(in);
}

// ---------------------------------------------------------------------------
// Ground truth

struct PlantedTopic {
  std::size_t index = 0;
  std::string catchphrase;  // as written into texts
  Ngram catchphrase_stems;
  CatchphraseClass cls = CatchphraseClass::Other;
  std::vector<std::string> exclusive_stems;  // catchphrase and jargon stems
  std::vector<std::string> foundational;
  std::vector<double> weights;        // normalized planted P(d|z) over the foundational set
  std::vector<std::string> controls;  // controls[i] has the citers of foundational[i]
  std::vector<std::string> peripheral;
  std::string review;
  int first_year = 0;
  std::map<int, YearCounts> by_year;
  std::map<int, double> planted_p;  // p(cite|mention) schedule by year
  std::size_t hidden_indirect = 0;
  double scaling_c = 0.0;  // planted before rounding, scaling mode only
  double scaling_h = 0.0;

  YearCounts totals() const {
    YearCounts t;
    for (const auto& [y, c] : by_year) t += c;
    return t;
  }
};

struct GroundTruth {
  std::uint64_t seed = 0;
  GenerationMode mode = GenerationMode::Exact;
  bool scaling = false;
  double scaling_exponent = 0.0;
  std::vector<PlantedTopic> topics;
  std::vector<std::string> background_stems;
  std::size_t origin_considered = 0;
  std::size_t origin_omitted = 0;
  std::map<std::string, double> hidden_attribution;
};

struct SyntheticCorpus {
  Corpus corpus;
  GroundTruth truth;
  std::map<Ngram, CatchphraseClass> label_overrides;
  std::vector<std::pair<std::string, CatchphraseClass>> override_lines;  // raw text as written
};

/// Profiles as the detector would report them if it were perfect.
inline std::vector<TopicProfile> planted_profiles(const GroundTruth& truth) {
  std::vector<TopicProfile> out;
  for (const auto& t : truth.topics) {
    TopicProfile p;
    p.topic_id = t.index;
    p.catchphrases.push_back({t.catchphrase_stems, {1.0, 0.0}});
    for (std::size_t i = 0; i < t.foundational.size(); ++i) {
      p.foundational_papers.push_back({t.foundational[i], {t.weights[i], 0.0}});
    }
    std::stable_sort(p.foundational_papers.begin(), p.foundational_papers.end(),
                     [](const ScoredPaper& a, const ScoredPaper& b) { return a.p.estimate > b.p.estimate; });
    p.first_foundational_year = t.first_year;
    out.push_back(std::move(p));
  }
  return out;
}

inline void write_truth(std::ostream& out, const GroundTruth& g) {
  using nlohmann::json;
  out << json{{"kind", "meta"},
              {"seed", g.seed},
              {"mode", to_string(g.mode)},
              {"scaling", g.scaling},
              {"scaling_exponent", g.scaling_exponent},
              {"origin_considered", g.origin_considered},
              {"origin_omitted", g.origin_omitted},
              {"background_stems", g.background_stems}}
             .dump()
      << '\n';
  for (const auto& t : g.topics) {
    out << json{{"kind", "topic"},
                {"topic", t.index},
                {"catchphrase", t.catchphrase},
                {"catchphrase_stems", t.catchphrase_stems.str()},
                {"class", to_string(t.cls)},
                {"exclusive_stems", t.exclusive_stems},
                {"foundational", t.foundational},
                {"weights", t.weights},
                {"controls", t.controls},
                {"peripheral", t.peripheral},
                {"review", t.review},
                {"first_year", t.first_year},
                {"hidden_indirect", t.hidden_indirect},
                {"scaling_c", t.scaling_c},
                {"scaling_h", t.scaling_h}}
               .dump()
        << '\n';
    for (const auto& [year, c] : t.by_year) {
      json j{{"kind", "year"},          {"topic", t.index},           {"year", year},
             {"lag", year - t.first_year}, {"n_both", c.n_both},       {"n_cite_only", c.n_cite_only},
             {"n_mention_only", c.n_mention_only}};
      if (auto it = t.planted_p.find(year); it != t.planted_p.end()) j["p_cite_given_mention"] = it->second;
      out << j.dump() << '\n';
    }
  }
  for (const auto& [id, h] : g.hidden_attribution) {
    out << json{{"kind", "attribution"}, {"paper_id", id}, {"h", h}}.dump() << '\n';
  }
}

inline GroundTruth read_truth(std::istream& in) {
  using nlohmann::json;
  GroundTruth g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      const std::string kind = j.at("kind");
      if (kind == "meta") {
        g.seed = j.at("seed");
        g.mode = parse_generation_mode(j.at("mode"));
        g.scaling = j.at("scaling");
        g.scaling_exponent = j.at("scaling_exponent");
        g.origin_considered = j.at("origin_considered");
        g.origin_omitted = j.at("origin_omitted");
        g.background_stems = j.at("background_stems").get<std::vector<std::string>>();
      } else if (kind == "topic") {
        PlantedTopic t;
        t.index = j.at("topic");
        t.catchphrase = j.at("catchphrase");
        t.catchphrase_stems = Ngram(j.at("catchphrase_stems").get<std::string>());
        const auto cls = parse_class(j.at("class"));
        if (!cls) throw ParseError(lineno, "class", "unknown class");
        t.cls = *cls;
        t.exclusive_stems = j.at("exclusive_stems").get<std::vector<std::string>>();
        t.foundational = j.at("foundational").get<std::vector<std::string>>();
        t.weights = j.at("weights").get<std::vector<double>>();
        t.controls = j.at("controls").get<std::vector<std::string>>();
        t.peripheral = j.at("peripheral").get<std::vector<std::string>>();
        t.review = j.at("review");
        t.first_year = j.at("first_year");
        t.hidden_indirect = j.at("hidden_indirect");
        t.scaling_c = j.at("scaling_c");
        t.scaling_h = j.at("scaling_h");
        g.topics.push_back(std::move(t));
      } else if (kind == "year") {
        const std::size_t topic = j.at("topic");
        if (g.topics.empty() || g.topics.back().index != topic) throw ParseError(lineno, "topic", "year before its topic");
        const int year = j.at("year");
        YearCounts c{j.at("n_both"), j.at("n_cite_only"), j.at("n_mention_only")};
        g.topics.back().by_year[year] = c;
        if (j.contains("p_cite_given_mention")) g.topics.back().planted_p[year] = j.at("p_cite_given_mention");
      } else if (kind == "attribution") {
        g.hidden_attribution[j.at("paper_id")] = j.at("h");
      } else {
        throw ParseError(lineno, "kind", "unknown record kind " + kind);
      }
    } catch (const json::exception& e) {
      throw ParseError(lineno, "record", e.what());
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Generation

namespace detail {

/// Pronounceable pseudo-words with pairwise distinct stems, none a stopword.
class WordFactory {
 public:
  WordFactory(Rng& rng, const TextNormalizer& norm) : rng_(rng), norm_(norm) {}

  std::string make() {
    static constexpr const char* kOnset = "bdfgklmnprstvz";
    static constexpr const char* kVowel = "aeiou";
    static constexpr const char* kCoda = "nrlkm";
    for (;;) {
      std::string w;
      const std::size_t syllables = 2 + rng_.below(2);
      for (std::size_t i = 0; i < syllables; ++i) {
        w.push_back(kOnset[rng_.below(14)]);
        w.push_back(kVowel[rng_.below(5)]);
      }
      if (rng_.bernoulli(0.5)) w.push_back(kCoda[rng_.below(5)]);
      if (norm_.is_stopword(w)) continue;
      const auto toks = norm_.tokenize_and_stem(w);
      if (toks.size() != 1 || toks[0].size() < 3 || !used_.insert(toks[0]).second) continue;
      return w;
    }
  }

  std::string stem(const std::string& w) const { return norm_.tokenize_and_stem(w).at(0); }

 private:
  Rng& rng_;
  const TextNormalizer& norm_;
  std::unordered_set<std::string> used_;
};

inline std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

inline std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

inline std::string two_digits(std::size_t v, int width) {
  std::string s = std::to_string(v);
  if (s.size() < static_cast<std::size_t>(width)) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  return s;
}

inline bool contains_sequence(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) return true;
  }
  return false;
}

struct Follower {
  std::size_t paper = 0;  // index into the paper vector
  int year = 0;
  int lag = 0;
  bool cites = false;
  bool mentions = false;
  std::size_t foundational = 0;  // which foundational paper is cited, when cites
  bool indirect = false;
};

/// Re-derives every planted count from the emitted records alone.
inline void self_check(const Corpus& corpus, const GroundTruth& g, const TextNormalizer& norm) {
  auto fail = [](const std::string& what) { throw Error("synthetic self-check failed: " + what); };
  std::unordered_map<std::string, std::vector<std::string>> stems_of;
  for (const auto& p : corpus.papers()) stems_of[p.paper_id] = norm.tokenize_and_stem(p.full_text.value_or(""));
  for (const auto& t : g.topics) {
    const std::set<std::string> found(t.foundational.begin(), t.foundational.end());
    const auto needle = t.catchphrase_stems.stems();
    auto cites = [&](const PaperRecord& p) {
      return std::any_of(p.references.begin(), p.references.end(), [&](const std::string& r) { return found.count(r) > 0; });
    };
    std::map<int, YearCounts> seen;
    std::size_t indirect = 0;
    for (const auto& p : corpus.papers()) {
      if (found.count(p.paper_id)) continue;
      const bool c = cites(p);
      const bool m = contains_sequence(stems_of.at(p.paper_id), needle);
      if (!c && !m) continue;
      seen[p.year].add({p.paper_id, t.index, c, m, p.year});
      if (m && !c) {
        const bool two = std::any_of(p.references.begin(), p.references.end(), [&](const std::string& r) {
          const PaperRecord* q = corpus.find(r);
          return q != nullptr && cites(*q);
        });
        if (two) ++indirect;
      }
    }
    std::map<int, YearCounts> planted;
    for (const auto& [y, c] : t.by_year)
      if (c.followers() > 0) planted[y] = c;
    if (seen != planted) fail("follower counts of topic " + std::to_string(t.index));
    if (indirect != t.hidden_indirect) fail("indirect count of topic " + std::to_string(t.index));
  }
  std::size_t omitted = 0, considered = 0;
  for (const auto& t : g.topics) {
    for (const auto& f : t.foundational) {
      const PaperRecord& p = corpus.at(f);
      ++considered;
      const bool in_title = contains_sequence(norm.tokenize_and_stem(p.title), t.catchphrase_stems.stems()) ||
                            contains_sequence(norm.tokenize_and_stem(p.abstract), t.catchphrase_stems.stems());
      if (!in_title) ++omitted;
    }
  }
  if (omitted != g.origin_omitted || considered != g.origin_considered) fail("catchphrase origin tally");
}

}  // namespace detail

/// Builds a corpus and its ground truth. Deterministic in the spec (seed
/// included). In exact mode every planted count is realized by rounding; in
/// sampled mode follower decisions are Bernoulli draws at the planted rates.
inline SyntheticCorpus generate(const GeneratorSpec& spec, const TextNormalizer& norm = default_normalizer()) {
  spec.validate();
  const bool exact = spec.mode == GenerationMode::Exact;
  Rng rng(derive_seed(spec.seed, "synthgen"));
  detail::WordFactory words(rng, norm);

  std::vector<std::string> background;
  for (std::size_t i = 0; i < spec.background_vocabulary; ++i) background.push_back(words.make());
  std::vector<std::string> surnames;
  for (std::size_t i = 0; i < 200; ++i) surnames.push_back(detail::capitalize(words.make()));

  auto bg_words = [&](std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(background[rng.below(background.size())]);
    return out;
  };
  auto authors = [&](std::size_t n) {
    std::vector<std::string> out;
    while (out.size() < n) {
      const auto& s = surnames[rng.below(surnames.size())];
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    }
    return out;
  };
  static const char* kDisciplines[] = {"hep", "cond", "quant", "astro", "other"};

  std::vector<PaperRecord> papers;
  std::vector<CitationContext> contexts;
  auto new_paper = [&](std::string id, int year, std::string discipline) {
    PaperRecord p;
    p.paper_id = std::move(id);
    p.year = year;
    p.venue = "Synthetic Letters";
    p.discipline = std::move(discipline);
    p.title = detail::join(bg_words(4));
    p.abstract = detail::join(bg_words(12));
    p.authors = authors(1 + rng.below(5));
    p.full_text = detail::join(bg_words(spec.full_text_words));
    papers.push_back(std::move(p));
    return papers.size() - 1;
  };
  auto cite = [&](std::size_t citing, const std::string& cited, std::optional<std::string> text) {
    auto& refs = papers[citing].references;
    if (std::find(refs.begin(), refs.end(), cited) != refs.end()) return false;
    refs.push_back(cited);
    if (text) contexts.push_back({papers[citing].paper_id, cited, std::move(*text)});
    return true;
  };

  GroundTruth truth;
  truth.seed = spec.seed;
  truth.mode = spec.mode;
  truth.scaling = spec.scaling;
  truth.scaling_exponent = spec.scaling ? spec.scaling_exponent : 0.0;
  for (const auto& w : background) truth.background_stems.push_back(words.stem(w));
  std::sort(truth.background_stems.begin(), truth.background_stems.end());

  std::vector<std::size_t> bg_papers;
  for (std::size_t i = 0; i < spec.background_papers; ++i) {
    const int year = spec.first_year_min - 10 + static_cast<int>(rng.below(10));
    bg_papers.push_back(new_paper("bg" + detail::two_digits(i, 4), std::max(year, 1800), "other"));
  }

  SyntheticCorpus out;
  std::vector<std::size_t> foundational_papers;  // across all topics, for the origin tally
  std::size_t eponym_papers_seen = 0, other_papers_seen = 0;

  for (std::size_t t = 0; t < spec.num_topics; ++t) {
    PlantedTopic topic;
    topic.index = t;
    const std::string tag = "t" + detail::two_digits(t, 2);
    const std::string discipline = kDisciplines[t % 5];
    topic.cls = t < spec.eponym_topics ? CatchphraseClass::Eponym
                : t >= spec.num_topics - spec.experiment_topics ? CatchphraseClass::Experiment
                                                                : CatchphraseClass::Other;

    // Vocabulary.
    const std::size_t len = spec.catchphrase_min_words + rng.below(spec.catchphrase_max_words - spec.catchphrase_min_words + 1);
    std::vector<std::string> phrase;
    std::string eponym;
    for (std::size_t i = 0; i < len; ++i) phrase.push_back(words.make());
    if (topic.cls == CatchphraseClass::Eponym) {
      eponym = detail::capitalize(phrase[0]);
      phrase[0] = eponym;
    }
    // Experiment names are hyphenated, like detector or survey names.
    topic.catchphrase = phrase[0];
    for (std::size_t i = 1; i < phrase.size(); ++i) {
      topic.catchphrase += (topic.cls == CatchphraseClass::Experiment ? "-" : " ") + phrase[i];
    }
    topic.catchphrase_stems = Ngram::from_text(topic.catchphrase, norm);
    std::vector<std::string> jargon;
    for (std::size_t i = 0; i < spec.exclusive_words; ++i) jargon.push_back(words.make());
    for (const auto& s : topic.catchphrase_stems.stems()) topic.exclusive_stems.push_back(s);
    for (const auto& w : jargon) topic.exclusive_stems.push_back(words.stem(w));
    std::sort(topic.exclusive_stems.begin(), topic.exclusive_stems.end());

    auto topic_context = [&] {
      std::vector<std::string> toks;
      for (std::size_t i = 0; i < spec.jargon_per_context; ++i) toks.push_back(jargon[rng.below(jargon.size())]);
      const std::size_t at = rng.below(toks.size() + 1);
      toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(at), topic.catchphrase);
      for (std::size_t i = 0; i < spec.background_per_context; ++i) {
        const std::size_t pos = rng.below(toks.size() + 1);
        toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(pos), background[rng.below(background.size())]);
      }
      return detail::join(toks);
    };
    auto bg_context = [&] { return detail::join(bg_words(spec.background_context_words)); };

    topic.first_year = spec.first_year_min + static_cast<int>(rng.below(
                                                 static_cast<std::uint64_t>(spec.first_year_max - spec.first_year_min + 1)));

    // Foundational papers, their controls, the review, peripheral papers.
    std::vector<std::size_t> found_idx, control_idx;
    double wsum = 0.0;
    for (std::size_t i = 0; i < spec.foundational_per_topic; ++i) {
      wsum += spec.foundational_weights.empty() ? 1.0 : spec.foundational_weights[i];
    }
    for (std::size_t i = 0; i < spec.foundational_per_topic; ++i) {
      const std::size_t f = new_paper(tag + "-f" + std::to_string(i), topic.first_year, discipline);
      std::size_t n_auth;
      if (topic.cls == CatchphraseClass::Eponym) {
        n_auth = exact ? 2 + (eponym_papers_seen++ % 2) : 1 + rng.below(4);
      } else {
        n_auth = exact ? 3 + (other_papers_seen++ % 6) : 3 + rng.below(6);
      }
      papers[f].authors = authors(n_auth);
      if (i == 0 && !eponym.empty()) papers[f].authors[0] = eponym;
      found_idx.push_back(f);
      topic.foundational.push_back(papers[f].paper_id);
      topic.weights.push_back((spec.foundational_weights.empty() ? 1.0 : spec.foundational_weights[i]) / wsum);
      const std::size_t c = new_paper(tag + "-c" + std::to_string(i), topic.first_year, discipline);
      control_idx.push_back(c);
      topic.controls.push_back(papers[c].paper_id);
      foundational_papers.push_back(f);
    }
    {
      const std::size_t r = new_paper(tag + "-r", topic.first_year, discipline);
      papers[r].is_book_or_review = true;
      topic.review = papers[r].paper_id;
    }
    std::vector<std::size_t> peripheral_idx;
    for (std::size_t i = 0; i < spec.peripheral_per_topic; ++i) {
      peripheral_idx.push_back(new_paper(tag + "-p" + detail::two_digits(i, 2), topic.first_year, discipline));
      topic.peripheral.push_back(papers[peripheral_idx.back()].paper_id);
    }

    // Planted per-lag counts.
    struct LagPlan {
      std::size_t both = 0, cite_only = 0, hidden = 0;
    };
    std::vector<LagPlan> plan(static_cast<std::size_t>(spec.horizon) + 1);
    if (spec.scaling) {
      const double lc = std::log(spec.scaling_c_min) + rng.uniform() * (std::log(spec.scaling_c_max) - std::log(spec.scaling_c_min));
      topic.scaling_c = std::exp(lc);
      topic.scaling_h = spec.scaling_prefactor * std::pow(topic.scaling_c, spec.scaling_exponent) *
                        std::exp(spec.scaling_noise_sd * rng.normal());
      const auto c = static_cast<std::size_t>(std::max(1.0, std::round(topic.scaling_c)));
      const auto h = static_cast<std::size_t>(std::max(1.0, std::round(topic.scaling_h)));
      const std::size_t both = (c + 1) / 2;
      const std::size_t lags = plan.size();
      for (std::size_t l = 0; l < lags; ++l) {
        auto share = [&](std::size_t n) { return n / lags + (l < n % lags ? 1 : 0); };
        plan[l] = {share(both), share(c - both), share(h)};
      }
    } else {
      for (int lag = 0; lag <= spec.horizon; ++lag) {
        const double p = spec.p_cite_at(lag);
        topic.planted_p[topic.first_year + lag] = p;
        LagPlan& lp = plan[static_cast<std::size_t>(lag)];
        lp.both = exact ? static_cast<std::size_t>(std::llround(static_cast<double>(spec.mentions_per_year) * p))
                        : rng.binomial(spec.mentions_per_year, p);
        lp.hidden = spec.mentions_per_year - lp.both;
        lp.cite_only = spec.cite_only_per_year;
      }
    }

    // Followers: explicit ones first so hidden followers can point at them.
    std::vector<detail::Follower> followers;
    std::vector<double> allocated(spec.foundational_per_topic, 0.0);
    auto pick_foundational = [&] {
      std::size_t best = 0;
      if (exact) {
        // Smooth weighted round-robin: the paper furthest behind its share.
        double total = 0.0;
        for (double a : allocated) total += a;
        double best_gap = -1e300;
        for (std::size_t i = 0; i < allocated.size(); ++i) {
          const double gap = topic.weights[i] * (total + 1.0) - allocated[i];
          if (gap > best_gap + 1e-12) {
            best_gap = gap;
            best = i;
          }
        }
      } else {
        double u = rng.uniform(), acc = 0.0;
        best = topic.weights.size() - 1;
        for (std::size_t i = 0; i < topic.weights.size(); ++i) {
          acc += topic.weights[i];
          if (u < acc) {
            best = i;
            break;
          }
        }
      }
      allocated[best] += 1.0;
      return best;
    };
    std::size_t serial = 0;
    for (int lag = 0; lag <= spec.horizon; ++lag) {
      const LagPlan& lp = plan[static_cast<std::size_t>(lag)];
      const int year = topic.first_year + lag;
      auto add = [&](char kind, bool cites, bool mentions) {
        const std::size_t idx =
            new_paper(tag + "-" + detail::two_digits(static_cast<std::size_t>(lag), 2) + "-" + kind + detail::two_digits(serial++, 4),
                      year, discipline);
        detail::Follower f;
        f.paper = idx;
        f.year = year;
        f.lag = lag;
        f.cites = cites;
        f.mentions = mentions;
        followers.push_back(f);
      };
      for (std::size_t i = 0; i < lp.both; ++i) add('b', true, true);
      for (std::size_t i = 0; i < lp.cite_only; ++i) add('c', true, false);
      for (std::size_t i = 0; i < lp.hidden; ++i) add('h', false, true);
    }

    std::vector<std::size_t> explicit_followers, mentioning;
    for (std::size_t i = 0; i < followers.size(); ++i) {
      if (followers[i].cites) explicit_followers.push_back(i);
      if (followers[i].mentions) mentioning.push_back(i);
    }
    if (explicit_followers.size() < spec.foundational_per_topic) {
      throw InvalidArgument("infeasible spec: topic " + std::to_string(t) + " has fewer citing followers than foundational papers");
    }

    // Indirect flags per lag.
    {
      std::map<int, std::vector<std::size_t>> hidden_by_lag;
      for (std::size_t i = 0; i < followers.size(); ++i)
        if (!followers[i].cites) hidden_by_lag[followers[i].lag].push_back(i);
      for (auto& [lag, ids] : hidden_by_lag) {
        const double q = spec.indirect_at(lag);
        if (exact) {
          const auto k = static_cast<std::size_t>(std::llround(q * static_cast<double>(ids.size())));
          for (std::size_t j = 0; j < k; ++j) followers[ids[j]].indirect = true;
        } else {
          for (std::size_t id : ids) followers[id].indirect = rng.bernoulli(q);
        }
      }
    }

    for (auto& f : followers) {
      const std::size_t p = f.paper;
      if (f.mentions) {
        auto toks = bg_words(spec.full_text_words);
        const std::size_t at = rng.below(toks.size() + 1);
        toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(at), topic.catchphrase);
        papers[p].full_text = detail::join(toks);
      }
      if (f.cites) {
        f.foundational = pick_foundational();
        cite(p, topic.foundational[f.foundational], topic_context());
        cite(p, topic.controls[f.foundational], bg_context());
      } else {
        cite(p, topic.review, topic_context());
        if (f.indirect) {
          // An explicit follower published no later than this one when possible.
          std::vector<std::size_t> pool;
          for (std::size_t e : explicit_followers)
            if (followers[e].year <= f.year) pool.push_back(e);
          if (pool.empty()) pool = explicit_followers;
          cite(p, papers[followers[pool[rng.below(pool.size())]].paper].paper_id, std::nullopt);
        }
      }
      cite(p, papers[bg_papers[rng.below(bg_papers.size())]].paper_id, bg_context());
    }
    if (!mentioning.empty()) {
      for (std::size_t j = 0; j < peripheral_idx.size(); ++j) {
        for (std::size_t c = 0; c < spec.peripheral_citations; ++c) {
          for (int attempt = 0; attempt < 8; ++attempt) {
            const std::size_t p = followers[mentioning[rng.below(mentioning.size())]].paper;
            if (cite(p, papers[peripheral_idx[j]].paper_id, topic_context())) break;
          }
        }
      }
    }

    for (const auto& f : followers) {
      topic.by_year[f.year].add({papers[f.paper].paper_id, t, f.cites, f.mentions, f.year});
      if (!f.cites && f.indirect) ++topic.hidden_indirect;
    }
    const double h = static_cast<double>(topic.totals().hidden());
    for (std::size_t i = 0; i < topic.foundational.size(); ++i) {
      truth.hidden_attribution[topic.foundational[i]] += h * topic.weights[i];
    }
    if (topic.cls == CatchphraseClass::Experiment) {
      out.override_lines.emplace_back(topic.catchphrase, CatchphraseClass::Experiment);
      out.label_overrides[topic.catchphrase_stems] = CatchphraseClass::Experiment;
    }
    truth.topics.push_back(std::move(topic));
  }

  // Catchphrase placement in foundational titles.
  {
    std::vector<std::size_t> order(foundational_papers.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    const auto omit = static_cast<std::size_t>(
        std::llround(spec.origin_omit_fraction * static_cast<double>(foundational_papers.size())));
    std::size_t i = 0;
    for (const auto& topic : truth.topics) {
      for (const auto& fid : topic.foundational) {
        (void)fid;
        const std::size_t rank = std::find(order.begin(), order.end(), i) - order.begin();
        const bool omitted = exact ? rank < omit : rng.bernoulli(spec.origin_omit_fraction);
        if (!omitted) {
          PaperRecord& p = papers[foundational_papers[i]];
          p.title = p.title + " " + topic.catchphrase;
        } else {
          ++truth.origin_omitted;
        }
        ++truth.origin_considered;
        ++i;
      }
    }
  }

  out.corpus = Corpus(std::move(papers), std::move(contexts));
  out.truth = std::move(truth);
  detail::self_check(out.corpus, out.truth, norm);
  return out;
}

/// Detected profiles scored against the planted topics. A planted
/// (catchphrase, foundational paper) pair counts as recovered when one
/// profile lists both. A detected catchphrase is false when it carries no
/// topic-exclusive stem, mixes stems of two topics, or sits in a profile
/// none of whose foundational papers belongs to its topic.
struct RecoveryScore {
  std::size_t planted_pairs = 0;
  std::size_t recovered_pairs = 0;
  std::vector<std::string> false_catchphrases;  // "topic_id:ngram"

  double recovery_rate() const {
    return planted_pairs == 0 ? 0.0 : static_cast<double>(recovered_pairs) / static_cast<double>(planted_pairs);
  }
};

inline RecoveryScore score_recovery(const std::vector<TopicProfile>& profiles, const GroundTruth& truth) {
  std::unordered_map<std::string, std::size_t> stem_topic, paper_topic;
  for (const auto& t : truth.topics) {
    for (const auto& s : t.exclusive_stems) stem_topic[s] = t.index;
    for (const auto& f : t.foundational) paper_topic[f] = t.index;
  }
  RecoveryScore score;
  for (const auto& t : truth.topics) {
    for (const auto& f : t.foundational) {
      ++score.planted_pairs;
      const bool hit = std::any_of(profiles.begin(), profiles.end(), [&](const TopicProfile& p) {
        if (!p.is_foundational(f)) return false;
        return std::any_of(p.catchphrases.begin(), p.catchphrases.end(),
                           [&](const ScoredNgram& c) { return c.ngram == t.catchphrase_stems; });
      });
      if (hit) ++score.recovered_pairs;
    }
  }
  for (const auto& p : profiles) {
    std::set<std::size_t> profile_topics;
    for (const auto& f : p.foundational_papers)
      if (auto it = paper_topic.find(f.paper_id); it != paper_topic.end()) profile_topics.insert(it->second);
    for (const auto& c : p.catchphrases) {
      std::set<std::size_t> owners;
      for (const auto& s : c.ngram.stems())
        if (auto it = stem_topic.find(s); it != stem_topic.end()) owners.insert(it->second);
      const bool ok = owners.size() == 1 && profile_topics.count(*owners.begin()) > 0;
      if (!ok) score.false_catchphrases.push_back(std::to_string(p.topic_id) + ":" + c.ngram.str());
    }
  }
  return score;
}

inline void write_label_overrides(std::ostream& out, const SyntheticCorpus& s) {
  out << "# catchphrase<TAB>class\n";
  for (const auto& [phrase, cls] : s.override_lines) out << phrase << '\t' << to_string(cls) << '\n';
}

/// corpus.jsonl, truth.jsonl and labels.tsv under `dir`.
inline void write_synthetic(const SyntheticCorpus& s, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw IoError("cannot write " + (fs::path(dir) / name).string());
    return f;
  };
  {
    auto f = open("corpus.jsonl");
    write_corpus(f, s.corpus);
  }
  {
    auto f = open("truth.jsonl");
    write_truth(f, s.truth);
  }
  {
    auto f = open("labels.tsv");
    write_label_overrides(f, s);
  }
}

}  // namespace oblit
