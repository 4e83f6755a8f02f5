#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "oblit/corpus.hpp"
#include "oblit/error.hpp"
#include "oblit/topicmodel.hpp"

namespace oblit {

struct DetectorConfig {
  double p_th_catch = 0.95;
  double p_th_found = 0.05;

  void validate() const {
    if (!(p_th_catch > 0.0 && p_th_catch <= 1.0)) throw InvalidArgument("p_th_catch must be in (0, 1]");
    if (!(p_th_found > 0.0 && p_th_found <= 1.0)) throw InvalidArgument("p_th_found must be in (0, 1]");
  }
};

struct ScoredNgram {
  Ngram ngram;
  Estimate p;
};

struct ScoredPaper {
  std::string paper_id;
  Estimate p;
};

/// One detected topic: its catchphrases and foundational papers.
struct TopicProfile {
  std::size_t topic_id = 0;
  std::vector<ScoredNgram> catchphrases;        // estimate descending, then n-gram
  std::vector<ScoredPaper> foundational_papers;  // estimate descending, then paper id
  int first_foundational_year = 0;

  bool is_foundational(const std::string& id) const {
    return std::any_of(foundational_papers.begin(), foundational_papers.end(),
                       [&](const ScoredPaper& p) { return p.paper_id == id; });
  }
};

/// Thresholds compare point estimates: catchphrases need P(z|w) > p_th_catch,
/// foundational papers P(d|z) > p_th_found. Topics missing either side are
/// dropped.
inline std::vector<TopicProfile> detect_topics(const TopicModel& model, const Corpus& corpus,
                                               const DetectorConfig& config) {
  config.validate();
  const std::size_t K = model.num_topics();
  const std::size_t V = model.vocabulary().size();
  const std::size_t D = model.documents().size();

  std::vector<std::vector<ScoredNgram>> catch_by_topic(K);
  for (std::size_t w = 0; w < V; ++w) {
    const double n = static_cast<double>(model.ngram_total(w));
    if (n <= 0) continue;
    for (std::size_t z = 0; z < K; ++z) {
      const Estimate e = proportion_estimate(model.topic_word(z, w), n);
      if (e.estimate > config.p_th_catch) catch_by_topic[z].push_back({model.vocabulary()[w], e});
    }
  }

  std::vector<TopicProfile> out;
  for (std::size_t z = 0; z < K; ++z) {
    if (catch_by_topic[z].empty() || !(model.topic_total(z) > 0.0)) continue;
    TopicProfile prof;
    prof.topic_id = z;
    for (std::size_t d = 0; d < D; ++d) {
      const Estimate e = proportion_estimate(model.topic_doc(z, d), model.topic_total(z));
      if (e.estimate > config.p_th_found) prof.foundational_papers.push_back({model.documents()[d], e});
    }
    if (prof.foundational_papers.empty()) continue;
    prof.catchphrases = std::move(catch_by_topic[z]);
    std::sort(prof.catchphrases.begin(), prof.catchphrases.end(), [](const ScoredNgram& a, const ScoredNgram& b) {
      return a.p.estimate != b.p.estimate ? a.p.estimate > b.p.estimate : a.ngram < b.ngram;
    });
    std::sort(prof.foundational_papers.begin(), prof.foundational_papers.end(),
              [](const ScoredPaper& a, const ScoredPaper& b) {
                return a.p.estimate != b.p.estimate ? a.p.estimate > b.p.estimate : a.paper_id < b.paper_id;
              });
    prof.first_foundational_year = std::numeric_limits<int>::max();
    for (const auto& f : prof.foundational_papers) {
      prof.first_foundational_year = std::min(prof.first_foundational_year, corpus.at(f.paper_id).year);
    }
    out.push_back(std::move(prof));
  }
  return out;
}

/// Shannon entropy in bits of the distribution proportional to `counts`.
/// Zero counts contribute nothing.
template <typename Range>
double entropy_bits(const Range& counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  if (!(total > 0.0)) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / total;
    if (p > 0.0) h -= p * std::log2(p);
  }
  return std::max(0.0, h);
}

/// S(d|w): how spread an n-gram's co-occurrences are over cited papers.
inline double entropy_doc_given_ngram(const TopicModel& model, const Ngram& w) {
  const std::size_t wi = model.require_word(w);
  std::vector<std::uint64_t> counts;
  for (const auto& [d, c] : model.cooccurrence(wi)) counts.push_back(c);
  return entropy_bits(counts);
}

/// S(w|d): how spread a paper's co-occurrences are over n-grams.
inline double entropy_ngram_given_doc(const TopicModel& model, const std::string& d) {
  const std::size_t di = model.require_doc(d);
  std::vector<std::uint64_t> counts;
  for (std::size_t w = 0; w < model.vocabulary().size(); ++w) {
    for (const auto& [doc, c] : model.cooccurrence(w)) {
      if (doc == di) counts.push_back(c);
    }
  }
  return entropy_bits(counts);
}

// Profile export: one tab-separated record per line,
// topic_id, kind (catchphrase | foundational), value, estimate, halfwidth.
// A "topic" record carries first_foundational_year.

inline constexpr const char* kProfilesMagic = "oblit-profiles";
inline constexpr int kProfilesVersion = 1;

namespace detail {
inline std::string exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

inline void write_profiles(std::ostream& out, const std::vector<TopicProfile>& profiles) {
  out << kProfilesMagic << '\t' << kProfilesVersion << '\n';
  for (const auto& p : profiles) {
    out << p.topic_id << "\ttopic\t" << p.first_foundational_year << "\t0\t0\n";
    for (const auto& c : p.catchphrases) {
      out << p.topic_id << "\tcatchphrase\t" << c.ngram.str() << '\t' << detail::exact(c.p.estimate) << '\t'
          << detail::exact(c.p.halfwidth) << '\n';
    }
    for (const auto& f : p.foundational_papers) {
      out << p.topic_id << "\tfoundational\t" << f.paper_id << '\t' << detail::exact(f.p.estimate) << '\t'
          << detail::exact(f.p.halfwidth) << '\n';
    }
  }
}

inline std::vector<TopicProfile> read_profiles(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw StageError("empty profiles file");
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != kProfilesMagic) throw StageError("not a profiles file");
    if (version != kProfilesVersion) {
      throw StageError("profiles version " + std::to_string(version) + " does not match expected " +
                       std::to_string(kProfilesVersion));
    }
  }
  std::vector<TopicProfile> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f.size() != 5) throw ParseError(lineno, "record", "expected 5 tab-separated fields");
    const std::size_t topic = std::stoul(f[0]);
    if (f[1] == "topic") {
      TopicProfile p;
      p.topic_id = topic;
      p.first_foundational_year = std::stoi(f[2]);
      out.push_back(std::move(p));
      continue;
    }
    if (out.empty() || out.back().topic_id != topic) throw ParseError(lineno, "topic_id", "record before its topic");
    const Estimate e{std::stod(f[3]), std::stod(f[4])};
    if (f[1] == "catchphrase") {
      out.back().catchphrases.push_back({Ngram(f[2]), e});
    } else if (f[1] == "foundational") {
      out.back().foundational_papers.push_back({f[2], e});
    } else {
      throw ParseError(lineno, "kind", "unknown kind " + f[1]);
    }
  }
  return out;
}

}  // namespace oblit
