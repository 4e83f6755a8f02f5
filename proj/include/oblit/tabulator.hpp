#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "oblit/corpus.hpp"
#include "oblit/csv.hpp"
#include "oblit/detector.hpp"
#include "oblit/error.hpp"
#include "oblit/mention_index.hpp"
#include "oblit/parallel.hpp"
#include "oblit/topicmodel.hpp"

namespace oblit {

/// A paper that cites a topic's foundational papers, mentions one of its
/// catchphrases, or both.
struct FollowerRecord {
  std::string paper_id;
  std::size_t topic_id = 0;
  bool cites = false;
  bool mentions = false;
  int year = 0;

  bool hidden() const noexcept { return mentions && !cites; }

  friend bool operator==(const FollowerRecord&, const FollowerRecord&) = default;
};

struct YearCounts {
  std::size_t n_both = 0;
  std::size_t n_cite_only = 0;
  std::size_t n_mention_only = 0;

  std::size_t citations() const noexcept { return n_both + n_cite_only; }  // c
  std::size_t hidden() const noexcept { return n_mention_only; }           // h
  std::size_t mentions() const noexcept { return n_both + n_mention_only; }  // m
  std::size_t followers() const noexcept { return n_both + n_cite_only + n_mention_only; }

  void add(const FollowerRecord& r) {
    if (r.cites && r.mentions) {
      ++n_both;
    } else if (r.cites) {
      ++n_cite_only;
    } else if (r.mentions) {
      ++n_mention_only;
    }
  }

  YearCounts& operator+=(const YearCounts& o) {
    n_both += o.n_both;
    n_cite_only += o.n_cite_only;
    n_mention_only += o.n_mention_only;
    return *this;
  }

  friend bool operator==(const YearCounts&, const YearCounts&) = default;
};

/// Per-year follower counts of one topic, with the records behind them.
struct FollowerTable {
  std::size_t topic_id = 0;
  int first_foundational_year = 0;
  std::map<int, YearCounts> by_year;
  std::vector<FollowerRecord> followers;  // sorted by paper_id

  static FollowerTable from_records(std::size_t topic_id, int first_year, std::vector<FollowerRecord> records) {
    FollowerTable t;
    t.topic_id = topic_id;
    t.first_foundational_year = first_year;
    std::sort(records.begin(), records.end(),
              [](const FollowerRecord& a, const FollowerRecord& b) { return a.paper_id < b.paper_id; });
    for (const auto& r : records) t.by_year[r.year].add(r);
    t.followers = std::move(records);
    return t;
  }

  YearCounts totals() const {
    YearCounts sum;
    for (const auto& [y, c] : by_year) sum += c;
    return sum;
  }

  YearCounts range(int lo, int hi) const {
    YearCounts sum;
    for (auto it = by_year.lower_bound(lo); it != by_year.end() && it->first <= hi; ++it) sum += it->second;
    return sum;
  }

  YearCounts at_lag(int lag) const {
    auto it = by_year.find(first_foundational_year + lag);
    return it == by_year.end() ? YearCounts{} : it->second;
  }
};

/// Papers whose full text contains any catchphrase of the profile.
inline std::unordered_set<std::string> mentioning_papers(const TopicProfile& profile, const MentionIndex& index) {
  std::unordered_set<std::string> out;
  for (const auto& c : profile.catchphrases) {
    const auto* papers = index.papers_for(c.ngram);
    if (papers == nullptr) {
      throw InvalidArgument("catchphrase \"" + c.ngram.str() + "\" of topic " + std::to_string(profile.topic_id) +
                            " is missing from the mention index");
    }
    out.insert(papers->begin(), papers->end());
  }
  return out;
}

/// Classifies every non-foundational paper against one topic.
inline std::vector<FollowerRecord> classify_followers(const TopicProfile& profile, const Corpus& corpus,
                                                      const MentionIndex& index) {
  const auto mentioning = mentioning_papers(profile, index);
  std::unordered_set<std::string> foundational;
  for (const auto& f : profile.foundational_papers) foundational.insert(f.paper_id);

  std::vector<FollowerRecord> out;
  for (const auto& p : corpus.papers()) {
    if (foundational.count(p.paper_id)) continue;
    const bool cites = std::any_of(p.references.begin(), p.references.end(),
                                   [&](const std::string& r) { return foundational.count(r) > 0; });
    const bool mentions = mentioning.count(p.paper_id) > 0;
    if (cites || mentions) out.push_back({p.paper_id, profile.topic_id, cites, mentions, p.year});
  }
  return out;
}

inline std::vector<FollowerTable> tabulate(const std::vector<TopicProfile>& profiles, const Corpus& corpus,
                                           const MentionIndex& index, unsigned threads = default_threads()) {
  std::vector<FollowerTable> out(profiles.size());
  parallel_for(profiles.size(), threads, [&](std::size_t i) {
    out[i] = FollowerTable::from_records(profiles[i].topic_id, profiles[i].first_foundational_year,
                                         classify_followers(profiles[i], corpus, index));
  });
  return out;
}

/// h / (h + c) over years >= since_year.
inline double hidden_fraction(const FollowerTable& table, int since_year) {
  const YearCounts c = table.range(since_year, std::numeric_limits<int>::max());
  if (c.followers() == 0) {
    throw InvalidArgument("topic " + std::to_string(table.topic_id) + " has no followers since " +
                          std::to_string(since_year));
  }
  return static_cast<double>(c.hidden()) / static_cast<double>(c.hidden() + c.citations());
}

/// n_both / m with its binomial half-width, over an inclusive year range.
inline Estimate p_cite_given_mention(const FollowerTable& table,
                                     std::optional<std::pair<int, int>> years = std::nullopt) {
  const YearCounts c = years ? table.range(years->first, years->second) : table.totals();
  if (c.mentions() == 0) throw InvalidArgument("topic " + std::to_string(table.topic_id) + " has no mentions in range");
  return proportion_estimate(static_cast<double>(c.n_both), static_cast<double>(c.mentions()));
}

enum class DecayAggregation { PerTopicMean, Pooled };

struct DecayPoint {
  int lag = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double halfwidth = std::numeric_limits<double>::quiet_NaN();
  std::size_t topics = 0;   // topics with at least one mention at this lag
  bool ci_defined = false;  // false with fewer than two topics (per-topic mode) or no data
};

/// p(cite|mention) against years since each topic's first foundational
/// paper. Per-topic mode averages per-topic proportions with a
/// 1.96 x standard-error interval across topics.
inline std::vector<DecayPoint> temporal_decay(const std::vector<FollowerTable>& tables, int horizon_years,
                                              DecayAggregation mode = DecayAggregation::PerTopicMean) {
  if (horizon_years < 0) throw InvalidArgument("horizon must be >= 0");
  std::vector<DecayPoint> out;
  for (int lag = 0; lag <= horizon_years; ++lag) {
    DecayPoint pt;
    pt.lag = lag;
    std::vector<double> ps;
    std::size_t both = 0, mentions = 0;
    for (const auto& t : tables) {
      const YearCounts c = t.at_lag(lag);
      if (c.mentions() == 0) continue;
      ps.push_back(static_cast<double>(c.n_both) / static_cast<double>(c.mentions()));
      both += c.n_both;
      mentions += c.mentions();
    }
    pt.topics = ps.size();
    if (lag == 0 && ps.empty()) throw InvalidArgument("no topic has mentions at lag 0");
    if (!ps.empty()) {
      if (mode == DecayAggregation::Pooled) {
        const Estimate e = proportion_estimate(static_cast<double>(both), static_cast<double>(mentions));
        pt.mean = e.estimate;
        pt.halfwidth = e.halfwidth;
        pt.ci_defined = true;
      } else {
        double sum = 0.0;
        for (double p : ps) sum += p;
        pt.mean = sum / static_cast<double>(ps.size());
        if (ps.size() >= 2) {
          double ss = 0.0;
          for (double p : ps) ss += (p - pt.mean) * (p - pt.mean);
          const double sd = std::sqrt(ss / static_cast<double>(ps.size() - 1));
          pt.halfwidth = 1.96 * sd / std::sqrt(static_cast<double>(ps.size()));
          pt.ci_defined = true;
        }
      }
    }
    out.push_back(pt);
  }
  return out;
}

inline void write_follower_series(std::ostream& out, const std::vector<FollowerTable>& tables) {
  csv::Writer w(out, {"topic_id", "year", "n_both", "n_cite_only", "n_mention_only"});
  for (const auto& t : tables)
    for (const auto& [year, c] : t.by_year) w.row(t.topic_id, year, c.n_both, c.n_cite_only, c.n_mention_only);
}

inline void write_decay(std::ostream& out, const std::vector<DecayPoint>& series) {
  csv::Writer w(out, {"lag", "mean_p_cite_given_mention", "ci_halfwidth", "topics", "ci_defined"});
  for (const auto& p : series) w.row(p.lag, p.mean, p.halfwidth, p.topics, p.ci_defined);
}

// Follower record artifact: versioned, tab-separated.

inline constexpr const char* kFollowersMagic = "oblit-followers";
inline constexpr int kFollowersVersion = 1;

inline void write_followers(std::ostream& out, const std::vector<FollowerTable>& tables) {
  out << kFollowersMagic << '\t' << kFollowersVersion << '\n';
  for (const auto& t : tables) {
    out << "topic\t" << t.topic_id << '\t' << t.first_foundational_year << '\n';
    for (const auto& r : t.followers) {
      out << "follower\t" << r.paper_id << '\t' << r.cites << '\t' << r.mentions << '\t' << r.year << '\n';
    }
  }
}

inline std::vector<FollowerTable> read_followers(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw StageError("empty followers file");
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != kFollowersMagic) throw StageError("not a followers file");
    if (version != kFollowersVersion) {
      throw StageError("followers version " + std::to_string(version) + " does not match expected " +
                       std::to_string(kFollowersVersion));
    }
  }
  struct Pending {
    std::size_t topic;
    int first_year;
    std::vector<FollowerRecord> records;
  };
  std::vector<Pending> pending;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string kind;
    std::getline(ss, kind, '\t');
    if (kind == "topic") {
      Pending p{};
      ss >> p.topic >> p.first_year;
      if (!ss) throw ParseError(lineno, "topic", "malformed");
      pending.push_back(std::move(p));
    } else if (kind == "follower") {
      if (pending.empty()) throw ParseError(lineno, "follower", "record before its topic");
      FollowerRecord r;
      std::getline(ss, r.paper_id, '\t');
      int cites = 0, mentions = 0;
      ss >> cites >> mentions >> r.year;
      if (!ss) throw ParseError(lineno, "follower", "malformed");
      r.topic_id = pending.back().topic;
      r.cites = cites != 0;
      r.mentions = mentions != 0;
      pending.back().records.push_back(std::move(r));
    } else {
      throw ParseError(lineno, "kind", "unknown record kind " + kind);
    }
  }
  std::vector<FollowerTable> out;
  for (auto& p : pending) out.push_back(FollowerTable::from_records(p.topic, p.first_year, std::move(p.records)));
  return out;
}

}  // namespace oblit
