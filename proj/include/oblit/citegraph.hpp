#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "oblit/corpus.hpp"
#include "oblit/csv.hpp"
#include "oblit/detector.hpp"
#include "oblit/error.hpp"
#include "oblit/tabulator.hpp"

namespace oblit {

/// Directed citing -> cited graph over the papers of a corpus. References to
/// papers outside the corpus are dropped here but stay on the PaperRecord.
class CitationGraph {
 public:
  CitationGraph() = default;

  explicit CitationGraph(const Corpus& corpus) {
    for (const auto& p : corpus.papers()) ids_.push_back(p.paper_id);
    std::sort(ids_.begin(), ids_.end());
    for (std::uint32_t i = 0; i < ids_.size(); ++i) index_.emplace(ids_[i], i);
    out_.resize(ids_.size());
    in_.resize(ids_.size());
    for (const auto& p : corpus.papers()) {
      const std::uint32_t u = index_.at(p.paper_id);
      for (const auto& r : p.references) {
        auto it = index_.find(r);
        if (it == index_.end() || it->second == u) continue;
        out_[u].push_back(it->second);
      }
    }
    for (std::uint32_t u = 0; u < out_.size(); ++u) {
      auto& adj = out_[u];
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
      for (std::uint32_t v : adj) in_[v].push_back(u);
    }
  }

  std::size_t size() const noexcept { return ids_.size(); }
  const std::string& id(std::uint32_t node) const { return ids_[node]; }
  std::optional<std::uint32_t> node(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? std::nullopt : std::optional<std::uint32_t>(it->second);
  }
  const std::vector<std::uint32_t>& references(std::uint32_t node) const { return out_[node]; }
  const std::vector<std::uint32_t>& cited_by(std::uint32_t node) const { return in_[node]; }
  std::size_t in_degree(std::uint32_t node) const { return in_[node].size(); }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& a : out_) n += a.size();
    return n;
  }

  friend bool operator==(const CitationGraph& a, const CitationGraph& b) {
    return a.ids_ == b.ids_ && a.out_ == b.out_;
  }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::vector<std::uint32_t>> out_, in_;
};

/// Length of the shortest reference chain from `source` to any target, if
/// one of length 1..max_depth exists. Breadth-first, each node visited once.
inline std::optional<int> shortest_citation_path(const CitationGraph& graph, const std::string& source,
                                                 const std::unordered_set<std::string>& targets, int max_depth) {
  const auto src = graph.node(source);
  if (!src) throw InvalidArgument("source paper not in citation graph: " + source);
  std::vector<char> is_target(graph.size(), 0);
  bool any = false;
  for (const auto& t : targets) {
    if (auto n = graph.node(t)) {
      is_target[*n] = 1;
      any = true;
    }
  }
  if (!any || max_depth < 1) return std::nullopt;
  std::vector<char> seen(graph.size(), 0);
  seen[*src] = 1;
  std::vector<std::uint32_t> frontier{*src}, next;
  for (int depth = 1; depth <= max_depth && !frontier.empty(); ++depth) {
    next.clear();
    for (std::uint32_t u : frontier) {
      for (std::uint32_t v : graph.references(u)) {
        if (is_target[v]) return depth;
        if (!seen[v]) {
          seen[v] = 1;
          next.push_back(v);
        }
      }
    }
    frontier.swap(next);
  }
  return std::nullopt;
}

inline std::unordered_set<std::string> foundational_set(const TopicProfile& profile) {
  std::unordered_set<std::string> s;
  for (const auto& f : profile.foundational_papers) s.insert(f.paper_id);
  return s;
}

/// Hidden citations of one topic bucketed by shortest path to the
/// foundational set: by_length[L] for L in 2..max_depth, and `beyond` for
/// longer or no path.
struct PathHistogram {
  std::size_t topic_id = 0;
  int max_depth = 4;
  std::vector<std::size_t> by_length;  // size max_depth + 1; entries 0 and 1 stay zero
  std::size_t beyond = 0;

  std::size_t total() const {
    std::size_t n = beyond;
    for (std::size_t c : by_length) n += c;
    return n;
  }
  std::size_t at(int length) const { return by_length.at(static_cast<std::size_t>(length)); }
};

/// Shortest path for every hidden follower (paper id -> length).
inline std::map<std::string, std::optional<int>> hidden_path_lengths(const CitationGraph& graph,
                                                                     const FollowerTable& table,
                                                                     const TopicProfile& profile, int max_depth) {
  const auto targets = foundational_set(profile);
  std::map<std::string, std::optional<int>> out;
  for (const auto& r : table.followers) {
    if (r.hidden()) out[r.paper_id] = shortest_citation_path(graph, r.paper_id, targets, max_depth);
  }
  return out;
}

inline PathHistogram path_histogram(const CitationGraph& graph, const FollowerTable& table,
                                    const TopicProfile& profile, int max_depth = 4) {
  if (max_depth < 2) throw InvalidArgument("max_depth must be >= 2");
  PathHistogram h;
  h.topic_id = profile.topic_id;
  h.max_depth = max_depth;
  h.by_length.assign(static_cast<std::size_t>(max_depth) + 1, 0);
  for (const auto& [id, len] : hidden_path_lengths(graph, table, profile, max_depth)) {
    if (!len) {
      ++h.beyond;
    } else if (*len < 2) {
      throw InvalidArgument("hidden citation " + id + " cites a foundational paper of topic " +
                            std::to_string(profile.topic_id));
    } else {
      ++h.by_length[static_cast<std::size_t>(*len)];
    }
  }
  return h;
}

/// (n_both + hidden citations at path length exactly 2) / mentions, at one lag.
inline double indirect_adjusted_p(const FollowerTable& table, const CitationGraph& graph,
                                  const TopicProfile& profile, int lag) {
  const int year = table.first_foundational_year + lag;
  const YearCounts c = table.at_lag(lag);
  if (c.mentions() == 0) {
    throw InvalidArgument("topic " + std::to_string(table.topic_id) + " has no mentions at lag " + std::to_string(lag));
  }
  const auto targets = foundational_set(profile);
  std::size_t indirect = 0;
  for (const auto& r : table.followers) {
    if (r.year != year || !r.hidden()) continue;
    const auto len = shortest_citation_path(graph, r.paper_id, targets, 2);
    if (len && *len == 2) ++indirect;
  }
  return static_cast<double>(c.n_both + indirect) / static_cast<double>(c.mentions());
}

struct Alternative {
  std::string paper_id;
  std::size_t cocitations = 0;
  std::optional<int> path_to_foundational;
};

/// Papers most often cited by the topic's hidden citations, foundational
/// papers excluded. Each citing paper counts once per alternative; ties go
/// to the smaller paper id.
inline std::vector<Alternative> top_alternatives(const CitationGraph& graph, const FollowerTable& table,
                                                 const TopicProfile& profile, std::size_t k, int max_depth = 4) {
  const auto targets = foundational_set(profile);
  std::map<std::uint32_t, std::size_t> counts;
  for (const auto& r : table.followers) {
    if (!r.hidden()) continue;
    const auto u = graph.node(r.paper_id);
    if (!u) continue;
    for (std::uint32_t v : graph.references(*u)) {
      if (!targets.count(graph.id(v))) ++counts[v];
    }
  }
  std::vector<Alternative> all;
  all.reserve(counts.size());
  for (const auto& [node, n] : counts) all.push_back({graph.id(node), n, std::nullopt});
  std::sort(all.begin(), all.end(), [](const Alternative& a, const Alternative& b) {
    return a.cocitations != b.cocitations ? a.cocitations > b.cocitations : a.paper_id < b.paper_id;
  });
  if (all.size() > k) all.resize(k);
  for (auto& a : all) a.path_to_foundational = shortest_citation_path(graph, a.paper_id, targets, max_depth);
  return all;
}

inline void write_path_histograms(std::ostream& out, const std::vector<PathHistogram>& hs) {
  csv::Writer w(out, {"topic_id", "path_length", "hidden_citations"});
  for (const auto& h : hs) {
    for (int len = 2; len <= h.max_depth; ++len) w.row(h.topic_id, std::to_string(len), h.at(len));
    w.row(h.topic_id, ">" + std::to_string(h.max_depth) + "-or-none", h.beyond);
  }
}

}  // namespace oblit
