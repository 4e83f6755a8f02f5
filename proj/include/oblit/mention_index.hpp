#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "oblit/corpus.hpp"
#include "oblit/error.hpp"
#include "oblit/ngram.hpp"
#include "oblit/parallel.hpp"
#include "oblit/text.hpp"

namespace oblit {

/// Aho-Corasick automaton over stem tokens. Finds every pattern occurring
/// contiguously in a token stream in one pass, including patterns nested
/// inside longer ones.
class PhraseMatcher {
 public:
  explicit PhraseMatcher(const std::vector<Ngram>& patterns) : patterns_(patterns) {
    nodes_.emplace_back();
    for (std::size_t p = 0; p < patterns_.size(); ++p) {
      const auto stems = patterns_[p].stems();
      if (stems.empty()) throw InvalidArgument("empty pattern");
      std::int32_t cur = 0;
      for (const auto& s : stems) {
        auto [tok, inserted] = alphabet_.emplace(s, static_cast<std::int32_t>(alphabet_.size()));
        auto& next = nodes_[cur].next;
        auto it = next.find(tok->second);
        if (it == next.end()) {
          nodes_.emplace_back();
          it = nodes_[cur].next.emplace(tok->second, static_cast<std::int32_t>(nodes_.size() - 1)).first;
        }
        cur = it->second;
      }
      nodes_[cur].out.push_back(p);
    }
    build_links();
  }

  std::size_t size() const noexcept { return patterns_.size(); }
  const Ngram& pattern(std::size_t i) const { return patterns_[i]; }

  /// Sorted, distinct indices of patterns present in `stems`.
  std::vector<std::size_t> find_all(const std::vector<std::string>& stems) const {
    std::vector<std::size_t> hits;
    std::int32_t state = 0;
    for (const auto& s : stems) {
      auto tok = alphabet_.find(s);
      if (tok == alphabet_.end()) {
        state = 0;
        continue;
      }
      state = step(state, tok->second);
      const auto& out = nodes_[state].out;
      hits.insert(hits.end(), out.begin(), out.end());
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    return hits;
  }

 private:
  struct Node {
    std::map<std::int32_t, std::int32_t> next;
    std::int32_t fail = 0;
    std::vector<std::size_t> out;  // patterns ending here, including via fail links
  };

  std::int32_t step(std::int32_t state, std::int32_t tok) const {
    while (true) {
      const auto& next = nodes_[state].next;
      if (auto it = next.find(tok); it != next.end()) return it->second;
      if (state == 0) return 0;
      state = nodes_[state].fail;
    }
  }

  void build_links() {
    std::queue<std::int32_t> q;
    for (const auto& [tok, child] : nodes_[0].next) {
      nodes_[child].fail = 0;
      q.push(child);
    }
    while (!q.empty()) {
      const std::int32_t u = q.front();
      q.pop();
      for (const auto& [tok, child] : nodes_[u].next) {
        std::int32_t f = nodes_[u].fail;
        while (f != 0 && nodes_[f].next.count(tok) == 0) f = nodes_[f].fail;
        auto it = nodes_[f].next.find(tok);
        nodes_[child].fail = (it != nodes_[f].next.end() && it->second != child) ? it->second : 0;
        const auto& inherited = nodes_[nodes_[child].fail].out;
        nodes_[child].out.insert(nodes_[child].out.end(), inherited.begin(), inherited.end());
        q.push(child);
      }
    }
  }

  std::vector<Ngram> patterns_;
  std::unordered_map<std::string, std::int32_t> alphabet_;
  std::vector<Node> nodes_;
};

/// For each candidate n-gram, the papers whose full text contains it.
class MentionIndex {
 public:
  MentionIndex() = default;

  explicit MentionIndex(std::map<Ngram, std::vector<std::string>> entries) : entries_(std::move(entries)) {}

  /// nullptr if the n-gram was not part of the indexed vocabulary.
  const std::vector<std::string>* papers_for(const Ngram& w) const {
    auto it = entries_.find(w);
    return it == entries_.end() ? nullptr : &it->second;
  }

  bool contains(const Ngram& w) const { return entries_.count(w) > 0; }

  const std::map<Ngram, std::vector<std::string>>& entries() const noexcept { return entries_; }

  friend bool operator==(const MentionIndex&, const MentionIndex&) = default;

 private:
  std::map<Ngram, std::vector<std::string>> entries_;  // paper ids sorted
};

/// Scans every paper's full text once against the whole vocabulary. Papers
/// without full text are absent from every entry.
inline MentionIndex build_mention_index(const Corpus& corpus, const std::vector<Ngram>& vocabulary,
                                        const TextNormalizer& norm = default_normalizer(),
                                        unsigned threads = default_threads()) {
  if (vocabulary.empty()) throw InvalidArgument("mention index needs a nonempty vocabulary");
  std::vector<Ngram> patterns = vocabulary;
  std::sort(patterns.begin(), patterns.end());
  patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());
  const PhraseMatcher matcher(patterns);

  const auto& papers = corpus.papers();
  std::vector<std::vector<std::size_t>> hits(papers.size());
  parallel_for(papers.size(), threads, [&](std::size_t i) {
    if (papers[i].full_text) hits[i] = matcher.find_all(norm.tokenize_and_stem(*papers[i].full_text));
  });

  std::vector<std::vector<std::string>> lists(patterns.size());
  for (std::size_t i = 0; i < papers.size(); ++i) {
    for (std::size_t p : hits[i]) lists[p].push_back(papers[i].paper_id);
  }
  std::map<Ngram, std::vector<std::string>> entries;
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    std::sort(lists[p].begin(), lists[p].end());
    entries.emplace(patterns[p], std::move(lists[p]));
  }
  return MentionIndex(std::move(entries));
}

}  // namespace oblit
