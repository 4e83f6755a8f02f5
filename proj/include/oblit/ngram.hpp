#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "oblit/corpus.hpp"
#include "oblit/error.hpp"
#include "oblit/text.hpp"

namespace oblit {

/// A phrase of one or more word stems, identified by its space-joined form.
class Ngram {
 public:
  Ngram() = default;

  explicit Ngram(std::string canonical) : text_(std::move(canonical)) {}

  static Ngram from_stems(const std::vector<std::string>& stems) {
    std::string s;
    for (std::size_t i = 0; i < stems.size(); ++i) {
      if (i) s.push_back(' ');
      s += stems[i];
    }
    return Ngram(std::move(s));
  }

  /// Normalizes raw text the same way citation contexts are normalized.
  static Ngram from_text(std::string_view raw, const TextNormalizer& norm = default_normalizer()) {
    return from_stems(norm.tokenize_and_stem(raw));
  }

  const std::string& str() const noexcept { return text_; }

  std::vector<std::string> stems() const {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text_.size() && !text_.empty()) {
      auto end = text_.find(' ', start);
      if (end == std::string::npos) end = text_.size();
      out.push_back(text_.substr(start, end - start));
      start = end + 1;
    }
    return out;
  }

  std::size_t length() const {
    return text_.empty() ? 0 : 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.end(), ' '));
  }

  bool empty() const noexcept { return text_.empty(); }

  friend bool operator==(const Ngram&, const Ngram&) = default;
  friend auto operator<=>(const Ngram&, const Ngram&) = default;

 private:
  std::string text_;
};

}  // namespace oblit

template <>
struct std::hash<oblit::Ngram> {
  std::size_t operator()(const oblit::Ngram& n) const noexcept { return std::hash<std::string>{}(n.str()); }
};

namespace oblit {

struct OccurrenceTuple {
  Ngram ngram;
  std::string cited_id;

  friend bool operator==(const OccurrenceTuple&, const OccurrenceTuple&) = default;
  friend auto operator<=>(const OccurrenceTuple&, const OccurrenceTuple&) = default;
};

struct NgramConfig {
  std::size_t n_max = 6;
  std::size_t min_count = 5;          // total occurrences across all contexts
  std::size_t min_distinct_docs = 2;  // distinct cited papers
};

namespace detail {

struct NgramStats {
  std::size_t count = 0;
  std::vector<std::uint32_t> docs;  // distinct, capped at the min_distinct_docs threshold
};

inline void for_each_ngram(const std::vector<std::string>& stems, std::size_t n_max,
                           const std::function<void(const std::string&)>& fn) {
  std::string key;
  for (std::size_t i = 0; i < stems.size(); ++i) {
    key.clear();
    for (std::size_t n = 1; n <= n_max && i + n <= stems.size(); ++n) {
      if (n > 1) key.push_back(' ');
      key += stems[i + n - 1];
      fn(key);
    }
  }
}

}  // namespace detail

/// Pairs every retained n-gram of every context with the context's cited
/// paper. Contexts citing books or reviews contribute nothing, including to
/// the pruning counts.
inline std::vector<OccurrenceTuple> extract_occurrences(const Corpus& corpus, const NgramConfig& config,
                                                        const TextNormalizer& norm = default_normalizer()) {
  if (config.n_max == 0) throw InvalidArgument("n_max must be >= 1");

  std::unordered_map<std::string, std::uint32_t> doc_ids;
  std::vector<std::uint32_t> ctx_doc;
  std::vector<std::vector<std::string>> ctx_stems;
  std::vector<std::size_t> ctx_index;
  for (std::size_t i = 0; i < corpus.contexts().size(); ++i) {
    const auto& c = corpus.contexts()[i];
    const PaperRecord* cited = corpus.find(c.cited_id);
    if (cited == nullptr) throw InvalidArgument("context cites unknown paper_id " + c.cited_id);
    if (cited->is_book_or_review) continue;
    auto [it, _] = doc_ids.emplace(c.cited_id, static_cast<std::uint32_t>(doc_ids.size()));
    ctx_doc.push_back(it->second);
    ctx_stems.push_back(norm.tokenize_and_stem(c.text));
    ctx_index.push_back(i);
  }

  std::unordered_map<std::string, detail::NgramStats> stats;
  const std::size_t cap = std::max<std::size_t>(config.min_distinct_docs, 1);
  for (std::size_t c = 0; c < ctx_stems.size(); ++c) {
    const std::uint32_t doc = ctx_doc[c];
    detail::for_each_ngram(ctx_stems[c], config.n_max, [&](const std::string& key) {
      auto& s = stats[key];
      ++s.count;
      if (s.docs.size() < cap && std::find(s.docs.begin(), s.docs.end(), doc) == s.docs.end()) {
        s.docs.push_back(doc);
      }
    });
  }

  auto retained = [&](const std::string& key) {
    const auto& s = stats.at(key);
    return s.count >= config.min_count && s.docs.size() >= config.min_distinct_docs;
  };

  std::vector<OccurrenceTuple> out;
  for (std::size_t c = 0; c < ctx_stems.size(); ++c) {
    const auto& cited = corpus.contexts()[ctx_index[c]].cited_id;
    detail::for_each_ngram(ctx_stems[c], config.n_max, [&](const std::string& key) {
      if (retained(key)) out.push_back({Ngram(key), cited});
    });
  }
  return out;
}

/// Distinct n-grams of a tuple list, sorted.
inline std::vector<Ngram> vocabulary_of(const std::vector<OccurrenceTuple>& tuples) {
  std::vector<Ngram> v;
  v.reserve(tuples.size());
  for (const auto& t : tuples) v.push_back(t.ngram);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace oblit
