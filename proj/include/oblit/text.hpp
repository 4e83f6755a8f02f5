#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "oblit/error.hpp"

namespace oblit {

namespace detail {

/// Porter (1980) suffix stripper, original rule set. Operates on lowercase
/// ASCII words; callers pass anything else through unchanged.
class PorterStemmer {
 public:
  explicit PorterStemmer(std::string_view word) : b_(word) {}

  std::string run() && {
    step1ab();
    step1c();
    step2();
    step3();
    step4();
    step5();
    return std::move(b_);
  }

 private:
  std::string b_;

  bool is_consonant(std::size_t i) const {
    switch (b_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !is_consonant(i - 1);
      default:
        return true;
    }
  }

  // m() of the prefix b_[0, len)
  int measure(std::size_t len) const {
    int n = 0;
    std::size_t i = 0;
    while (i < len && is_consonant(i)) ++i;
    while (i < len) {
      while (i < len && !is_consonant(i)) ++i;
      if (i >= len) break;
      while (i < len && is_consonant(i)) ++i;
      ++n;
    }
    return n;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i) {
      if (!is_consonant(i)) return true;
    }
    return false;
  }

  bool double_consonant(std::size_t len) const {
    return len >= 2 && b_[len - 1] == b_[len - 2] && is_consonant(len - 1);
  }

  // *o: prefix ends cvc and the last c is not w, x or y
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!is_consonant(len - 1) || is_consonant(len - 2) || !is_consonant(len - 3)) return false;
    const char c = b_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends_with(std::string_view s) const {
    return b_.size() >= s.size() && std::string_view(b_).substr(b_.size() - s.size()) == s;
  }

  std::size_t stem_len(std::string_view suffix) const { return b_.size() - suffix.size(); }

  void replace_suffix(std::string_view suffix, std::string_view with) {
    b_.resize(stem_len(suffix));
    b_.append(with);
  }

  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
  };

  // Longest matching suffix wins; if its condition fails no rule fires.
  template <typename Cond>
  void apply_longest(std::initializer_list<Rule> rules, Cond cond) {
    const Rule* best = nullptr;
    for (const Rule& r : rules) {
      if (ends_with(r.suffix) && (best == nullptr || r.suffix.size() > best->suffix.size())) best = &r;
    }
    if (best != nullptr && cond(stem_len(best->suffix), best->suffix)) {
      replace_suffix(best->suffix, best->replacement);
    }
  }

  void step1ab() {
    if (ends_with("sses")) {
      replace_suffix("sses", "ss");
    } else if (ends_with("ies")) {
      replace_suffix("ies", "i");
    } else if (ends_with("ss")) {
    } else if (ends_with("s")) {
      replace_suffix("s", "");
    }

    bool second_or_third = false;
    if (ends_with("eed")) {
      if (measure(stem_len("eed")) > 0) replace_suffix("eed", "ee");
    } else if (ends_with("ed")) {
      if (has_vowel(stem_len("ed"))) {
        replace_suffix("ed", "");
        second_or_third = true;
      }
    } else if (ends_with("ing")) {
      if (has_vowel(stem_len("ing"))) {
        replace_suffix("ing", "");
        second_or_third = true;
      }
    }
    if (!second_or_third) return;

    if (ends_with("at")) {
      replace_suffix("at", "ate");
    } else if (ends_with("bl")) {
      replace_suffix("bl", "ble");
    } else if (ends_with("iz")) {
      replace_suffix("iz", "ize");
    } else if (double_consonant(b_.size())) {
      const char c = b_.back();
      if (c != 'l' && c != 's' && c != 'z') b_.pop_back();
    } else if (measure(b_.size()) == 1 && cvc(b_.size())) {
      b_.push_back('e');
    }
  }

  void step1c() {
    if (ends_with("y") && has_vowel(b_.size() - 1)) b_.back() = 'i';
  }

  void step2() {
    apply_longest({{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
                   {"izer", "ize"},    {"abli", "able"},  {"alli", "al"},      {"entli", "ent"},
                   {"eli", "e"},       {"ousli", "ous"},  {"ization", "ize"},  {"ation", "ate"},
                   {"ator", "ate"},    {"alism", "al"},   {"iveness", "ive"},  {"fulness", "ful"},
                   {"ousness", "ous"}, {"aliti", "al"},   {"iviti", "ive"},    {"biliti", "ble"}},
                  [this](std::size_t len, std::string_view) { return measure(len) > 0; });
  }

  void step3() {
    apply_longest({{"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
                   {"ical", "ic"},  {"ful", ""},   {"ness", ""}},
                  [this](std::size_t len, std::string_view) { return measure(len) > 0; });
  }

  void step4() {
    apply_longest({{"al", ""},  {"ance", ""}, {"ence", ""}, {"er", ""},  {"ic", ""},   {"able", ""},
                   {"ible", ""}, {"ant", ""},  {"ement", ""}, {"ment", ""}, {"ent", ""}, {"ion", ""},
                   {"ou", ""},  {"ism", ""},  {"ate", ""},  {"iti", ""}, {"ous", ""},  {"ive", ""},
                   {"ize", ""}},
                  [this](std::size_t len, std::string_view suffix) {
                    if (measure(len) <= 1) return false;
                    if (suffix == "ion") return len > 0 && (b_[len - 1] == 's' || b_[len - 1] == 't');
                    return true;
                  });
  }

  void step5() {
    if (ends_with("e")) {
      const std::size_t len = b_.size() - 1;
      const int m = measure(len);
      if (m > 1 || (m == 1 && !cvc(len))) b_.pop_back();
    }
    if (b_.size() >= 2 && b_.back() == 'l' && double_consonant(b_.size()) && measure(b_.size()) > 1) {
      b_.pop_back();
    }
  }
};

inline bool is_ascii_lower_word(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace detail

/// The shipped English stopword list. Mirrors data/stopwords.txt.
inline const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> words = {
      "a",       "about",   "above",  "after",   "again",   "against", "all",     "also",    "am",
      "among",   "an",      "and",    "any",     "are",     "as",      "at",      "be",      "been",
      "before",  "being",   "below",  "between", "both",    "but",     "by",      "can",     "could",
      "did",     "do",      "does",   "doing",   "down",    "due",     "during",  "each",    "eg",
      "either",  "et",      "etc",    "few",     "for",     "from",    "further", "had",     "has",
      "have",    "having",  "he",     "her",     "here",    "hers",    "herself", "him",     "himself",
      "his",     "how",     "however", "i",      "ie",      "if",      "in",      "into",    "is",
      "it",      "its",     "itself", "just",    "may",     "me",      "might",   "more",    "most",
      "must",    "my",      "myself", "no",      "nor",     "not",     "now",     "of",      "off",
      "on",      "once",    "one",    "only",    "or",      "other",   "our",     "ours",    "ourselves",
      "out",     "over",    "own",    "same",    "she",     "should",  "since",   "so",      "some",
      "such",    "than",    "that",   "the",     "their",   "theirs",  "them",    "themselves",
      "then",    "there",   "therefore", "these", "they",   "this",    "those",   "through", "thus",
      "to",      "too",     "under",  "until",   "up",      "upon",    "us",      "very",    "via",
      "was",     "we",      "were",   "what",    "when",    "where",   "whether", "which",   "while",
      "who",     "whom",    "why",    "will",    "with",    "within",  "without", "would",   "yet",
      "you",     "your",    "yours",  "yourself", "yourselves"};
  return words;
}

/// Read one entry per line; blank lines and lines starting with '#' are skipped.
inline std::vector<std::string> read_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read word list: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    out.push_back(line.substr(start));
  }
  return out;
}

/// Lowercases, splits, drops stopwords and stems. Immutable after
/// construction and safe to share across threads.
class TextNormalizer {
 public:
  TextNormalizer() : TextNormalizer(default_stopwords(), {}) {}

  TextNormalizer(const std::vector<std::string>& stopwords,
                 std::unordered_map<std::string, std::string> stem_exceptions)
      : stopwords_(stopwords.begin(), stopwords.end()), exceptions_(std::move(stem_exceptions)) {}

  /// Stemmer exception file: "word stem" per line.
  static std::unordered_map<std::string, std::string> read_exceptions(const std::string& path) {
    std::unordered_map<std::string, std::string> out;
    std::size_t lineno = 0;
    std::ifstream in(path);
    if (!in) throw IoError("cannot read stemmer exceptions: " + path);
    std::string line;
    while (std::getline(in, line)) {
      ++lineno;
      const auto start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos || line[start] == '#') continue;
      std::string word, stem, extra;
      std::istringstream ss(line);
      ss >> word >> stem;
      if (stem.empty() || (ss >> extra)) throw ParseError(lineno, "exception", "expected \"word stem\"");
      out[word] = stem;
    }
    return out;
  }

  std::string stem(std::string_view word) const {
    if (auto it = exceptions_.find(std::string(word)); it != exceptions_.end()) return it->second;
    if (!detail::is_ascii_lower_word(word)) return std::string(word);
    return detail::PorterStemmer(word).run();
  }

  bool is_stopword(std::string_view word) const { return stopwords_.count(std::string(word)) > 0; }

  /// Lowercase words split on anything that is not [a-z0-9] or a non-ASCII
  /// byte. Apostrophes are deleted so possessives stay one word.
  static std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::string cur;
    for (char ch : text) {
      const auto c = static_cast<unsigned char>(ch);
      if (c == '\'') continue;
      if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
        cur.push_back(static_cast<char>(c));
      } else if (c >= 'A' && c <= 'Z') {
        cur.push_back(static_cast<char>(c - 'A' + 'a'));
      } else if (!cur.empty()) {
        words.push_back(std::move(cur));
        cur.clear();
      }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
  }

  std::vector<std::string> tokenize_and_stem(std::string_view text) const {
    std::vector<std::string> out;
    for (auto& w : split_words(text)) {
      if (is_stopword(w)) continue;
      std::string s = stem(w);
      if (!s.empty()) out.push_back(std::move(s));
    }
    return out;
  }

 private:
  std::unordered_set<std::string> stopwords_;
  std::unordered_map<std::string, std::string> exceptions_;
};

inline const TextNormalizer& default_normalizer() {
  static const TextNormalizer n;
  return n;
}

inline std::vector<std::string> tokenize_and_stem(std::string_view text) {
  return default_normalizer().tokenize_and_stem(text);
}

}  // namespace oblit
