#pragma once

#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "oblit/error.hpp"

namespace oblit {

struct PaperRecord {
  std::string paper_id;
  int year = 0;
  std::string venue;
  std::string discipline = "other";
  std::string title;
  std::string abstract;
  std::vector<std::string> authors;  // surnames
  bool is_book_or_review = false;
  std::vector<std::string> references;
  std::optional<std::string> full_text;
};

/// The sentence window around one in-text citation marker.
struct CitationContext {
  std::string citing_id;
  std::string cited_id;
  std::string text;
};

/// Papers and contexts of one corpus file. Immutable once built.
class Corpus {
 public:
  Corpus() = default;

  /// Throws InvalidArgument on a duplicate paper_id.
  Corpus(std::vector<PaperRecord> papers, std::vector<CitationContext> contexts)
      : papers_(std::move(papers)), contexts_(std::move(contexts)) {
    index_.reserve(papers_.size());
    for (std::size_t i = 0; i < papers_.size(); ++i) {
      if (!index_.emplace(papers_[i].paper_id, i).second) {
        throw InvalidArgument("duplicate paper_id " + papers_[i].paper_id);
      }
    }
  }

  const std::vector<PaperRecord>& papers() const noexcept { return papers_; }
  const std::vector<CitationContext>& contexts() const noexcept { return contexts_; }

  const PaperRecord* find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &papers_[it->second];
  }

  const PaperRecord& at(const std::string& id) const {
    const PaperRecord* p = find(id);
    if (p == nullptr) throw InvalidArgument("unknown paper_id " + id);
    return *p;
  }

  bool contains(const std::string& id) const { return index_.count(id) > 0; }

 private:
  std::vector<PaperRecord> papers_;
  std::vector<CitationContext> contexts_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline std::string collapse_whitespace(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      space = !out.empty();
    } else {
      if (space) out.push_back(' ');
      space = false;
      out.push_back(c);
    }
  }
  return out;
}

template <typename T>
T get_field(const nlohmann::json& obj, const char* key, std::size_t line, bool required, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) throw ParseError(line, key, "missing");
    return fallback;
  }
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(line, key, "wrong type");
  }
}

inline PaperRecord parse_paper(const nlohmann::json& j, std::size_t line) {
  PaperRecord p;
  p.paper_id = get_field<std::string>(j, "paper_id", line, true, {});
  if (p.paper_id.empty()) throw ParseError(line, "paper_id", "empty");
  if (auto it = j.find("year"); it == j.end() || !it->is_number_integer()) {
    throw ParseError(line, "year", it == j.end() ? "missing" : "not an integer");
  }
  p.year = j.at("year").get<int>();
  if (p.year < 1800 || p.year > 2100) throw ParseError(line, "year", "outside [1800, 2100]");
  p.venue = get_field<std::string>(j, "venue", line, false, {});
  p.discipline = get_field<std::string>(j, "discipline", line, false, "other");
  p.title = get_field<std::string>(j, "title", line, false, {});
  p.abstract = get_field<std::string>(j, "abstract", line, false, {});
  p.authors = get_field<std::vector<std::string>>(j, "authors", line, false, {});
  p.is_book_or_review = get_field<bool>(j, "is_book_or_review", line, false, false);
  p.references = get_field<std::vector<std::string>>(j, "references", line, false, {});
  std::unordered_set<std::string> seen;
  for (const auto& r : p.references) {
    if (r == p.paper_id) throw ParseError(line, "references", "self-citation " + r);
    if (!seen.insert(r).second) throw ParseError(line, "references", "duplicate reference " + r);
  }
  if (auto it = j.find("full_text"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError(line, "full_text", "wrong type");
    p.full_text = it->get<std::string>();
  }
  return p;
}

inline CitationContext parse_context(const nlohmann::json& j, std::size_t line) {
  CitationContext c;
  c.citing_id = get_field<std::string>(j, "citing_id", line, true, {});
  c.cited_id = get_field<std::string>(j, "cited_id", line, true, {});
  c.text = get_field<std::string>(j, "text", line, true, {});
  if (c.citing_id.empty()) throw ParseError(line, "citing_id", "empty");
  if (c.cited_id.empty()) throw ParseError(line, "cited_id", "empty");
  if (c.citing_id == c.cited_id) throw ParseError(line, "cited_id", "equals citing_id");
  c.text = collapse_whitespace(c.text);
  if (c.text.empty()) throw ParseError(line, "text", "empty after whitespace normalization");
  return c;
}

}  // namespace detail

/// Parse a corpus from a stream: one JSON object per line with "kind" of
/// "paper" or "context". Blank lines are skipped, unknown keys ignored.
inline Corpus ingest(std::istream& in) {
  std::vector<PaperRecord> papers;
  std::vector<CitationContext> contexts;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(lineno, "json", e.what());
    }
    if (!j.is_object()) throw ParseError(lineno, "json", "not an object");
    const auto kind = detail::get_field<std::string>(j, "kind", lineno, true, {});
    if (kind == "paper") {
      auto p = detail::parse_paper(j, lineno);
      if (!ids.insert(p.paper_id).second) {
        throw ParseError(lineno, "paper_id", "duplicate paper_id " + p.paper_id);
      }
      papers.push_back(std::move(p));
    } else if (kind == "context") {
      contexts.push_back(detail::parse_context(j, lineno));
    } else {
      throw ParseError(lineno, "kind", "expected \"paper\" or \"context\", got \"" + kind + "\"");
    }
  }
  return Corpus(std::move(papers), std::move(contexts));
}

inline Corpus ingest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read corpus file: " + path);
  return ingest(in);
}

inline nlohmann::json to_json(const PaperRecord& p) {
  nlohmann::json j = {{"kind", "paper"},
                      {"paper_id", p.paper_id},
                      {"year", p.year},
                      {"venue", p.venue},
                      {"discipline", p.discipline},
                      {"title", p.title},
                      {"abstract", p.abstract},
                      {"authors", p.authors},
                      {"is_book_or_review", p.is_book_or_review},
                      {"references", p.references}};
  if (p.full_text) j["full_text"] = *p.full_text;
  return j;
}

inline nlohmann::json to_json(const CitationContext& c) {
  return {{"kind", "context"}, {"citing_id", c.citing_id}, {"cited_id", c.cited_id}, {"text", c.text}};
}

/// Papers first, then contexts, one record per line.
inline void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& p : corpus.papers()) out << to_json(p).dump() << '\n';
  for (const auto& c : corpus.contexts()) out << to_json(c).dump() << '\n';
}

}  // namespace oblit
