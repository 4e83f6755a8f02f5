#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "oblit/corpus.hpp"
#include "oblit/csv.hpp"
#include "oblit/detector.hpp"
#include "oblit/error.hpp"
#include "oblit/mention_index.hpp"
#include "oblit/rng.hpp"
#include "oblit/tabulator.hpp"
#include "oblit/text.hpp"

namespace oblit {

// ---------------------------------------------------------------------------
// Rank correlation

/// 1-based ranks; tied values share the mean of their positions.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace detail {
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}
}  // namespace detail

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;  // two-sided permutation p-value
};

struct SpearmanConfig {
  std::size_t permutations = 10000;
  std::uint64_t seed = 1;
  double alpha = 0.01;  // H0 rejected when p_value < alpha
};

inline SpearmanResult spearman(const std::vector<double>& xs, const std::vector<double>& ys,
                               const SpearmanConfig& config = {}) {
  if (xs.size() != ys.size()) throw InvalidArgument("spearman: length mismatch");
  if (xs.size() < 3) throw InvalidArgument("spearman: need at least 3 points");
  const auto rx = average_ranks(xs);
  auto ry = average_ranks(ys);
  auto constant = [](const std::vector<double>& r) { return std::all_of(r.begin(), r.end(), [&](double v) { return v == r[0]; }); };
  if (constant(rx) || constant(ry)) throw InvalidArgument("spearman: constant input has no rank correlation");
  SpearmanResult res;
  res.rho = detail::pearson(rx, ry);
  if (config.permutations == 0) {
    res.p_value = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  Rng rng(config.seed);
  std::size_t extreme = 0;
  const double observed = std::abs(res.rho) - 1e-12;
  for (std::size_t i = 0; i < config.permutations; ++i) {
    rng.shuffle(ry);
    if (std::abs(detail::pearson(rx, ry)) >= observed) ++extreme;
  }
  res.p_value = static_cast<double>(extreme + 1) / static_cast<double>(config.permutations + 1);
  return res;
}

// ---------------------------------------------------------------------------
// Least squares with confidence and prediction bands

/// y = intercept + slope x in the fit's own (possibly transformed) space.
struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_halfwidth = 0.0;  // 95%, t with n-2 degrees of freedom
  std::size_t n = 0;
  double x_mean = 0.0;
  double sxx = 0.0;
  double residual_sd = 0.0;
  double t_crit = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  bool degenerate = false;  // two points: exact interpolation, no bands

  double predict(double x) const { return intercept + slope * x; }

  /// Half-width of the 95% single-observation prediction interval at x.
  double band_halfwidth(double x) const {
    if (degenerate) return std::numeric_limits<double>::quiet_NaN();
    const double nn = static_cast<double>(n);
    return t_crit * residual_sd * std::sqrt(1.0 + 1.0 / nn + (x - x_mean) * (x - x_mean) / sxx);
  }
};

inline double t_quantile_975(std::size_t dof) {
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.975);
}

inline RegressionFit ols_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("regression: length mismatch");
  if (xs.size() < 2) throw InvalidArgument("regression: need at least 2 points");
  RegressionFit f;
  f.n = xs.size();
  const double n = static_cast<double>(f.n);
  f.x_mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double y_mean = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    f.sxx += (xs[i] - f.x_mean) * (xs[i] - f.x_mean);
    sxy += (xs[i] - f.x_mean) * (ys[i] - y_mean);
  }
  f.x_min = *std::min_element(xs.begin(), xs.end());
  f.x_max = *std::max_element(xs.begin(), xs.end());
  if (f.x_min == f.x_max || !(f.sxx > 0.0)) throw InvalidArgument("regression: all abscissae equal");
  f.slope = sxy / f.sxx;
  f.intercept = y_mean - f.slope * f.x_mean;
  if (f.n == 2) {
    f.degenerate = true;
    f.slope_halfwidth = std::numeric_limits<double>::quiet_NaN();
    f.residual_sd = std::numeric_limits<double>::quiet_NaN();
    f.t_crit = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - f.predict(xs[i]);
    sse += r * r;
  }
  f.residual_sd = std::sqrt(sse / (n - 2.0));
  f.t_crit = t_quantile_975(f.n - 2);
  f.slope_halfwidth = f.t_crit * f.residual_sd / std::sqrt(f.sxx);
  return f;
}

/// OLS of log10 h on log10 c.
inline RegressionFit loglog_fit(const std::vector<double>& c, const std::vector<double>& h) {
  if (c.size() != h.size()) throw InvalidArgument("loglog_fit: length mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] >= 1.0)) throw InvalidArgument("loglog_fit: c[" + std::to_string(i) + "] must be >= 1");
    if (!(h[i] >= 1.0)) throw InvalidArgument("loglog_fit: h[" + std::to_string(i) + "] must be >= 1");
    x.push_back(std::log10(c[i]));
    y.push_back(std::log10(h[i]));
  }
  return ols_fit(x, y);
}

/// OLS of p on log10 mentions.
inline RegressionFit loglinear_fit(const std::vector<double>& mentions, const std::vector<double>& p) {
  if (mentions.size() != p.size()) throw InvalidArgument("loglinear_fit: length mismatch");
  std::vector<double> x;
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    if (!(mentions[i] >= 1.0)) throw InvalidArgument("loglinear_fit: mentions[" + std::to_string(i) + "] must be >= 1");
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) throw InvalidArgument("loglinear_fit: p[" + std::to_string(i) + "] outside [0, 1]");
    x.push_back(std::log10(mentions[i]));
  }
  return ols_fit(x, p);
}

struct BandSample {
  double x, fitted, lower, upper;
};

/// Fitted line and prediction band at `count` evenly spaced abscissae.
inline std::vector<BandSample> band_samples(const RegressionFit& f, std::size_t count = 100) {
  std::vector<BandSample> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = count == 1 ? f.x_min
                                : f.x_min + (f.x_max - f.x_min) * static_cast<double>(i) / static_cast<double>(count - 1);
    const double y = f.predict(x);
    const double hw = f.band_halfwidth(x);
    out.push_back({x, y, y - hw, y + hw});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Per-paper credit

enum class AttributionMode { Proportional, FullCount };

/// Spreads each topic's hidden citations over its foundational papers by
/// P(d|z) renormalized within the foundational set (or gives every
/// foundational paper the full count).
inline std::map<std::string, double> attribute_hidden_to_papers(const std::vector<TopicProfile>& profiles,
                                                                const std::vector<FollowerTable>& tables,
                                                                AttributionMode mode = AttributionMode::Proportional) {
  std::map<std::size_t, const FollowerTable*> by_topic;
  for (const auto& t : tables) by_topic[t.topic_id] = &t;
  std::map<std::string, double> out;
  for (const auto& p : profiles) {
    auto it = by_topic.find(p.topic_id);
    if (it == by_topic.end()) throw InvalidArgument("no follower table for topic " + std::to_string(p.topic_id));
    const double h = static_cast<double>(it->second->totals().hidden());
    double wsum = 0.0;
    for (const auto& f : p.foundational_papers) wsum += f.p.estimate;
    for (const auto& f : p.foundational_papers) {
      const double share = mode == AttributionMode::FullCount
                               ? h
                               : (wsum > 0 ? h * f.p.estimate / wsum
                                           : h / static_cast<double>(p.foundational_papers.size()));
      out[f.paper_id] += share;
    }
  }
  return out;
}

struct RankDelta {
  std::string paper_id;
  std::size_t rank_explicit = 0;
  std::size_t rank_with_hidden = 0;
  double c_explicit = 0.0;
  double h_attributed = 0.0;

  long delta() const { return static_cast<long>(rank_explicit) - static_cast<long>(rank_with_hidden); }
};

/// Ranks by c, then by c + h, both descending with ties to the smaller id.
/// Output in explicit-rank order.
inline std::vector<RankDelta> rank_deltas(const std::vector<std::string>& paper_ids,
                                          const std::map<std::string, double>& c_explicit,
                                          const std::map<std::string, double>& h_attributed) {
  std::vector<RankDelta> rows;
  std::set<std::string> seen;
  for (const auto& id : paper_ids) {
    if (!seen.insert(id).second) continue;
    RankDelta r;
    r.paper_id = id;
    if (auto it = c_explicit.find(id); it != c_explicit.end()) r.c_explicit = it->second;
    if (auto it = h_attributed.find(id); it != h_attributed.end()) r.h_attributed = it->second;
    if (r.c_explicit < 0 || r.h_attributed < 0) throw InvalidArgument("negative count for " + id);
    rows.push_back(r);
  }
  auto by = [&](auto key) {
    std::vector<std::size_t> idx(rows.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const double ka = key(rows[a]), kb = key(rows[b]);
      return ka != kb ? ka > kb : rows[a].paper_id < rows[b].paper_id;
    });
    return idx;
  };
  const auto explicit_order = by([](const RankDelta& r) { return r.c_explicit; });
  const auto combined_order = by([](const RankDelta& r) { return r.c_explicit + r.h_attributed; });
  for (std::size_t i = 0; i < explicit_order.size(); ++i) rows[explicit_order[i]].rank_explicit = i + 1;
  for (std::size_t i = 0; i < combined_order.size(); ++i) rows[combined_order[i]].rank_with_hidden = i + 1;
  std::vector<RankDelta> out;
  for (std::size_t i : explicit_order) out.push_back(rows[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Catchphrase origin and class

struct OriginResult {
  std::size_t considered = 0;           // foundational papers with a title or abstract
  std::size_t without_catchphrase = 0;  // none of their catchphrases in title or abstract
  std::size_t excluded = 0;             // no title and no abstract
  double fraction() const {
    return considered == 0 ? std::numeric_limits<double>::quiet_NaN()
                           : static_cast<double>(without_catchphrase) / static_cast<double>(considered);
  }
};

/// Checks each distinct foundational paper's title and abstract (separately)
/// against the catchphrases of every topic it founds.
inline OriginResult catchphrase_origin(const std::vector<TopicProfile>& profiles, const Corpus& corpus,
                                       const TextNormalizer& norm = default_normalizer()) {
  std::map<std::string, std::set<Ngram>> phrases;
  for (const auto& p : profiles)
    for (const auto& f : p.foundational_papers)
      for (const auto& c : p.catchphrases) phrases[f.paper_id].insert(c.ngram);

  OriginResult res;
  for (const auto& [id, set] : phrases) {
    const PaperRecord& paper = corpus.at(id);
    if (paper.title.empty() && paper.abstract.empty()) {
      ++res.excluded;
      continue;
    }
    ++res.considered;
    const PhraseMatcher matcher(std::vector<Ngram>(set.begin(), set.end()));
    const bool found = !matcher.find_all(norm.tokenize_and_stem(paper.title)).empty() ||
                       !matcher.find_all(norm.tokenize_and_stem(paper.abstract)).empty();
    if (!found) ++res.without_catchphrase;
  }
  return res;
}

enum class CatchphraseClass { Eponym, Experiment, Other };

inline const char* to_string(CatchphraseClass c) {
  switch (c) {
    case CatchphraseClass::Eponym: return "eponym";
    case CatchphraseClass::Experiment: return "experiment";
    default: return "other";
  }
}

inline std::optional<CatchphraseClass> parse_class(const std::string& s) {
  if (s == "eponym") return CatchphraseClass::Eponym;
  if (s == "experiment") return CatchphraseClass::Experiment;
  if (s == "other") return CatchphraseClass::Other;
  return std::nullopt;
}

/// Override file: "catchphrase<TAB>class" per line; '#' starts a comment.
inline std::map<Ngram, CatchphraseClass> read_label_overrides(const std::string& path,
                                                               const TextNormalizer& norm = default_normalizer()) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read label overrides: " + path);
  std::map<Ngram, CatchphraseClass> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw ParseError(lineno, "override", "expected catchphrase<TAB>class");
    const Ngram phrase = Ngram::from_text(line.substr(0, tab), norm);
    const auto cls = parse_class(line.substr(tab + 1));
    if (phrase.empty()) throw ParseError(lineno, "catchphrase", "empty after normalization");
    if (!cls) throw ParseError(lineno, "class", "expected eponym, experiment or other");
    out[phrase] = *cls;
  }
  return out;
}

struct TopicClass {
  std::size_t topic_id = 0;
  CatchphraseClass cls = CatchphraseClass::Other;
};

/// Eponym when a catchphrase contains a foundational author's surname stem;
/// experiment only through overrides. Overrides win.
inline std::vector<TopicClass> classify_catchphrases(const std::vector<TopicProfile>& profiles, const Corpus& corpus,
                                                     const std::map<Ngram, CatchphraseClass>& overrides = {},
                                                     const TextNormalizer& norm = default_normalizer()) {
  std::vector<TopicClass> out;
  for (const auto& p : profiles) {
    TopicClass tc{p.topic_id, CatchphraseClass::Other};
    std::optional<CatchphraseClass> forced;
    for (const auto& c : p.catchphrases) {
      if (auto it = overrides.find(c.ngram); it != overrides.end()) {
        forced = it->second;
        break;
      }
    }
    if (forced) {
      tc.cls = *forced;
    } else {
      std::set<std::string> surnames;
      for (const auto& f : p.foundational_papers)
        for (const auto& a : corpus.at(f.paper_id).authors)
          for (auto& s : norm.tokenize_and_stem(a)) surnames.insert(std::move(s));
      for (const auto& c : p.catchphrases) {
        for (const auto& s : c.ngram.stems()) {
          if (surnames.count(s)) tc.cls = CatchphraseClass::Eponym;
        }
      }
    }
    out.push_back(tc);
  }
  return out;
}

struct AuthorCountStat {
  CatchphraseClass cls = CatchphraseClass::Other;
  std::size_t papers = 0;
  double mean = 0.0;
  double halfwidth = std::numeric_limits<double>::quiet_NaN();  // 1.96 x standard error
  bool se_defined = false;                                      // false for a single paper
};

struct AuthorCountReport {
  std::vector<AuthorCountStat> stats;
  std::vector<CatchphraseClass> omitted;  // classes with no foundational papers
};

inline AuthorCountReport author_count_stats(const std::vector<TopicProfile>& profiles, const Corpus& corpus,
                                            const std::vector<TopicClass>& classes) {
  std::map<std::size_t, CatchphraseClass> cls_of;
  for (const auto& c : classes) cls_of[c.topic_id] = c.cls;
  std::map<CatchphraseClass, std::set<std::string>> papers;
  for (const auto& p : profiles) {
    auto it = cls_of.find(p.topic_id);
    if (it == cls_of.end()) throw InvalidArgument("no class for topic " + std::to_string(p.topic_id));
    for (const auto& f : p.foundational_papers) papers[it->second].insert(f.paper_id);
  }
  AuthorCountReport rep;
  for (auto cls : {CatchphraseClass::Eponym, CatchphraseClass::Experiment, CatchphraseClass::Other}) {
    const auto it = papers.find(cls);
    if (it == papers.end() || it->second.empty()) {
      rep.omitted.push_back(cls);
      continue;
    }
    std::vector<double> counts;
    for (const auto& id : it->second) counts.push_back(static_cast<double>(corpus.at(id).authors.size()));
    AuthorCountStat s;
    s.cls = cls;
    s.papers = counts.size();
    s.mean = std::accumulate(counts.begin(), counts.end(), 0.0) / static_cast<double>(counts.size());
    if (counts.size() >= 2) {
      double ss = 0.0;
      for (double c : counts) ss += (c - s.mean) * (c - s.mean);
      const double sd = std::sqrt(ss / static_cast<double>(counts.size() - 1));
      s.halfwidth = 1.96 * sd / std::sqrt(static_cast<double>(counts.size()));
      s.se_defined = true;
    }
    rep.stats.push_back(s);
  }
  return rep;
}

}  // namespace oblit
