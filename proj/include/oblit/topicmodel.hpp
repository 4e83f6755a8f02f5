#pragma once

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oblit/error.hpp"
#include "oblit/ngram.hpp"
#include "oblit/parallel.hpp"
#include "oblit/rng.hpp"

namespace oblit {

struct LdaConfig {
  std::size_t num_topics = 400;
  std::optional<double> alpha;  // unset: 50 / num_topics
  double beta = 0.01;
  std::size_t burn_in_sweeps = 500;
  std::size_t retained_samples = 20;
  std::size_t sample_lag_sweeps = 10;
  std::uint64_t seed = 1;
  std::size_t chains = 1;  // chains beyond the first only feed the convergence diagnostic

  double alpha_value() const { return alpha.value_or(50.0 / static_cast<double>(num_topics)); }

  void validate() const {
    if (num_topics < 1) throw InvalidArgument("num_topics must be >= 1");
    if (!(alpha_value() > 0.0)) throw InvalidArgument("alpha must be > 0");
    if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
    if (burn_in_sweeps < 1) throw InvalidArgument("burn_in_sweeps must be >= 1");
    if (retained_samples < 1) throw InvalidArgument("retained_samples must be >= 1");
    if (sample_lag_sweeps < 1) throw InvalidArgument("sample_lag_sweeps must be >= 1");
    if (chains < 1) throw InvalidArgument("chains must be >= 1");
  }
};

/// A proportion with its 95% normal-approximation half-width.
struct Estimate {
  double estimate = 0.0;
  double halfwidth = 0.0;
};

/// k successes out of n: p = k/n, halfwidth = 1.96 sqrt(p(1-p)/n).
inline Estimate proportion_estimate(double k, double n) {
  if (!(n > 0.0)) throw InvalidArgument("proportion over an empty population");
  const double p = k / n;
  const double var = std::max(0.0, p * (1.0 - p));
  return {p, 1.96 * std::sqrt(var / n)};
}

/// Tuples encoded as (word index, document index).
struct EncodedTuples {
  std::vector<Ngram> vocabulary;       // sorted
  std::vector<std::string> documents;  // sorted
  std::vector<std::uint32_t> word;
  std::vector<std::uint32_t> doc;

  std::size_t size() const noexcept { return word.size(); }

  static EncodedTuples encode(const std::vector<OccurrenceTuple>& tuples) {
    EncodedTuples e;
    e.vocabulary = vocabulary_of(tuples);
    for (const auto& t : tuples) e.documents.push_back(t.cited_id);
    std::sort(e.documents.begin(), e.documents.end());
    e.documents.erase(std::unique(e.documents.begin(), e.documents.end()), e.documents.end());
    std::unordered_map<std::string, std::uint32_t> widx, didx;
    for (std::size_t i = 0; i < e.vocabulary.size(); ++i) widx.emplace(e.vocabulary[i].str(), i);
    for (std::size_t i = 0; i < e.documents.size(); ++i) didx.emplace(e.documents[i], i);
    e.word.reserve(tuples.size());
    e.doc.reserve(tuples.size());
    for (const auto& t : tuples) {
      e.word.push_back(widx.at(t.ngram.str()));
      e.doc.push_back(didx.at(t.cited_id));
    }
    return e;
  }
};

/// Topic labels and the count tables they imply.
struct AssignmentState {
  std::size_t num_topics = 0;
  std::vector<std::uint32_t> z;
  std::vector<std::int64_t> n_dz;  // [d * K + z]
  std::vector<std::int64_t> n_zw;  // [w * K + z]
  std::vector<std::int64_t> n_z;

  /// Recomputes every table from z and compares.
  bool consistent_with(const EncodedTuples& t) const {
    const std::size_t K = num_topics;
    std::vector<std::int64_t> dz(t.documents.size() * K, 0), zw(t.vocabulary.size() * K, 0), zz(K, 0);
    if (z.size() != t.size()) return false;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (z[i] >= K) return false;
      ++dz[t.doc[i] * K + z[i]];
      ++zw[t.word[i] * K + z[i]];
      ++zz[z[i]];
    }
    return dz == n_dz && zw == n_zw && zz == n_z;
  }
};

/// One collapsed Gibbs chain. Strictly sequential.
class GibbsSampler {
 public:
  GibbsSampler(const EncodedTuples& tuples, const LdaConfig& config, std::uint64_t seed)
      : t_(tuples),
        K_(config.num_topics),
        alpha_(config.alpha_value()),
        beta_(config.beta),
        vbeta_(static_cast<double>(tuples.vocabulary.size()) * config.beta),
        rng_(seed),
        weights_(config.num_topics) {
    s_.num_topics = K_;
    s_.z.resize(t_.size());
    s_.n_dz.assign(t_.documents.size() * K_, 0);
    s_.n_zw.assign(t_.vocabulary.size() * K_, 0);
    s_.n_z.assign(K_, 0);
    for (std::size_t i = 0; i < t_.size(); ++i) {
      const auto k = static_cast<std::uint32_t>(rng_.below(K_));
      s_.z[i] = k;
      ++s_.n_dz[t_.doc[i] * K_ + k];
      ++s_.n_zw[t_.word[i] * K_ + k];
      ++s_.n_z[k];
    }
  }

  /// Resamples every tuple once, in input order.
  void sweep() {
    for (std::size_t i = 0; i < t_.size(); ++i) {
      const std::uint32_t old = s_.z[i];
      std::int64_t* dz = &s_.n_dz[t_.doc[i] * K_];
      std::int64_t* zw = &s_.n_zw[t_.word[i] * K_];
      --dz[old];
      --zw[old];
      --s_.n_z[old];
      double total = 0.0;
      for (std::size_t k = 0; k < K_; ++k) {
        total += (static_cast<double>(dz[k]) + alpha_) * (static_cast<double>(zw[k]) + beta_) /
                 (static_cast<double>(s_.n_z[k]) + vbeta_);
        weights_[k] = total;
      }
      const double u = rng_.uniform() * total;
      auto k = static_cast<std::uint32_t>(std::upper_bound(weights_.begin(), weights_.end(), u) - weights_.begin());
      if (k >= K_) k = static_cast<std::uint32_t>(K_ - 1);
      s_.z[i] = k;
      ++dz[k];
      ++zw[k];
      ++s_.n_z[k];
    }
  }

  const AssignmentState& state() const noexcept { return s_; }

 private:
  const EncodedTuples& t_;
  std::size_t K_;
  double alpha_, beta_, vbeta_;
  Rng rng_;
  AssignmentState s_;
  std::vector<double> weights_;
};

/// Count tables pooled over the retained samples of one chain, plus the raw
/// (n-gram, document) co-occurrence counts. Immutable.
class TopicModel {
 public:
  struct Tables {
    LdaConfig config;
    std::vector<Ngram> vocabulary;
    std::vector<std::string> documents;
    std::vector<double> n_zw;  // [w * K + z], pooled
    std::vector<double> n_dz;  // [d * K + z], pooled
    std::vector<double> n_z;   // pooled
    std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> cooccurrence;  // per w: (d, count)
    std::optional<double> chain_divergence;
  };

  TopicModel() = default;

  explicit TopicModel(Tables tables) : t_(std::move(tables)) {
    const std::size_t K = t_.config.num_topics;
    const std::size_t V = t_.vocabulary.size(), D = t_.documents.size();
    if (t_.n_zw.size() != V * K || t_.n_dz.size() != D * K || t_.n_z.size() != K || t_.cooccurrence.size() != V) {
      throw InvalidArgument("topic model tables have inconsistent shapes");
    }
    n_w_.assign(V, 0);
    n_d_.assign(D, 0);
    for (std::size_t w = 0; w < V; ++w) {
      for (const auto& [d, c] : t_.cooccurrence[w]) {
        n_w_[w] += c;
        n_d_[d] += c;
      }
      word_index_.emplace(t_.vocabulary[w].str(), w);
    }
    for (std::size_t d = 0; d < D; ++d) doc_index_.emplace(t_.documents[d], d);
  }

  std::size_t num_topics() const noexcept { return t_.config.num_topics; }
  const LdaConfig& config() const noexcept { return t_.config; }
  const std::vector<Ngram>& vocabulary() const noexcept { return t_.vocabulary; }
  const std::vector<std::string>& documents() const noexcept { return t_.documents; }
  const Tables& tables() const noexcept { return t_; }
  std::optional<double> chain_divergence() const noexcept { return t_.chain_divergence; }

  std::optional<std::size_t> word_id(const Ngram& w) const {
    auto it = word_index_.find(w.str());
    return it == word_index_.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  }
  std::optional<std::size_t> doc_id(const std::string& d) const {
    auto it = doc_index_.find(d);
    return it == doc_index_.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  }

  std::size_t require_word(const Ngram& w) const {
    if (auto id = word_id(w)) return *id;
    throw InvalidArgument("n-gram not in model: \"" + w.str() + "\"");
  }
  std::size_t require_doc(const std::string& d) const {
    if (auto id = doc_id(d)) return *id;
    throw InvalidArgument("document not in model: " + d);
  }
  void require_topic(std::size_t z) const {
    if (z >= num_topics()) throw InvalidArgument("unknown topic " + std::to_string(z));
  }

  std::uint64_t ngram_total(std::size_t w) const { return n_w_[w]; }
  std::uint64_t doc_total(std::size_t d) const { return n_d_[d]; }
  double topic_total(std::size_t z) const { return t_.n_z[z]; }
  double topic_word(std::size_t z, std::size_t w) const { return t_.n_zw[w * num_topics() + z]; }
  double topic_doc(std::size_t z, std::size_t d) const { return t_.n_dz[d * num_topics() + z]; }
  const std::vector<std::pair<std::uint32_t, std::uint64_t>>& cooccurrence(std::size_t w) const {
    return t_.cooccurrence[w];
  }

  /// P(z|w) from pooled counts.
  Estimate p_topic_given_ngram(const Ngram& w, std::size_t z) const {
    require_topic(z);
    const std::size_t wi = require_word(w);
    return proportion_estimate(topic_word(z, wi), static_cast<double>(n_w_[wi]));
  }

  /// P(d|z) from pooled counts.
  Estimate p_doc_given_topic(const std::string& d, std::size_t z) const {
    require_topic(z);
    if (!(topic_total(z) > 0.0)) throw InvalidArgument("topic " + std::to_string(z) + " is empty");
    const std::size_t di = require_doc(d);
    return proportion_estimate(topic_doc(z, di), topic_total(z));
  }

  friend bool operator==(const TopicModel& a, const TopicModel& b) {
    const auto& x = a.t_;
    const auto& y = b.t_;
    auto same_double = [](double p, double q) { return std::memcmp(&p, &q, sizeof p) == 0; };
    auto same_vec = [&](const std::vector<double>& p, const std::vector<double>& q) {
      if (p.size() != q.size()) return false;
      for (std::size_t i = 0; i < p.size(); ++i)
        if (!same_double(p[i], q[i])) return false;
      return true;
    };
    return x.config.num_topics == y.config.num_topics && same_double(x.config.alpha_value(), y.config.alpha_value()) &&
           same_double(x.config.beta, y.config.beta) && x.config.burn_in_sweeps == y.config.burn_in_sweeps &&
           x.config.retained_samples == y.config.retained_samples &&
           x.config.sample_lag_sweeps == y.config.sample_lag_sweeps && x.config.seed == y.config.seed &&
           x.config.chains == y.config.chains && x.vocabulary == y.vocabulary && x.documents == y.documents &&
           same_vec(x.n_zw, y.n_zw) && same_vec(x.n_dz, y.n_dz) && same_vec(x.n_z, y.n_z) &&
           x.cooccurrence == y.cooccurrence && x.chain_divergence.has_value() == y.chain_divergence.has_value() &&
           (!x.chain_divergence || same_double(*x.chain_divergence, *y.chain_divergence));
  }

 private:
  Tables t_;
  std::vector<std::uint64_t> n_w_, n_d_;
  std::unordered_map<std::string, std::size_t> word_index_, doc_index_;
};

inline Estimate p_topic_given_ngram(const TopicModel& m, const Ngram& w, std::size_t z) {
  return m.p_topic_given_ngram(w, z);
}
inline Estimate p_doc_given_topic(const TopicModel& m, const std::string& d, std::size_t z) {
  return m.p_doc_given_topic(d, z);
}

namespace detail {

struct PooledCounts {
  std::vector<double> n_zw, n_dz, n_z;
};

inline PooledCounts run_chain(const EncodedTuples& t, const LdaConfig& cfg, std::uint64_t seed) {
  GibbsSampler sampler(t, cfg, seed);
  for (std::size_t s = 0; s < cfg.burn_in_sweeps; ++s) sampler.sweep();
  PooledCounts p{std::vector<double>(t.vocabulary.size() * cfg.num_topics, 0.0),
                 std::vector<double>(t.documents.size() * cfg.num_topics, 0.0),
                 std::vector<double>(cfg.num_topics, 0.0)};
  auto accumulate = [](std::vector<double>& dst, const std::vector<std::int64_t>& src) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += static_cast<double>(src[i]);
  };
  for (std::size_t r = 0; r < cfg.retained_samples; ++r) {
    for (std::size_t s = 0; s < cfg.sample_lag_sweeps; ++s) sampler.sweep();
    accumulate(p.n_zw, sampler.state().n_zw);
    accumulate(p.n_dz, sampler.state().n_dz);
    accumulate(p.n_z, sampler.state().n_z);
  }
  const double inv = 1.0 / static_cast<double>(cfg.retained_samples);
  for (auto* v : {&p.n_zw, &p.n_dz, &p.n_z})
    for (double& x : *v) x *= inv;
  return p;
}

/// Hungarian algorithm (minimization) on an n x n cost matrix; returns the
/// column assigned to each row.
inline std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

/// Max over n-grams of the total-variation distance between P(.|w) of two
/// chains, after matching topic labels to maximize shared word mass.
inline double chain_divergence(const PooledCounts& a, const PooledCounts& b, std::size_t V, std::size_t K) {
  std::vector<std::vector<double>> cost(K, std::vector<double>(K, 0.0));
  std::vector<std::pair<std::size_t, double>> nz_a, nz_b;
  for (std::size_t w = 0; w < V; ++w) {
    nz_a.clear();
    nz_b.clear();
    for (std::size_t z = 0; z < K; ++z) {
      if (a.n_zw[w * K + z] > 0) nz_a.emplace_back(z, a.n_zw[w * K + z]);
      if (b.n_zw[w * K + z] > 0) nz_b.emplace_back(z, b.n_zw[w * K + z]);
    }
    for (const auto& [za, ca] : nz_a)
      for (const auto& [zb, cb] : nz_b) cost[za][zb] -= std::min(ca, cb);
  }
  const auto match = hungarian(cost);
  double worst = 0.0;
  for (std::size_t w = 0; w < V; ++w) {
    double ta = 0, tb = 0;
    for (std::size_t z = 0; z < K; ++z) {
      ta += a.n_zw[w * K + z];
      tb += b.n_zw[w * K + z];
    }
    if (ta <= 0 || tb <= 0) continue;
    double tv = 0.0;
    for (std::size_t z = 0; z < K; ++z) tv += std::abs(a.n_zw[w * K + z] / ta - b.n_zw[w * K + match[z]] / tb);
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

}  // namespace detail

/// Collapsed Gibbs sampling over occurrence tuples. Chain 0 produces the
/// model; further chains only contribute the convergence diagnostic.
inline TopicModel gibbs_train(const std::vector<OccurrenceTuple>& tuples, const LdaConfig& config,
                              unsigned threads = default_threads()) {
  config.validate();
  if (tuples.empty()) throw InvalidArgument("cannot train on an empty tuple list");
  if (config.num_topics > tuples.size()) {
    throw InvalidArgument("num_topics (" + std::to_string(config.num_topics) + ") exceeds tuple count (" +
                          std::to_string(tuples.size()) + ")");
  }
  const EncodedTuples enc = EncodedTuples::encode(tuples);
  const std::size_t K = config.num_topics;

  std::vector<detail::PooledCounts> pooled(config.chains);
  parallel_for(config.chains, threads, [&](std::size_t c) {
    pooled[c] = detail::run_chain(enc, config, derive_seed(config.seed, "lda-chain-" + std::to_string(c)));
  });

  TopicModel::Tables t;
  t.config = config;
  t.config.alpha = config.alpha_value();
  t.vocabulary = enc.vocabulary;
  t.documents = enc.documents;
  t.n_zw = std::move(pooled[0].n_zw);
  t.n_dz = std::move(pooled[0].n_dz);
  t.n_z = std::move(pooled[0].n_z);

  std::vector<std::unordered_map<std::uint32_t, std::uint64_t>> co(enc.vocabulary.size());
  for (std::size_t i = 0; i < enc.size(); ++i) ++co[enc.word[i]][enc.doc[i]];
  t.cooccurrence.resize(enc.vocabulary.size());
  for (std::size_t w = 0; w < co.size(); ++w) {
    t.cooccurrence[w].assign(co[w].begin(), co[w].end());
    std::sort(t.cooccurrence[w].begin(), t.cooccurrence[w].end());
  }

  if (config.chains > 1) {
    detail::PooledCounts first{t.n_zw, t.n_dz, t.n_z};
    double worst = 0.0;
    for (std::size_t c = 1; c < config.chains; ++c) {
      worst = std::max(worst, detail::chain_divergence(first, pooled[c], enc.vocabulary.size(), K));
    }
    t.chain_divergence = worst;
  }
  return TopicModel(std::move(t));
}

// Serialization: line-oriented, doubles as C99 hex floats so a round trip
// is bit-exact.

inline constexpr const char* kModelMagic = "oblit-model";
inline constexpr int kModelVersion = 1;

namespace detail {

inline std::string hexfloat(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

inline double parse_hexfloat(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw InvalidArgument("bad number in model file: " + s);
  return v;
}

inline std::string read_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(std::string("model file truncated at ") + what);
  return line;
}

}  // namespace detail

inline void write_model(std::ostream& out, const TopicModel& model) {
  const auto& t = model.tables();
  const std::size_t K = t.config.num_topics;
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "config " << K << ' ' << detail::hexfloat(t.config.alpha_value()) << ' ' << detail::hexfloat(t.config.beta)
      << ' ' << t.config.burn_in_sweeps << ' ' << t.config.retained_samples << ' ' << t.config.sample_lag_sweeps
      << ' ' << t.config.seed << ' ' << t.config.chains << '\n';
  out << "divergence " << (t.chain_divergence ? detail::hexfloat(*t.chain_divergence) : std::string("none")) << '\n';
  out << "vocabulary " << t.vocabulary.size() << '\n';
  for (const auto& w : t.vocabulary) out << w.str() << '\n';
  out << "documents " << t.documents.size() << '\n';
  for (const auto& d : t.documents) out << d << '\n';
  out << "topic_totals";
  for (double x : t.n_z) out << ' ' << detail::hexfloat(x);
  out << '\n';
  auto sparse_rows = [&](const char* name, const std::vector<double>& m, std::size_t rows) {
    out << name << ' ' << rows << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
      bool first = true;
      for (std::size_t z = 0; z < K; ++z) {
        const double v = m[r * K + z];
        if (v == 0.0) continue;
        out << (first ? "" : " ") << z << ':' << detail::hexfloat(v);
        first = false;
      }
      out << '\n';
    }
  };
  sparse_rows("word_topic", t.n_zw, t.vocabulary.size());
  sparse_rows("doc_topic", t.n_dz, t.documents.size());
  out << "cooccurrence " << t.vocabulary.size() << '\n';
  for (const auto& row : t.cooccurrence) {
    bool first = true;
    for (const auto& [d, c] : row) {
      out << (first ? "" : " ") << d << ':' << c;
      first = false;
    }
    out << '\n';
  }
}

inline TopicModel read_model(std::istream& in) {
  using detail::read_line;
  std::istringstream header(read_line(in, "header"));
  std::string magic;
  int version = 0;
  header >> magic >> version;
  if (magic != kModelMagic) throw StageError("not a topic model file");
  if (version != kModelVersion) {
    throw StageError("topic model version " + std::to_string(version) + " does not match expected " +
                     std::to_string(kModelVersion));
  }
  TopicModel::Tables t;
  {
    std::istringstream ss(read_line(in, "config"));
    std::string tag, a, b;
    ss >> tag >> t.config.num_topics >> a >> b >> t.config.burn_in_sweeps >> t.config.retained_samples >>
        t.config.sample_lag_sweeps >> t.config.seed >> t.config.chains;
    if (tag != "config" || !ss) throw InvalidArgument("bad config line in model file");
    t.config.alpha = detail::parse_hexfloat(a);
    t.config.beta = detail::parse_hexfloat(b);
  }
  const std::size_t K = t.config.num_topics;
  {
    std::istringstream ss(read_line(in, "divergence"));
    std::string tag, v;
    ss >> tag >> v;
    if (v != "none") t.chain_divergence = detail::parse_hexfloat(v);
  }
  auto count_line = [&](const char* tag) {
    std::istringstream ss(read_line(in, tag));
    std::string got;
    std::size_t n = 0;
    ss >> got >> n;
    if (got != tag || !ss) throw InvalidArgument(std::string("expected section ") + tag + " in model file");
    return n;
  };
  const std::size_t V = count_line("vocabulary");
  for (std::size_t i = 0; i < V; ++i) t.vocabulary.emplace_back(read_line(in, "vocabulary"));
  const std::size_t D = count_line("documents");
  for (std::size_t i = 0; i < D; ++i) t.documents.push_back(read_line(in, "documents"));
  {
    std::istringstream ss(read_line(in, "topic_totals"));
    std::string tag, v;
    ss >> tag;
    while (ss >> v) t.n_z.push_back(detail::parse_hexfloat(v));
    if (t.n_z.size() != K) throw InvalidArgument("topic_totals has wrong length");
  }
  auto read_sparse = [&](const char* tag, std::size_t rows) {
    if (count_line(tag) != rows) throw InvalidArgument(std::string("row count mismatch in ") + tag);
    std::vector<double> m(rows * K, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      std::istringstream ss(read_line(in, tag));
      std::string cell;
      while (ss >> cell) {
        const auto colon = cell.find(':');
        const std::size_t z = std::stoul(cell.substr(0, colon));
        if (colon == std::string::npos || z >= K) throw InvalidArgument(std::string("bad cell in ") + tag);
        m[r * K + z] = detail::parse_hexfloat(cell.substr(colon + 1));
      }
    }
    return m;
  };
  t.n_zw = read_sparse("word_topic", V);
  t.n_dz = read_sparse("doc_topic", D);
  if (count_line("cooccurrence") != V) throw InvalidArgument("row count mismatch in cooccurrence");
  t.cooccurrence.resize(V);
  for (std::size_t w = 0; w < V; ++w) {
    std::istringstream ss(read_line(in, "cooccurrence"));
    std::string cell;
    while (ss >> cell) {
      const auto colon = cell.find(':');
      if (colon == std::string::npos) throw InvalidArgument("bad cell in cooccurrence");
      const auto d = static_cast<std::uint32_t>(std::stoul(cell.substr(0, colon)));
      if (d >= D) throw InvalidArgument("document index out of range in cooccurrence");
      t.cooccurrence[w].emplace_back(d, std::stoull(cell.substr(colon + 1)));
    }
  }
  return TopicModel(std::move(t));
}

}  // namespace oblit
