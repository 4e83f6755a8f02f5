#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oblit/citegraph.hpp"
#include "oblit/corpus.hpp"
#include "oblit/csv.hpp"
#include "oblit/detector.hpp"
#include "oblit/error.hpp"
#include "oblit/keyvalue.hpp"
#include "oblit/mention_index.hpp"
#include "oblit/metrics.hpp"
#include "oblit/ngram.hpp"
#include "oblit/parallel.hpp"
#include "oblit/rng.hpp"
#include "oblit/tabulator.hpp"
#include "oblit/text.hpp"
#include "oblit/topicmodel.hpp"

namespace oblit {

struct PipelineConfig {
  std::string corpus_path;
  std::string out_dir = "oblit-out";
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: OBLIT_THREADS or hardware concurrency
  int verbosity = 0;
  std::string stopwords_path;
  std::string stem_exceptions_path;
  NgramConfig ngram;
  LdaConfig lda;
  DetectorConfig detector;
  int horizon = 20;
  DecayAggregation decay = DecayAggregation::PerTopicMean;
  int max_depth = 4;
  std::size_t top_alternatives = 5;
  AttributionMode attribution = AttributionMode::Proportional;
  std::size_t permutations = 10000;
  double significance = 0.01;
  std::string label_overrides_path;

  unsigned worker_threads() const { return threads == 0 ? default_threads() : threads; }

  void validate() const {
    if (ngram.n_max < 1) throw InvalidArgument("ngram.n_max must be >= 1");
    lda.validate();
    detector.validate();
    if (horizon < 0) throw InvalidArgument("tabulate.horizon must be >= 0");
    if (max_depth < 2) throw InvalidArgument("graph.max_depth must be >= 2");
    if (!(significance > 0.0 && significance < 1.0)) throw InvalidArgument("metrics.significance must be in (0, 1)");
  }
};

/// Applies "key = value" entries; keys are dotted paths such as lda.topics.
inline void apply_config(PipelineConfig& c, const std::vector<KeyValue>& entries) {
  for (const auto& kv : entries) {
    const std::string& k = kv.key;
    auto positive = [&](double v) {
      if (!(v > 0.0)) throw ParseError(kv.line, k, "must be > 0");
      return v;
    };
    auto probability = [&](double v) {
      if (!(v > 0.0 && v <= 1.0)) throw ParseError(kv.line, k, "must be in (0, 1]");
      return v;
    };
    auto at_least_one = [&](std::uint64_t v) {
      if (v < 1) throw ParseError(kv.line, k, "must be >= 1");
      return v;
    };
    if (k == "corpus") c.corpus_path = kv.value;
    else if (k == "out") c.out_dir = kv.value;
    else if (k == "seed") c.seed = kv.as_uint();
    else if (k == "threads") c.threads = static_cast<unsigned>(kv.as_uint());
    else if (k == "verbosity") c.verbosity = kv.as_int();
    else if (k == "text.stopwords") c.stopwords_path = kv.value;
    else if (k == "text.stem_exceptions") c.stem_exceptions_path = kv.value;
    else if (k == "ngram.n_max") c.ngram.n_max = at_least_one(kv.as_uint());
    else if (k == "ngram.min_count") c.ngram.min_count = kv.as_uint();
    else if (k == "ngram.min_distinct_docs") c.ngram.min_distinct_docs = kv.as_uint();
    else if (k == "lda.topics") c.lda.num_topics = at_least_one(kv.as_uint());
    else if (k == "lda.alpha") c.lda.alpha = positive(kv.as_real());
    else if (k == "lda.beta") c.lda.beta = positive(kv.as_real());
    else if (k == "lda.burn_in") c.lda.burn_in_sweeps = at_least_one(kv.as_uint());
    else if (k == "lda.samples") c.lda.retained_samples = at_least_one(kv.as_uint());
    else if (k == "lda.lag") c.lda.sample_lag_sweeps = at_least_one(kv.as_uint());
    else if (k == "lda.chains") c.lda.chains = at_least_one(kv.as_uint());
    else if (k == "detector.p_catch") c.detector.p_th_catch = probability(kv.as_real());
    else if (k == "detector.p_found") c.detector.p_th_found = probability(kv.as_real());
    else if (k == "tabulate.horizon") c.horizon = kv.as_int();
    else if (k == "tabulate.decay") {
      if (kv.value == "per_topic_mean") c.decay = DecayAggregation::PerTopicMean;
      else if (kv.value == "pooled") c.decay = DecayAggregation::Pooled;
      else throw ParseError(kv.line, k, "expected per_topic_mean or pooled");
    } else if (k == "graph.max_depth") {
      c.max_depth = kv.as_int();
      if (c.max_depth < 2) throw ParseError(kv.line, k, "must be >= 2");
    } else if (k == "graph.top_alternatives") c.top_alternatives = kv.as_uint();
    else if (k == "metrics.attribution") {
      if (kv.value == "proportional") c.attribution = AttributionMode::Proportional;
      else if (kv.value == "full") c.attribution = AttributionMode::FullCount;
      else throw ParseError(kv.line, k, "expected proportional or full");
    } else if (k == "metrics.permutations") c.permutations = kv.as_uint();
    else if (k == "metrics.significance") c.significance = probability(kv.as_real());
    else if (k == "metrics.labels") c.label_overrides_path = kv.value;
    else throw ParseError(kv.line, k, "unknown configuration key");
  }
}

inline PipelineConfig read_pipeline_config(const std::string& path) {
  PipelineConfig c;
  apply_config(c, read_key_values(path));
  return c;
}

// ---------------------------------------------------------------------------
// Occurrence artifact

inline constexpr const char* kOccurrencesMagic = "oblit-occurrences";
inline constexpr int kOccurrencesVersion = 1;

inline void write_occurrences(std::ostream& out, const std::vector<OccurrenceTuple>& tuples) {
  out << kOccurrencesMagic << '\t' << kOccurrencesVersion << '\n';
  for (const auto& t : tuples) out << t.ngram.str() << '\t' << t.cited_id << '\n';
}

inline std::vector<OccurrenceTuple> read_occurrences(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw StageError("empty occurrences file");
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != kOccurrencesMagic) throw StageError("not an occurrences file");
    if (version != kOccurrencesVersion) {
      throw StageError("occurrences version " + std::to_string(version) + " does not match expected " +
                       std::to_string(kOccurrencesVersion));
    }
  }
  std::vector<OccurrenceTuple> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw ParseError(lineno, "occurrence", "expected ngram<TAB>cited_id");
    }
    out.push_back({Ngram(line.substr(0, tab)), line.substr(tab + 1)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stages

/// Artifact and table file names inside the output directory.
namespace artifact {
inline constexpr const char* kOccurrences = "occurrences.tsv";
inline constexpr const char* kModel = "model.txt";
inline constexpr const char* kProfiles = "profiles.tsv";
inline constexpr const char* kFollowers = "followers.tsv";
}  // namespace artifact

/// The table families a report directory holds, each with its files.
inline const std::vector<std::pair<std::string, std::vector<std::string>>>& report_families() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> families = {
      {"topics", {"topics.csv"}},
      {"followers", {"followers.csv", "topic_credit.csv"}},
      {"temporal_decay", {"temporal_decay.csv", "indirect_adjusted.csv"}},
      {"regressions", {"regressions.csv", "regression_bands.csv"}},
      {"path_histogram", {"path_histogram.csv"}},
      {"alternatives", {"alternatives.csv"}},
      {"rank_deltas", {"rank_deltas.csv"}},
      {"catchphrase_stats", {"catchphrase_origin.csv", "catchphrase_classes.csv", "author_counts.csv"}},
  };
  return families;
}

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config, std::ostream& log = std::cerr) : cfg_(std::move(config)), log_(log) {
    cfg_.validate();
  }

  const PipelineConfig& config() const noexcept { return cfg_; }

  void ingest() {
    const Corpus& c = corpus();
    const auto tuples = extract_occurrences(c, cfg_.ngram, normalizer());
    say("ingest", std::to_string(c.papers().size()) + " papers, " + std::to_string(c.contexts().size()) +
                      " contexts, " + std::to_string(tuples.size()) + " occurrence tuples");
    auto out = open_out(artifact::kOccurrences);
    write_occurrences(out, tuples);
  }

  void train() {
    auto in = open_in(artifact::kOccurrences, "ingest");
    const auto tuples = read_occurrences(in);
    LdaConfig lda = cfg_.lda;
    lda.seed = derive_seed(cfg_.seed, "train");
    say("train", std::to_string(tuples.size()) + " tuples, K=" + std::to_string(lda.num_topics));
    const TopicModel model = gibbs_train(tuples, lda, cfg_.worker_threads());
    if (model.chain_divergence()) say("train", "chain divergence " + csv::number(*model.chain_divergence()));
    auto out = open_out(artifact::kModel);
    write_model(out, model);
  }

  void detect() {
    const TopicModel& m = model();
    const auto profiles = detect_topics(m, corpus(), cfg_.detector);
    say("detect", std::to_string(profiles.size()) + " topics");
    {
      auto out = open_out(artifact::kProfiles);
      write_profiles(out, profiles);
    }
    auto out = open_out("topics.csv");
    csv::Writer w(out, {"topic_id", "kind", "value", "estimate", "halfwidth", "entropy_bits"});
    for (const auto& p : profiles) {
      for (const auto& c : p.catchphrases) {
        w.row(p.topic_id, "catchphrase", c.ngram.str(), c.p.estimate, c.p.halfwidth, entropy_doc_given_ngram(m, c.ngram));
      }
      for (const auto& f : p.foundational_papers) {
        w.row(p.topic_id, "foundational", f.paper_id, f.p.estimate, f.p.halfwidth, entropy_ngram_given_doc(m, f.paper_id));
      }
    }
  }

  void tabulate() {
    const auto& profiles = this->profiles();
    std::vector<Ngram> vocabulary;
    for (const auto& p : profiles)
      for (const auto& c : p.catchphrases) vocabulary.push_back(c.ngram);
    std::vector<FollowerTable> tables;
    if (!vocabulary.empty()) {
      const MentionIndex index = build_mention_index(corpus(), vocabulary, normalizer(), cfg_.worker_threads());
      tables = oblit::tabulate(profiles, corpus(), index, cfg_.worker_threads());
    }
    say("tabulate", std::to_string(tables.size()) + " follower tables");
    {
      auto out = open_out(artifact::kFollowers);
      write_followers(out, tables);
    }
    {
      auto out = open_out("followers.csv");
      write_follower_series(out, tables);
    }
    {
      auto out = open_out("topic_credit.csv");
      csv::Writer w(out, {"topic_id", "first_foundational_year", "citations", "hidden", "mentions", "hidden_fraction",
                          "p_cite_given_mention", "p_halfwidth"});
      for (const auto& t : tables) {
        const YearCounts c = t.totals();
        const double hf = c.followers() == 0 ? NAN : hidden_fraction(t, t.first_foundational_year);
        const Estimate p = c.mentions() == 0 ? Estimate{NAN, NAN} : p_cite_given_mention(t);
        w.row(t.topic_id, t.first_foundational_year, c.citations(), c.hidden(), c.mentions(), hf, p.estimate, p.halfwidth);
      }
    }
    auto out = open_out("temporal_decay.csv");
    bool any_lag0 = false;
    for (const auto& t : tables) any_lag0 = any_lag0 || t.at_lag(0).mentions() > 0;
    if (any_lag0) {
      write_decay(out, temporal_decay(tables, cfg_.horizon, cfg_.decay));
    } else {
      write_decay(out, {});
      say("tabulate", "no topic has mentions at lag 0; temporal decay table left empty");
    }
  }

  void graph() {
    const auto& profiles = this->profiles();
    const auto& tables = this->tables();
    const CitationGraph g(corpus());
    std::vector<PathHistogram> hists;
    for (std::size_t i = 0; i < profiles.size(); ++i) hists.push_back(path_histogram(g, tables[i], profiles[i], cfg_.max_depth));
    {
      auto out = open_out("path_histogram.csv");
      write_path_histograms(out, hists);
    }
    {
      auto out = open_out("alternatives.csv");
      csv::Writer w(out, {"topic_id", "rank", "paper_id", "cocitations", "path_to_foundational"});
      for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto alts = top_alternatives(g, tables[i], profiles[i], cfg_.top_alternatives, cfg_.max_depth);
        for (std::size_t r = 0; r < alts.size(); ++r) {
          const auto& a = alts[r];
          w.row(profiles[i].topic_id, r + 1, a.paper_id, a.cocitations,
                a.path_to_foundational ? std::to_string(*a.path_to_foundational) : std::string("NA"));
        }
      }
    }
    auto out = open_out("indirect_adjusted.csv");
    csv::Writer w(out, {"topic_id", "lag", "mentions", "p_cite_given_mention", "p_cite_or_indirect_given_mention"});
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      for (int lag = 0; lag <= cfg_.horizon; ++lag) {
        const YearCounts c = tables[i].at_lag(lag);
        if (c.mentions() == 0) continue;
        w.row(profiles[i].topic_id, lag, c.mentions(),
              static_cast<double>(c.n_both) / static_cast<double>(c.mentions()),
              indirect_adjusted_p(tables[i], g, profiles[i], lag));
      }
    }
    say("graph", std::to_string(hists.size()) + " path histograms");
  }

  void metrics() {
    const auto& profiles = this->profiles();
    const auto& tables = this->tables();
    write_regressions(tables);

    const CitationGraph g(corpus());
    std::map<std::string, double> c_explicit;
    std::vector<std::string> papers;
    for (const auto& p : profiles) {
      for (const auto& f : p.foundational_papers) {
        papers.push_back(f.paper_id);
        const auto node = g.node(f.paper_id);
        c_explicit[f.paper_id] = node ? static_cast<double>(g.in_degree(*node)) : 0.0;
      }
    }
    const auto h = attribute_hidden_to_papers(profiles, tables, cfg_.attribution);
    {
      auto out = open_out("rank_deltas.csv");
      csv::Writer w(out, {"paper_id", "rank_explicit", "rank_with_hidden", "rank_change", "c_explicit", "h_attributed"});
      for (const auto& r : rank_deltas(papers, c_explicit, h)) {
        w.row(r.paper_id, r.rank_explicit, r.rank_with_hidden, static_cast<long long>(r.delta()), r.c_explicit, r.h_attributed);
      }
    }
    {
      const OriginResult o = catchphrase_origin(profiles, corpus(), normalizer());
      auto out = open_out("catchphrase_origin.csv");
      csv::Writer w(out, {"considered", "without_catchphrase", "excluded_no_title_or_abstract", "fraction_without"});
      w.row(o.considered, o.without_catchphrase, o.excluded, o.fraction());
    }
    std::map<Ngram, CatchphraseClass> overrides;
    if (!cfg_.label_overrides_path.empty()) overrides = read_label_overrides(cfg_.label_overrides_path, normalizer());
    const auto classes = classify_catchphrases(profiles, corpus(), overrides, normalizer());
    {
      auto out = open_out("catchphrase_classes.csv");
      csv::Writer w(out, {"topic_id", "class"});
      for (const auto& c : classes) w.row(c.topic_id, to_string(c.cls));
    }
    const AuthorCountReport rep = author_count_stats(profiles, corpus(), classes);
    auto out = open_out("author_counts.csv");
    csv::Writer w(out, {"class", "papers", "mean_authors", "ci_halfwidth", "se_defined"});
    for (const auto& s : rep.stats) w.row(to_string(s.cls), s.papers, s.mean, s.halfwidth, s.se_defined);
    for (auto cls : rep.omitted) say("metrics", std::string("class ") + to_string(cls) + " has no foundational papers; omitted");
    say("metrics", "done");
  }

  /// Every stage in order into the output directory.
  void report() {
    ingest();
    train();
    detect();
    tabulate();
    graph();
    metrics();
  }

 private:
  void say(const std::string& stage, const std::string& msg) {
    if (cfg_.verbosity > 0) log_ << "[" << stage << "] " << msg << '\n';
  }

  std::filesystem::path path(const std::string& name) const { return std::filesystem::path(cfg_.out_dir) / name; }

  std::ofstream open_out(const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(cfg_.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg_.out_dir + ": " + ec.message());
    std::ofstream f(path(name), std::ios::binary);
    if (!f) throw IoError("cannot write " + path(name).string());
    return f;
  }

  std::ifstream open_in(const std::string& name, const char* producer) const {
    std::ifstream f(path(name), std::ios::binary);
    if (!f) {
      throw StageError("missing artifact " + path(name).string() + "; run the \"" + producer + "\" subcommand first");
    }
    return f;
  }

  const TextNormalizer& normalizer() {
    if (!norm_) {
      if (cfg_.stopwords_path.empty() && cfg_.stem_exceptions_path.empty()) {
        norm_ = std::make_unique<TextNormalizer>();
      } else {
        const auto stop = cfg_.stopwords_path.empty() ? default_stopwords() : read_word_list(cfg_.stopwords_path);
        const auto exc = cfg_.stem_exceptions_path.empty() ? std::unordered_map<std::string, std::string>{}
                                                            : TextNormalizer::read_exceptions(cfg_.stem_exceptions_path);
        norm_ = std::make_unique<TextNormalizer>(stop, exc);
      }
    }
    return *norm_;
  }

  const Corpus& corpus() {
    if (!corpus_) {
      if (cfg_.corpus_path.empty()) throw InvalidArgument("no corpus path configured (key \"corpus\" or --corpus)");
      corpus_ = std::make_unique<Corpus>(oblit::ingest(cfg_.corpus_path));
    }
    return *corpus_;
  }

  const TopicModel& model() {
    if (!model_) {
      auto in = open_in(artifact::kModel, "train");
      model_ = std::make_unique<TopicModel>(read_model(in));
    }
    return *model_;
  }

  const std::vector<TopicProfile>& profiles() {
    if (!profiles_) {
      auto in = open_in(artifact::kProfiles, "detect");
      profiles_ = std::make_unique<std::vector<TopicProfile>>(read_profiles(in));
    }
    return *profiles_;
  }

  const std::vector<FollowerTable>& tables() {
    if (!tables_) {
      auto in = open_in(artifact::kFollowers, "tabulate");
      tables_ = std::make_unique<std::vector<FollowerTable>>(read_followers(in));
      if (tables_->size() != profiles().size()) throw StageError("followers and profiles disagree; rerun \"tabulate\"");
      for (std::size_t i = 0; i < tables_->size(); ++i) {
        if ((*tables_)[i].topic_id != profiles()[i].topic_id) throw StageError("followers and profiles disagree; rerun \"tabulate\"");
      }
    }
    return *tables_;
  }

  void write_regressions(const std::vector<FollowerTable>& tables) {
    std::vector<double> c, h, m, p;
    for (const auto& t : tables) {
      const YearCounts y = t.totals();
      if (y.citations() >= 1 && y.hidden() >= 1) {
        c.push_back(static_cast<double>(y.citations()));
        h.push_back(static_cast<double>(y.hidden()));
      }
      if (y.mentions() >= 1) {
        m.push_back(static_cast<double>(y.mentions()));
        p.push_back(static_cast<double>(y.n_both) / static_cast<double>(y.mentions()));
      }
    }
    auto out = open_out("regressions.csv");
    auto bands = open_out("regression_bands.csv");
    csv::Writer w(out, {"fit", "n", "slope", "slope_ci_halfwidth", "intercept", "degenerate", "spearman_rho",
                        "spearman_p", "h0_rejected", "status"});
    csv::Writer b(bands, {"fit", "x", "transformed_x", "fitted", "band_lower", "band_upper"});
    auto emit = [&](const std::string& name, auto fit_fn, const std::vector<double>& xs, const std::vector<double>& ys) {
      std::optional<SpearmanResult> rho;
      std::string status = "ok";
      if (xs.size() >= 3) {
        try {
          rho = spearman(xs, ys, {cfg_.permutations, derive_seed(cfg_.seed, "metrics-" + name), cfg_.significance});
        } catch (const InvalidArgument& e) {
          status = e.what();
        }
      }
      try {
        const RegressionFit f = fit_fn(xs, ys);
        w.row(name, f.n, f.slope, f.slope_halfwidth, f.intercept, f.degenerate, rho ? rho->rho : NAN,
              rho ? rho->p_value : NAN, rho ? (rho->p_value < cfg_.significance) : false, status);
        for (const auto& s : band_samples(f, 100)) b.row(name, std::pow(10.0, s.x), s.x, s.fitted, s.lower, s.upper);
      } catch (const InvalidArgument& e) {
        w.row(name, xs.size(), NAN, NAN, NAN, false, NAN, NAN, false, std::string("insufficient data: ") + e.what());
      }
    };
    emit("loglog_hidden_vs_citations", loglog_fit, c, h);
    emit("loglinear_p_cite_vs_mentions", loglinear_fit, m, p);
  }

  PipelineConfig cfg_;
  std::ostream& log_;
  std::unique_ptr<TextNormalizer> norm_;
  std::unique_ptr<Corpus> corpus_;
  std::unique_ptr<TopicModel> model_;
  std::unique_ptr<std::vector<TopicProfile>> profiles_;
  std::unique_ptr<std::vector<FollowerTable>> tables_;
};

}  // namespace oblit
