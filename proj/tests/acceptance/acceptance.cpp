// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oblit/oblit.hpp"
#include "../support/oracles.hpp"

using namespace oblit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MentionIndex index_for(const std::vector<TopicProfile>& profiles, const Corpus& corpus) {
  std::vector<Ngram> vocab;
  for (const auto& p : profiles)
    for (const auto& c : p.catchphrases) vocab.push_back(c.ngram);
  return build_mention_index(corpus, vocab, default_normalizer(), 1);
}

std::vector<FollowerTable> planted_tables(const SyntheticCorpus& s) {
  const auto profiles = planted_profiles(s.truth);
  return tabulate(profiles, s.corpus, index_for(profiles, s.corpus), 1);
}

// The default synthetic corpus run through the whole pipeline twice.
struct PlantedRun {
  fs::path root;
  SyntheticCorpus syn;
  double seconds = 0.0;
  std::string error;
};

PlantedRun& planted_run() {
  static PlantedRun run = [] {
    PlantedRun r;
    r.root = fs::temp_directory_path() / "oblit_acceptance";
    fs::remove_all(r.root);
    r.syn = generate(read_generator_spec(std::string(OBLIT_SOURCE_DIR) + "/configs/default_spec.conf"));
    write_synthetic(r.syn, (r.root / "synthetic").string());
    try {
      for (const char* out : {"report_a", "report_b"}) {
        auto cfg = read_pipeline_config(std::string(OBLIT_SOURCE_DIR) + "/configs/synthetic.conf");
        cfg.corpus_path = (r.root / "synthetic" / "corpus.jsonl").string();
        cfg.label_overrides_path = (r.root / "synthetic" / "labels.tsv").string();
        cfg.out_dir = (r.root / out).string();
        std::ostringstream log;
        const auto t0 = std::chrono::steady_clock::now();
        Pipeline(cfg, log).report();
        if (r.seconds == 0.0) r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    return r;
  }();
  return run;
}

Outcome planted_pair_recovery() {
  auto& r = planted_run();
  if (!r.error.empty()) return {false, r.error};
  std::ifstream in(r.root / "report_a" / "profiles.tsv");
  const auto score = score_recovery(read_profiles(in), r.syn.truth);
  const bool ok = score.recovery_rate() >= 0.90 && score.false_catchphrases.empty() && r.seconds <= 300.0;
  return {ok, std::to_string(score.recovered_pairs) + "/" + std::to_string(score.planted_pairs) + " pairs, " +
                  std::to_string(score.false_catchphrases.size()) + " false catchphrases, " +
                  fmt("%.1f s", r.seconds)};
}

Outcome worked_examples() {
  TopicModel::Tables t;
  t.config.num_topics = 2;
  t.vocabulary = {Ngram("kpz"), Ngram("other")};
  t.documents = {"d", "e"};
  // word "kpz": 1916 of its 1919 tuples in topic 0; paper d: 2091 of topic 0's 9742.
  t.n_zw = {1916, 3, 9742 - 1916, 100};
  t.n_dz = {2091, 50, 9742 - 2091, 53};
  t.n_z = {9742, 103};
  t.cooccurrence = {{{0, 1000}, {1, 919}}, {{0, 1141}, {1, 6785}}};
  const TopicModel m(std::move(t));
  const auto a = m.p_topic_given_ngram(Ngram("kpz"), 0);
  const auto b = m.p_doc_given_topic("d", 0);
  auto r3 = [](double x) { return std::round(x * 1000.0) / 1000.0; };
  const bool ok = r3(a.estimate) == 0.998 && r3(a.halfwidth) == 0.002 && r3(b.estimate) == 0.215 &&
                  r3(b.halfwidth) == 0.008;
  return {ok, fmt("P(z|w) = %.3f", a.estimate) + fmt(" +- %.3f", a.halfwidth) + fmt(", P(d|z) = %.3f", b.estimate) +
                  fmt(" +- %.3f", b.halfwidth)};
}

Outcome exact_posterior() {
  std::size_t matched = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto tuples = oracle::random_block_corpus(seed);
    if (tuples.size() > 12) return {false, "seed " + std::to_string(seed) + " has more than 12 tuples"};
    LdaConfig cfg;
    cfg.num_topics = 2;
    cfg.alpha = 0.1;
    cfg.beta = 0.01;
    cfg.burn_in_sweeps = 200;
    cfg.retained_samples = 20;
    cfg.sample_lag_sweeps = 5;
    cfg.seed = seed;
    const auto m = gibbs_train(tuples, cfg, 1);
    std::map<std::string, double> pooled;
    for (const auto& w : m.vocabulary()) pooled[w.str()] = m.p_topic_given_ngram(w, 0).estimate;
    matched += oracle::same_argmax_structure(oracle::exact_topic_posterior(tuples, 0.1, 0.01), pooled);
  }
  return {matched == 20, std::to_string(matched) + "/20 seeds match full enumeration"};
}

Outcome tabulation_oracle() {
  std::size_t exact = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto f = oracle::random_tabulation_fixture(seed);
    const auto tables = tabulate(f.profiles, f.corpus, index_for(f.profiles, f.corpus), 2);
    bool same = tables.size() == f.profiles.size();
    for (std::size_t i = 0; same && i < tables.size(); ++i) {
      std::map<int, oracle::BruteCounts> got;
      for (const auto& [y, c] : tables[i].by_year) got[y] = {c.n_both, c.n_cite_only, c.n_mention_only};
      same = got == oracle::brute_force_table(f.profiles[i], f.corpus);
    }
    exact += same;
  }
  return {exact == 100, std::to_string(exact) + "/100 fixtures identical"};
}

Outcome decay_recovery() {
  GeneratorSpec spec;
  spec.mode = GenerationMode::Sampled;
  spec.p_cite_start = 0.8;
  spec.p_cite_end = 0.64;
  std::size_t covered = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    spec.seed = seed;
    const auto series = temporal_decay(planted_tables(generate(spec)), spec.horizon);
    for (const auto& pt : series) {
      ++total;
      covered += pt.ci_defined && std::abs(pt.mean - spec.p_cite_at(pt.lag)) <= pt.halfwidth;
    }
  }
  const double rate = static_cast<double>(covered) / static_cast<double>(total);
  return {rate >= 0.90, std::to_string(covered) + "/" + std::to_string(total) + fmt(" lag CIs cover (%.3f)", rate)};
}

Outcome scaling_recovery() {
  GeneratorSpec spec;
  spec.scaling = true;
  spec.mode = GenerationMode::Sampled;
  std::size_t covered = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    spec.seed = seed;
    std::vector<double> c, h;
    for (const auto& t : planted_tables(generate(spec))) {
      c.push_back(static_cast<double>(t.totals().citations()));
      h.push_back(static_cast<double>(t.totals().hidden()));
    }
    const auto fit = loglog_fit(c, h);
    covered += std::abs(fit.slope - 0.763) <= fit.slope_halfwidth;
  }
  std::vector<double> c, h;
  for (double x : {10.0, 40.0, 90.0, 300.0, 1000.0, 5000.0}) {
    c.push_back(x);
    h.push_back(2.5 * std::pow(x, 0.763));
  }
  const double noiseless = loglog_fit(c, h).slope;
  const bool ok = covered >= 45 && std::abs(noiseless - 0.763) <= 1e-9;
  return {ok, std::to_string(covered) + "/50 CIs cover 0.763, noiseless slope " + fmt("%.12f", noiseless)};
}

Outcome path_analysis() {
  std::size_t mismatches = 0, checks = 0;
  for (std::size_t n = 1; n <= 30; ++n) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto c = oracle::random_graph_corpus(seed * 1000 + n, n);
      const CitationGraph g(c);
      for (const auto& s : c.papers()) {
        for (const auto& t : c.papers()) {
          if (s.paper_id == t.paper_id) continue;
          for (int depth : {1, 2, 3, 4, 6}) {
            ++checks;
            mismatches += shortest_citation_path(g, s.paper_id, {t.paper_id}, depth) !=
                          oracle::exhaustive_shortest_path(c, s.paper_id, {t.paper_id}, depth);
          }
        }
      }
    }
  }
  const auto& syn = planted_run().syn;
  const CitationGraph g(syn.corpus);
  const auto profiles = planted_profiles(syn.truth);
  const auto tables = tabulate(profiles, syn.corpus, index_for(profiles, syn.corpus), 1);
  std::size_t two = 0, hidden = 0;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto hist = path_histogram(g, tables[i], profiles[i]);
    two += hist.at(2);
    hidden += hist.total();
  }
  const double share = static_cast<double>(two) / static_cast<double>(hidden);
  return {mismatches == 0 && std::abs(share - 0.6) <= 0.05,
          std::to_string(checks - mismatches) + "/" + std::to_string(checks) + " BFS checks, " +
              fmt("depth-2 share %.3f", share)};
}

Outcome conservation() {
  std::size_t failures = 0;
  std::string first;
  auto expect = [&](bool ok, const std::string& what, std::uint64_t seed) {
    if (!ok && failures++ == 0) first = what + " (fixture " + std::to_string(seed) + ")";
  };
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    // Topic model: normalization and tuple conservation.
    std::mt19937_64 rng(seed);
    std::vector<OccurrenceTuple> tuples;
    const std::size_t n = 20 + rng() % 200;
    for (std::size_t i = 0; i < n; ++i)
      tuples.push_back({Ngram("w" + std::to_string(rng() % 25)), "d" + std::to_string(rng() % 12)});
    LdaConfig cfg;
    cfg.num_topics = 2 + rng() % 5;
    cfg.burn_in_sweeps = 20;
    cfg.retained_samples = 5;
    cfg.sample_lag_sweeps = 2;
    cfg.seed = seed;
    const auto m = gibbs_train(tuples, cfg, 1);
    double nz = 0.0;
    std::uint64_t co = 0;
    for (std::size_t z = 0; z < m.num_topics(); ++z) nz += m.topic_total(z);
    for (std::size_t w = 0; w < m.vocabulary().size(); ++w) co += m.ngram_total(w);
    expect(std::abs(nz - static_cast<double>(n)) <= 1e-9 && co == n, "tuple conservation", seed);
    for (const auto& w : m.vocabulary()) {
      double s = 0.0;
      for (std::size_t z = 0; z < m.num_topics(); ++z) s += m.p_topic_given_ngram(w, z).estimate;
      expect(std::abs(s - 1.0) <= 1e-9, "sum_z P(z|w)", seed);
    }
    for (std::size_t z = 0; z < m.num_topics(); ++z) {
      if (!(m.topic_total(z) > 0.0)) continue;
      double s = 0.0;
      for (const auto& d : m.documents()) s += m.p_doc_given_topic(d, z).estimate;
      expect(std::abs(s - 1.0) <= 1e-9, "sum_d P(d|z)", seed);
    }

    // Attribution conserves hidden mass; ranks stay permutations.
    const auto f = oracle::random_tabulation_fixture(seed);
    const auto tables = tabulate(f.profiles, f.corpus, index_for(f.profiles, f.corpus), 1);
    double hidden = 0.0, attributed = 0.0;
    for (const auto& t : tables) hidden += static_cast<double>(t.totals().hidden());
    const auto shares = attribute_hidden_to_papers(f.profiles, tables);
    for (const auto& [id, s] : shares) attributed += s;
    expect(std::abs(hidden - attributed) <= 1e-9, "hidden mass", seed);

    std::vector<std::string> ids;
    std::map<std::string, double> explicit_c;
    for (const auto& p : f.corpus.papers()) {
      ids.push_back(p.paper_id);
      for (const auto& r : p.references)
        if (f.corpus.contains(r)) explicit_c[r] += 1.0;
    }
    const auto rows = rank_deltas(ids, explicit_c, shares);
    std::set<std::size_t> r1, r2;
    long sum = 0;
    for (const auto& r : rows) {
      r1.insert(r.rank_explicit);
      r2.insert(r.rank_with_hidden);
      sum += r.delta();
    }
    expect(rows.size() == ids.size() && r1 == r2 && r1.size() == rows.size() && *r1.begin() == 1 &&
               *r1.rbegin() == rows.size() && sum == 0,
           "rank permutation", seed);
  }
  return {failures == 0, failures == 0 ? "100 fixtures, all invariants hold" : std::to_string(failures) + " failures, first: " + first};
}

Outcome determinism() {
  auto& r = planted_run();
  if (!r.error.empty()) return {false, r.error};
  std::size_t files = 0, differing = 0;
  std::set<std::string> names;
  for (const char* dir : {"report_a", "report_b"})
    for (const auto& e : fs::directory_iterator(r.root / dir)) names.insert(e.path().filename().string());
  for (const auto& name : names) {
    ++files;
    const auto a = r.root / "report_a" / name, b = r.root / "report_b" / name;
    differing += !fs::exists(a) || !fs::exists(b) || slurp(a) != slurp(b);
  }
  return {differing == 0 && files > 0, std::to_string(files - differing) + "/" + std::to_string(files) + " files identical"};
}

Outcome entropy_ordering() {
  auto& r = planted_run();
  if (!r.error.empty()) return {false, r.error};
  std::ifstream in(r.root / "report_a" / "model.txt");
  const auto m = read_model(in);
  const std::set<std::string> bg(r.syn.truth.background_stems.begin(), r.syn.truth.background_stems.end());

  // Background n-grams: every stem from the background vocabulary.
  std::vector<std::pair<std::uint64_t, double>> background;
  for (std::size_t w = 0; w < m.vocabulary().size(); ++w) {
    const auto stems = m.vocabulary()[w].stems();
    if (std::all_of(stems.begin(), stems.end(), [&](const std::string& s) { return bg.count(s) > 0; }))
      background.emplace_back(m.ngram_total(w), entropy_doc_given_ngram(m, m.vocabulary()[w]));
  }
  std::size_t phrase_pairs = 0, phrase_bad = 0, paper_pairs = 0, paper_bad = 0;
  double cp_sum = 0, bg_sum = 0, f_sum = 0, c_sum = 0;
  for (const auto& t : r.syn.truth.topics) {
    const auto wi = m.word_id(t.catchphrase_stems);
    if (!wi) {
      ++phrase_bad;
      continue;
    }
    const double f = static_cast<double>(m.ngram_total(*wi));
    const double s = entropy_doc_given_ngram(m, t.catchphrase_stems);
    for (const auto& [count, sb] : background) {
      if (static_cast<double>(count) < f / 2.0 || static_cast<double>(count) > f * 2.0) continue;
      ++phrase_pairs;
      phrase_bad += !(s < sb);
      cp_sum += s;
      bg_sum += sb;
    }
    for (std::size_t i = 0; i < t.foundational.size(); ++i) {
      ++paper_pairs;
      const double sf = entropy_ngram_given_doc(m, t.foundational[i]);
      const double sc = entropy_ngram_given_doc(m, t.controls[i]);
      paper_bad += !(sf < sc);
      f_sum += sf;
      c_sum += sc;
    }
  }
  const bool ok = phrase_pairs > 0 && phrase_bad == 0 && paper_pairs > 0 && paper_bad == 0;
  return {ok, std::to_string(phrase_pairs - phrase_bad) + "/" + std::to_string(phrase_pairs) +
                  " frequency-matched pairs ordered" + fmt(" (S(d|w) %.2f", cp_sum / std::max<double>(1, phrase_pairs)) +
                  fmt(" vs %.2f), ", bg_sum / std::max<double>(1, phrase_pairs)) + std::to_string(paper_pairs - paper_bad) +
                  "/" + std::to_string(paper_pairs) + " papers below control" +
                  fmt(" (S(w|d) %.2f", f_sum / std::max<double>(1, paper_pairs)) +
                  fmt(" vs %.2f)", c_sum / std::max<double>(1, paper_pairs))};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"planted-pair recovery", planted_pair_recovery},
      {"worked-example fidelity", worked_examples},
      {"exact-posterior oracle", exact_posterior},
      {"tabulation oracle", tabulation_oracle},
      {"temporal decay recovery", decay_recovery},
      {"scaling recovery", scaling_recovery},
      {"path analysis", path_analysis},
      {"conservation suite", conservation},
      {"determinism", determinism},
      {"entropy ordering", entropy_ordering},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
