#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "oblit/detector.hpp"

using namespace oblit;
using Catch::Matchers::WithinAbs;

namespace {

// Builds a model directly from a (word, doc) co-occurrence matrix and a
// per-tuple-cell topic split. zw[w][z] and dz[d][z] are pooled counts.
TopicModel make_model(std::size_t K, const std::vector<std::string>& words, const std::vector<std::string>& docs,
                      const std::vector<std::vector<std::uint64_t>>& cooc, const std::vector<std::vector<double>>& zw,
                      const std::vector<std::vector<double>>& dz) {
  TopicModel::Tables t;
  t.config.num_topics = K;
  for (const auto& w : words) t.vocabulary.push_back(Ngram(w));
  t.documents = docs;
  t.n_z.assign(K, 0.0);
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (std::size_t z = 0; z < K; ++z) {
      t.n_zw.push_back(zw[w][z]);
      t.n_z[z] += zw[w][z];
    }
  }
  for (std::size_t d = 0; d < docs.size(); ++d)
    for (std::size_t z = 0; z < K; ++z) t.n_dz.push_back(dz[d][z]);
  t.cooccurrence.resize(words.size());
  for (std::size_t w = 0; w < words.size(); ++w)
    for (std::size_t d = 0; d < docs.size(); ++d)
      if (cooc[w][d] > 0) t.cooccurrence[w].emplace_back(static_cast<std::uint32_t>(d), cooc[w][d]);
  return TopicModel(std::move(t));
}

Corpus papers_for(const std::vector<std::string>& ids, int first_year = 1990) {
  std::vector<PaperRecord> ps;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    PaperRecord p;
    p.paper_id = ids[i];
    p.year = first_year + static_cast<int>(i);
    ps.push_back(p);
  }
  return Corpus(ps, {});
}

double naive_entropy(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  double h = 0.0;
  for (double c : counts)
    if (c > 0) h -= (c / total) * std::log(c / total) / std::log(2.0);
  return h;
}

struct RandomModel {
  std::vector<std::string> words, docs;
  std::vector<std::vector<std::uint64_t>> cooc;
  TopicModel model;
};

RandomModel random_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RandomModel r;
  const std::size_t K = 2 + rng() % 4, V = 3 + rng() % 10, D = 2 + rng() % 8;
  for (std::size_t i = 0; i < V; ++i) r.words.push_back("w" + std::to_string(i));
  for (std::size_t i = 0; i < D; ++i) r.docs.push_back("d" + std::to_string(i));
  r.cooc.assign(V, std::vector<std::uint64_t>(D, 0));
  std::vector<std::vector<double>> zw(V, std::vector<double>(K, 0.0)), dz(D, std::vector<double>(K, 0.0));
  for (std::size_t w = 0; w < V; ++w) {
    const std::size_t n = 1 + rng() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t d = rng() % D, z = rng() % K;
      // skew toward a word-specific topic so some pass the thresholds
      const std::size_t zz = (rng() % 4 == 0) ? z : w % K;
      ++r.cooc[w][d];
      zw[w][zz] += 1.0;
      dz[d][zz] += 1.0;
    }
  }
  r.model = make_model(K, r.words, r.docs, r.cooc, zw, dz);
  return r;
}

}  // namespace

TEST_CASE("thresholds pick catchphrases and foundational papers", "[detector][examples]") {
  // Topic 0 holds 1000 tuples: "kpz" sits there 898 of 900 times and paper
  // "f" takes 215 of them. Topic 1's best word is at 0.90, so it is dropped.
  const auto m = make_model(2, {"kpz", "weak", "x"}, {"f", "g", "h"},
                            {{215, 0, 685}, {0, 500, 400}, {0, 60, 60}}, {{898, 2}, {90, 810}, {12, 108}},
                            {{215, 0}, {0, 450}, {785, 470}});
  const auto corpus = papers_for({"f", "g", "h"}, 1986);
  const auto profiles = detect_topics(m, corpus, DetectorConfig{});
  REQUIRE(profiles.size() == 1);
  const auto& p = profiles[0];
  CHECK(p.topic_id == 0);
  REQUIRE(p.catchphrases.size() == 1);
  CHECK(p.catchphrases[0].ngram == Ngram("kpz"));
  CHECK(std::round(p.catchphrases[0].p.estimate * 1000) == 998);
  CHECK_THAT(p.foundational_papers[1].p.estimate, WithinAbs(0.215, 1e-12));
  CHECK(p.is_foundational("f"));
  CHECK(p.is_foundational("h"));
  CHECK_FALSE(p.is_foundational("g"));
  CHECK(p.foundational_papers[0].paper_id == "h");  // 0.785 before 0.215
  CHECK(p.first_foundational_year == 1986);

  CHECK(detect_topics(m, corpus, DetectorConfig{0.999, 0.05}).empty());
  CHECK(detect_topics(m, corpus, DetectorConfig{0.95, 0.9}).empty());
  CHECK_THROWS_AS(detect_topics(m, corpus, DetectorConfig{0.0, 0.05}), InvalidArgument);
  CHECK_THROWS_AS(detect_topics(m, corpus, DetectorConfig{0.95, 1.5}), InvalidArgument);
}

TEST_CASE("profiles satisfy their invariants", "[detector][property]") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto r = random_model(seed);
    const auto corpus = papers_for(r.docs);
    const DetectorConfig cfg{0.6, 0.1};
    std::size_t last = 0;
    bool first = true;
    for (const auto& p : detect_topics(r.model, corpus, cfg)) {
      CHECK((first || p.topic_id > last));
      first = false;
      last = p.topic_id;
      REQUIRE_FALSE(p.catchphrases.empty());
      REQUIRE_FALSE(p.foundational_papers.empty());
      int min_year = 1 << 30;
      for (std::size_t i = 0; i < p.foundational_papers.size(); ++i) {
        CHECK(p.foundational_papers[i].p.estimate > cfg.p_th_found);
        if (i) CHECK(p.foundational_papers[i - 1].p.estimate >= p.foundational_papers[i].p.estimate);
        min_year = std::min(min_year, corpus.at(p.foundational_papers[i].paper_id).year);
      }
      for (const auto& c : p.catchphrases) CHECK(c.p.estimate > cfg.p_th_catch);
      CHECK(p.first_foundational_year == min_year);
    }
  }
}

TEST_CASE("raising a threshold never adds members", "[detector][property]") {
  auto members = [](const std::vector<TopicProfile>& ps) {
    std::set<std::pair<std::size_t, std::string>> c, f;
    for (const auto& p : ps) {
      for (const auto& x : p.catchphrases) c.emplace(p.topic_id, x.ngram.str());
      for (const auto& x : p.foundational_papers) f.emplace(p.topic_id, x.paper_id);
    }
    return std::pair{c, f};
  };
  auto subset = [](const auto& a, const auto& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); };
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto r = random_model(seed);
    const auto corpus = papers_for(r.docs);
    for (double lo : {0.3, 0.5, 0.7}) {
      for (double hi : {lo + 0.05, lo + 0.2}) {
        const auto [c_lo, f_lo] = members(detect_topics(r.model, corpus, {lo, 0.1}));
        const auto [c_hi, f_hi] = members(detect_topics(r.model, corpus, {hi, 0.1}));
        CHECK(subset(c_hi, c_lo));
        const auto [c2_lo, f2_lo] = members(detect_topics(r.model, corpus, {0.5, lo / 3}));
        const auto [c2_hi, f2_hi] = members(detect_topics(r.model, corpus, {0.5, hi / 3}));
        CHECK(subset(f2_hi, f2_lo));
      }
    }
  }
}

TEST_CASE("entropy worked values", "[detector][entropy]") {
  CHECK_THAT(entropy_bits(std::vector<int>(16, 3)), WithinAbs(4.0, 1e-12));
  CHECK(entropy_bits(std::vector<int>{7}) == 0.0);
  CHECK_THAT(entropy_bits(std::vector<int>{2, 1, 1}), WithinAbs(1.5, 1e-12));
  CHECK_THAT(entropy_bits(std::vector<int>{2, 0, 1, 1}), WithinAbs(1.5, 1e-12));
  CHECK(entropy_bits(std::vector<int>{}) == 0.0);

  // One word spread evenly over 16 papers; one paper seeing 8 words evenly.
  std::vector<std::string> docs, words;
  for (int i = 0; i < 16; ++i) docs.push_back("d" + std::to_string(i));
  for (int i = 0; i < 9; ++i) words.push_back("w" + std::to_string(i));
  std::vector<std::vector<std::uint64_t>> cooc(9, std::vector<std::uint64_t>(16, 0));
  for (int d = 0; d < 16; ++d) cooc[0][d] = 2;
  for (int w = 1; w < 9; ++w) cooc[w][0] = 5;
  cooc[1][1] = 4;  // d1 now sees w0 and w1
  std::vector<std::vector<double>> zw(9, std::vector<double>{1.0}), dz(16, std::vector<double>{1.0});
  const auto m = make_model(1, words, docs, cooc, zw, dz);
  CHECK_THAT(entropy_doc_given_ngram(m, Ngram("w0")), WithinAbs(4.0, 1e-12));
  CHECK_THAT(entropy_doc_given_ngram(m, Ngram("w2")), WithinAbs(0.0, 1e-12));
  CHECK_THAT(entropy_ngram_given_doc(m, "d5"), WithinAbs(0.0, 1e-12));
  CHECK_THAT(entropy_ngram_given_doc(m, "d1"), WithinAbs(naive_entropy({2, 4}), 1e-12));
  CHECK_THROWS_AS(entropy_doc_given_ngram(m, Ngram("zz")), InvalidArgument);
  CHECK_THROWS_AS(entropy_ngram_given_doc(m, "zz"), InvalidArgument);

  std::vector<std::vector<std::uint64_t>> eight(8, std::vector<std::uint64_t>{3});
  std::vector<std::string> ws;
  for (int i = 0; i < 8; ++i) ws.push_back("v" + std::to_string(i));
  const auto m8 = make_model(1, ws, {"only"}, eight, std::vector<std::vector<double>>(8, {3.0}), {{24.0}});
  CHECK_THAT(entropy_ngram_given_doc(m8, "only"), WithinAbs(3.0, 1e-12));
}

TEST_CASE("entropies match direct summation and stay in bounds", "[detector][entropy][oracle]") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto r = random_model(seed);
    for (std::size_t w = 0; w < r.words.size(); ++w) {
      std::vector<double> row;
      std::size_t support = 0;
      for (auto c : r.cooc[w]) {
        row.push_back(static_cast<double>(c));
        support += c > 0;
      }
      const double h = entropy_doc_given_ngram(r.model, Ngram(r.words[w]));
      CHECK_THAT(h, WithinAbs(naive_entropy(row), 1e-9));
      CHECK(h >= 0.0);
      CHECK(h <= std::log2(static_cast<double>(support)) + 1e-12);
    }
    for (std::size_t d = 0; d < r.docs.size(); ++d) {
      std::vector<double> col;
      std::size_t support = 0;
      for (std::size_t w = 0; w < r.words.size(); ++w) {
        col.push_back(static_cast<double>(r.cooc[w][d]));
        support += r.cooc[w][d] > 0;
      }
      if (support == 0) continue;
      const double h = entropy_ngram_given_doc(r.model, r.docs[d]);
      CHECK_THAT(h, WithinAbs(naive_entropy(col), 1e-9));
      CHECK(h <= std::log2(static_cast<double>(support)) + 1e-12);
    }
  }
}

TEST_CASE("profile files round-trip", "[detector][io]") {
  const auto r = random_model(7);
  const auto profiles = detect_topics(r.model, papers_for(r.docs), {0.5, 0.1});
  REQUIRE_FALSE(profiles.empty());
  std::stringstream ss;
  write_profiles(ss, profiles);
  const auto back = read_profiles(ss);
  REQUIRE(back.size() == profiles.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].topic_id == profiles[i].topic_id);
    CHECK(back[i].first_foundational_year == profiles[i].first_foundational_year);
    REQUIRE(back[i].catchphrases.size() == profiles[i].catchphrases.size());
    for (std::size_t j = 0; j < back[i].catchphrases.size(); ++j) {
      CHECK(back[i].catchphrases[j].ngram == profiles[i].catchphrases[j].ngram);
      CHECK(back[i].catchphrases[j].p.estimate == profiles[i].catchphrases[j].p.estimate);
      CHECK(back[i].catchphrases[j].p.halfwidth == profiles[i].catchphrases[j].p.halfwidth);
    }
    REQUIRE(back[i].foundational_papers.size() == profiles[i].foundational_papers.size());
    for (std::size_t j = 0; j < back[i].foundational_papers.size(); ++j) {
      CHECK(back[i].foundational_papers[j].paper_id == profiles[i].foundational_papers[j].paper_id);
      CHECK(back[i].foundational_papers[j].p.estimate == profiles[i].foundational_papers[j].p.estimate);
    }
  }
  std::istringstream wrong("oblit-profiles\t2\n");
  CHECK_THROWS_AS(read_profiles(wrong), StageError);
  std::istringstream bad("oblit-profiles\t1\n0\tcatchphrase\tx\t1\n");
  CHECK_THROWS_AS(read_profiles(bad), ParseError);
}
