#include <catch_amalgamated.hpp>

#include "oblit/citegraph.hpp"
#include "support/oracles.hpp"

using namespace oblit;

namespace {

PaperRecord paper(const std::string& id, std::vector<std::string> refs, int year = 2000) {
  PaperRecord p;
  p.paper_id = id;
  p.year = year;
  p.references = std::move(refs);
  return p;
}

TopicProfile profile_with(std::vector<std::string> found, int year = 2000) {
  TopicProfile p;
  p.topic_id = 1;
  p.catchphrases.push_back({Ngram("x"), {1.0, 0.0}});
  for (const auto& f : found) p.foundational_papers.push_back({f, {0.5, 0.0}});
  p.first_foundational_year = year;
  return p;
}

// Follower table with explicit records: (id, year, cites, mentions).
FollowerTable followers(std::vector<std::tuple<std::string, int, bool, bool>> rows, int first_year = 2000) {
  std::vector<FollowerRecord> recs;
  for (const auto& [id, year, cites, mentions] : rows) recs.push_back({id, 1, cites, mentions, year});
  return FollowerTable::from_records(1, first_year, recs);
}

MentionIndex index_for(const std::vector<TopicProfile>& profiles, const Corpus& corpus) {
  std::vector<Ngram> vocab;
  for (const auto& p : profiles)
    for (const auto& c : p.catchphrases) vocab.push_back(c.ngram);
  return build_mention_index(corpus, vocab, default_normalizer(), 1);
}

}  // namespace

TEST_CASE("shortest paths on small chains", "[citegraph]") {
  const Corpus c({paper("s", {"a", "missing"}), paper("a", {"f"}), paper("f", {}), paper("g", {"s"}),
                  paper("far", {"x1"}), paper("x1", {"x2"}), paper("x2", {"x3"}), paper("x3", {"x4"}),
                  paper("x4", {"f"})},
                 {});
  const CitationGraph g(c);
  CHECK(shortest_citation_path(g, "s", {"f"}, 4) == 2);
  CHECK(shortest_citation_path(g, "a", {"f"}, 4) == 1);
  CHECK(shortest_citation_path(g, "g", {"f"}, 4) == 3);
  CHECK(shortest_citation_path(g, "far", {"f"}, 5) == 5);
  CHECK_FALSE(shortest_citation_path(g, "far", {"f"}, 4).has_value());
  CHECK_FALSE(shortest_citation_path(g, "f", {"s"}, 4).has_value());
  CHECK_FALSE(shortest_citation_path(g, "s", {"nowhere"}, 4).has_value());
  CHECK_FALSE(shortest_citation_path(g, "s", {"f"}, 0).has_value());
  CHECK_THROWS_AS(shortest_citation_path(g, "nobody", {"f"}, 4), InvalidArgument);
}

TEST_CASE("graph holds exactly the in-corpus references", "[citegraph][property]") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto c = oracle::random_graph_corpus(seed, 30);
    const CitationGraph g(c);
    std::set<std::pair<std::string, std::string>> expect, got;
    for (const auto& p : c.papers())
      for (const auto& r : p.references)
        if (c.contains(r) && r != p.paper_id) expect.emplace(p.paper_id, r);
    for (std::uint32_t u = 0; u < g.size(); ++u) {
      for (auto v : g.references(u)) {
        CHECK(u != v);
        got.emplace(g.id(u), g.id(v));
      }
    }
    CHECK(got == expect);
    CHECK(g.edge_count() == expect.size());
    std::size_t in_total = 0;
    for (std::uint32_t u = 0; u < g.size(); ++u) in_total += g.in_degree(u);
    CHECK(in_total == expect.size());

    // Same graph whatever the paper or reference order.
    std::vector<PaperRecord> shuffled = c.papers();
    std::mt19937_64 rng(seed);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (auto& p : shuffled) std::reverse(p.references.begin(), p.references.end());
    CHECK(CitationGraph(Corpus(shuffled, {})) == g);
    CHECK(CitationGraph(c) == g);
  }
}

TEST_CASE("breadth-first search agrees with exhaustive enumeration", "[citegraph][oracle]") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto c = oracle::random_graph_corpus(seed, 1 + seed * 29 / 10);
    const CitationGraph g(c);
    for (const auto& s : c.papers()) {
      for (const auto& t : c.papers()) {
        if (s.paper_id == t.paper_id) continue;
        for (int depth : {1, 2, 4, 6}) {
          CAPTURE(seed, s.paper_id, t.paper_id, depth);
          CHECK(shortest_citation_path(g, s.paper_id, {t.paper_id}, depth) ==
                oracle::exhaustive_shortest_path(c, s.paper_id, {t.paper_id}, depth));
        }
      }
    }
  }
}

TEST_CASE("hidden citations bucket by path length", "[citegraph]") {
  const Corpus c({paper("f", {}), paper("e1", {"f"}), paper("h2", {"e1"}), paper("h3", {"h2"}), paper("h0", {}),
                  paper("both", {"f"})},
                 {});
  const CitationGraph g(c);
  const auto prof = profile_with({"f"});
  const auto t = followers({{"e1", 2000, true, false},
                            {"both", 2000, true, true},
                            {"h2", 2000, false, true},
                            {"h3", 2001, false, true},
                            {"h0", 2001, false, true}});
  const auto h = path_histogram(g, t, prof);
  CHECK(h.at(2) == 1);
  CHECK(h.at(3) == 1);
  CHECK(h.at(4) == 0);
  CHECK(h.beyond == 1);
  CHECK(h.total() == t.totals().hidden());
  CHECK(path_histogram(g, t, prof, 2).beyond == 2);
  CHECK_THROWS_AS(path_histogram(g, t, prof, 1), InvalidArgument);

  // lag 0: both + h2 (length 2) over 2 mentions
  CHECK(indirect_adjusted_p(t, g, prof, 0) == 1.0);
  // lag 1: h3 and h0 are not within two hops
  CHECK(indirect_adjusted_p(t, g, prof, 1) == 0.0);
  CHECK(indirect_adjusted_p(t, g, prof, 1) == p_cite_given_mention(t, std::pair{2001, 2001}).estimate);
  CHECK_THROWS_AS(indirect_adjusted_p(t, g, prof, 5), InvalidArgument);
}

TEST_CASE("histograms partition and adjustment only adds", "[citegraph][property]") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto f = oracle::random_tabulation_fixture(seed);
    const CitationGraph g(f.corpus);
    const auto tables = tabulate(f.profiles, f.corpus, index_for(f.profiles, f.corpus), 1);
    for (std::size_t i = 0; i < tables.size(); ++i) {
      const auto h = path_histogram(g, tables[i], f.profiles[i]);
      CHECK(h.total() == tables[i].totals().hidden());
      CHECK(h.at(0) == 0);
      CHECK(h.at(1) == 0);
      for (const auto& [year, counts] : tables[i].by_year) {
        if (counts.mentions() == 0) continue;
        const int lag = year - tables[i].first_foundational_year;
        const double base = static_cast<double>(counts.n_both) / static_cast<double>(counts.mentions());
        CHECK(indirect_adjusted_p(tables[i], g, f.profiles[i], lag) >= base);
      }
    }
  }
}

TEST_CASE("alternatives rank by cocitation count", "[citegraph]") {
  const Corpus c({paper("f", {}), paper("r", {}), paper("b", {"f"}), paper("a", {"b"}), paper("z", {}),
                  paper("h1", {"r", "a", "f"}), paper("h2", {"r", "b"}), paper("h3", {"r", "a", "b", "z"}),
                  paper("cite", {"f", "z"})},
                 {});
  const CitationGraph g(c);
  const auto prof = profile_with({"f"});
  const auto t = followers({{"h1", 2000, false, true},
                            {"h2", 2000, false, true},
                            {"h3", 2001, false, true},
                            {"cite", 2001, true, false}});
  const auto alts = top_alternatives(g, t, prof, 3);
  REQUIRE(alts.size() == 3);
  CHECK(alts[0].paper_id == "r");
  CHECK(alts[0].cocitations == 3);
  CHECK_FALSE(alts[0].path_to_foundational.has_value());
  CHECK(alts[1].paper_id == "a");  // ties with b at 2, smaller id first
  CHECK(alts[1].cocitations == 2);
  CHECK(alts[1].path_to_foundational == 2);
  CHECK(alts[2].paper_id == "b");
  CHECK(alts[2].path_to_foundational == 1);
  CHECK(top_alternatives(g, t, prof, 10).size() == 4);
  CHECK(top_alternatives(g, followers({{"cite", 2001, true, false}}), prof, 5).empty());
}

TEST_CASE("alternatives match a brute-force count", "[citegraph][oracle]") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto f = oracle::random_tabulation_fixture(seed);
    const CitationGraph g(f.corpus);
    const auto tables = tabulate(f.profiles, f.corpus, index_for(f.profiles, f.corpus), 1);
    for (std::size_t i = 0; i < tables.size(); ++i) {
      std::map<std::string, std::size_t> counts;
      for (const auto& r : tables[i].followers) {
        if (!r.hidden()) continue;
        std::set<std::string> refs(f.corpus.at(r.paper_id).references.begin(),
                                   f.corpus.at(r.paper_id).references.end());
        for (const auto& ref : refs)
          if (f.corpus.contains(ref) && !f.profiles[i].is_foundational(ref)) ++counts[ref];
      }
      std::vector<std::pair<std::string, std::size_t>> expect(counts.begin(), counts.end());
      std::stable_sort(expect.begin(), expect.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
      if (expect.size() > 5) expect.resize(5);
      const auto got = top_alternatives(g, tables[i], f.profiles[i], 5);
      REQUIRE(got.size() == expect.size());
      for (std::size_t k = 0; k < got.size(); ++k) {
        CHECK(got[k].paper_id == expect[k].first);
        CHECK(got[k].cocitations == expect[k].second);
      }
    }
  }
}
