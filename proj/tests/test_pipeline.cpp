#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oblit/pipeline.hpp"
#include "oblit/synthgen.hpp"

using namespace oblit;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "oblit_pipeline_test";
    fs::remove_all(d);
    fs::create_directories(d);
    GeneratorSpec s;
    s.num_topics = 4;
    s.eponym_topics = 1;
    s.experiment_topics = 1;
    s.background_papers = 80;
    s.background_vocabulary = 100;
    s.peripheral_per_topic = 3;
    s.horizon = 8;
    write_synthetic(generate(s), (d / "syn").string());
    std::ofstream conf(d / "small.conf");
    conf << "corpus = " << (d / "syn" / "corpus.jsonl").string() << "\n"
         << "metrics.labels = " << (d / "syn" / "labels.tsv").string() << "\n"
         << "lda.topics = 8\nlda.burn_in = 60\nlda.samples = 5\nlda.lag = 4\n"
         << "tabulate.horizon = 8\nmetrics.permutations = 500\nthreads = 2\n";
    return d;
  }();
  return dir;
}

struct Run {
  int status = 0;
  std::string err;
};

Run cli(const std::string& args) {
  const auto err = workdir() / "stderr.txt";
  const std::string cmd = std::string(OBLIT_CLI) + " " + args + " 2> " + err.string() + " > /dev/null";
  Run r;
  r.status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

std::string conf() { return (workdir() / "small.conf").string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig parse(const std::string& text) {
  std::istringstream in(text);
  PipelineConfig c;
  apply_config(c, read_key_values(in));
  return c;
}

}  // namespace

TEST_CASE("configuration keys and values", "[pipeline][config]") {
  const auto c = parse("lda.topics = 12\nlda.alpha = 0.5\ntabulate.decay = pooled\nmetrics.attribution = full\n");
  CHECK(c.lda.num_topics == 12);
  CHECK(c.lda.alpha_value() == 0.5);
  CHECK(c.decay == DecayAggregation::Pooled);
  CHECK(c.attribution == AttributionMode::FullCount);
  CHECK(parse("").lda.alpha_value() == 50.0 / 400.0);

  auto field_of = [](const std::string& text) -> std::pair<std::size_t, std::string> {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return {e.line(), e.field()};
    }
    return {0, ""};
  };
  CHECK(field_of("seed = 3\nlda.topcs = 4\n") == std::pair<std::size_t, std::string>{2, "lda.topcs"});
  CHECK(field_of("lda.topics = many\n") == std::pair<std::size_t, std::string>{1, "lda.topics"});
  CHECK(field_of("\n\nlda.beta = -1\n") == std::pair<std::size_t, std::string>{3, "lda.beta"});
  CHECK(field_of("detector.p_catch = 1.5\n").second == "detector.p_catch");
  CHECK(field_of("graph.max_depth = 1\n").second == "graph.max_depth");
  CHECK(field_of("tabulate.decay = median\n").second == "tabulate.decay");
}

TEST_CASE("bundled configs parse", "[pipeline][config]") {
  const auto c = read_pipeline_config(std::string(OBLIT_SOURCE_DIR) + "/configs/synthetic.conf");
  CHECK(c.lda.num_topics == 40);
  CHECK(c.seed == 7);
  CHECK(c.max_depth == 4);
  CHECK_NOTHROW(Pipeline(c));
}

TEST_CASE("stages demand their inputs", "[pipeline][cli]") {
  const auto out = (workdir() / "fresh").string();
  const auto r = cli("detect --config " + conf() + " --out " + out);
  CHECK(r.status != 0);
  CHECK_THAT(r.err, ContainsSubstring("train"));
  const auto t = cli("train --config " + conf() + " --out " + out);
  CHECK(t.status != 0);
  CHECK_THAT(t.err, ContainsSubstring("ingest"));

  const auto bad = cli("ingest --config " + conf() + " --topics 0 --out " + out);
  CHECK(bad.status != 0);
  const auto missing = cli("ingest --corpus " + (workdir() / "nope.jsonl").string() + " --out " + out);
  CHECK(missing.status != 0);
  CHECK_THAT(missing.err, ContainsSubstring("nope.jsonl"));
}

TEST_CASE("stale artifacts are rejected", "[pipeline][cli]") {
  const auto out = workdir() / "stale";
  REQUIRE(cli("ingest --config " + conf() + " --out " + out.string()).status == 0);
  REQUIRE(cli("train --config " + conf() + " --out " + out.string()).status == 0);
  auto text = slurp(out / "model.txt");
  text.replace(0, std::string("oblit-model 1").size(), "oblit-model 9");
  std::ofstream(out / "model.txt", std::ios::binary) << text;
  const auto r = cli("detect --config " + conf() + " --out " + out.string());
  CHECK(r.status != 0);
  CHECK_THAT(r.err, ContainsSubstring("version"));
}

TEST_CASE("flags override the config file", "[pipeline][cli]") {
  const auto out = workdir() / "override";
  REQUIRE(cli("ingest --config " + conf() + " --out " + out.string()).status == 0);
  REQUIRE(cli("train --config " + conf() + " --topics 6 --beta 0.05 --out " + out.string()).status == 0);
  std::ifstream in(out / "model.txt");
  const auto model = read_model(in);
  CHECK(model.num_topics() == 6);
  CHECK(model.config().beta == 0.05);
  CHECK(model.config().burn_in_sweeps == 60);
}

TEST_CASE("report writes every table family, reproducibly", "[pipeline][cli][determinism]") {
  const auto a = workdir() / "report_a", b = workdir() / "report_b";
  REQUIRE(cli("report --config " + conf() + " --out " + a.string()).status == 0);
  REQUIRE(cli("report --config " + conf() + " --threads 1 --out " + b.string()).status == 0);
  for (const auto& [family, files] : report_families()) {
    for (const auto& f : files) {
      CAPTURE(family, f);
      REQUIRE(fs::exists(a / f));
      CHECK(fs::file_size(a / f) > 0);
      CHECK(slurp(a / f) == slurp(b / f));
    }
  }
  for (const char* f : {"occurrences.tsv", "model.txt", "profiles.tsv", "followers.tsv"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }

  // Running the stages one at a time gives the same tables.
  const auto c = workdir() / "report_c";
  for (const char* stage : {"ingest", "train", "detect", "tabulate", "graph", "metrics"}) {
    REQUIRE(cli(std::string(stage) + " --config " + conf() + " --out " + c.string()).status == 0);
  }
  for (const auto& [family, files] : report_families())
    for (const auto& f : files) CHECK(slurp(a / f) == slurp(c / f));
}

TEST_CASE("synth subcommand writes a corpus", "[pipeline][cli]") {
  const auto out = workdir() / "synth_cli";
  const auto spec = workdir() / "tiny.spec";
  std::ofstream(spec) << "num_topics = 2\neponym_topics = 0\nexperiment_topics = 0\nbackground_papers = 20\n"
                         "peripheral_per_topic = 1\nhorizon = 3\nmode = sampled\n";
  REQUIRE(cli("synth --spec " + spec.string() + " --out " + out.string()).status == 0);
  std::ifstream in(out / "truth.jsonl");
  const auto truth = read_truth(in);
  CHECK(truth.topics.size() == 2);
  CHECK(truth.mode == GenerationMode::Sampled);
  CHECK(cli("synth --mode fuzzy --out " + out.string()).status != 0);
  std::ofstream(spec) << "num_topcs = 2\n";
  const auto bad = cli("synth --spec " + spec.string() + " --out " + out.string());
  CHECK(bad.status != 0);
  CHECK_THAT(bad.err, ContainsSubstring("num_topcs"));
}
