// oblit: hidden-citation pipeline driver.

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "oblit/oblit.hpp"

namespace {

/// Flags shared by the pipeline subcommands. Unset flags leave the config
/// file (or built-in default) alone.
struct Flags {
  std::string config;
  std::optional<std::string> corpus, out, labels;
  std::optional<std::size_t> topics, burn_in, samples, lag, chains;
  std::optional<double> alpha, beta, p_catch, p_found;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_depth;
  std::optional<unsigned> threads;
  int verbose = 0;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config, "key = value configuration file");
    app->add_option("--corpus", corpus, "corpus file (JSON lines)");
    app->add_option("-o,--out", out, "output directory for artifacts and tables");
    app->add_option("--topics", topics, "number of LDA topics K");
    app->add_option("--alpha", alpha, "document-topic smoothing (default 50/K)");
    app->add_option("--beta", beta, "topic-term smoothing");
    app->add_option("--burn-in", burn_in, "Gibbs burn-in sweeps");
    app->add_option("--samples", samples, "retained samples");
    app->add_option("--lag", lag, "sweeps between retained samples");
    app->add_option("--seed", seed, "pipeline seed");
    app->add_option("--chains", chains, "chains (extra chains feed a divergence diagnostic)");
    app->add_option("--p-catch", p_catch, "catchphrase threshold on P(z|w)");
    app->add_option("--p-found", p_found, "foundational threshold on P(d|z)");
    app->add_option("--max-depth", max_depth, "citation path search depth");
    app->add_option("--labels", labels, "catchphrase class override file");
    app->add_option("--threads", threads, "worker threads (default: OBLIT_THREADS or all cores)");
    app->add_flag("-v,--verbose", verbose, "progress on stderr");
  }

  oblit::PipelineConfig resolve() const {
    oblit::PipelineConfig c;
    if (!config.empty()) c = oblit::read_pipeline_config(config);
    if (corpus) c.corpus_path = *corpus;
    if (out) c.out_dir = *out;
    if (labels) c.label_overrides_path = *labels;
    if (topics) c.lda.num_topics = *topics;
    if (alpha) c.lda.alpha = *alpha;
    if (beta) c.lda.beta = *beta;
    if (burn_in) c.lda.burn_in_sweeps = *burn_in;
    if (samples) c.lda.retained_samples = *samples;
    if (lag) c.lda.sample_lag_sweeps = *lag;
    if (chains) c.lda.chains = *chains;
    if (seed) c.seed = *seed;
    if (p_catch) c.detector.p_th_catch = *p_catch;
    if (p_found) c.detector.p_th_found = *p_found;
    if (max_depth) c.max_depth = *max_depth;
    if (threads) c.threads = *threads;
    if (verbose > 0) c.verbosity = verbose;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect hidden citations with a topic model over (n-gram, cited paper) tuples"};
  app.require_subcommand(1);

  Flags flags;
  using Stage = void (oblit::Pipeline::*)();
  const std::pair<const char*, std::pair<Stage, const char*>> stages[] = {
      {"ingest", {&oblit::Pipeline::ingest, "read the corpus and extract occurrence tuples"}},
      {"train", {&oblit::Pipeline::train, "train the topic model"}},
      {"detect", {&oblit::Pipeline::detect, "detect catchphrases and foundational papers"}},
      {"tabulate", {&oblit::Pipeline::tabulate, "classify followers and tabulate per-year counts"}},
      {"graph", {&oblit::Pipeline::graph, "citation paths, alternatives and indirect credit"}},
      {"metrics", {&oblit::Pipeline::metrics, "regressions, rank changes, catchphrase statistics"}},
      {"report", {&oblit::Pipeline::report, "run every stage and write all tables"}},
  };
  Stage chosen = nullptr;
  for (const auto& [name, stage] : stages) {
    CLI::App* sub = app.add_subcommand(name, stage.second);
    flags.attach(sub);
    sub->callback([&chosen, s = stage.first] { chosen = s; });
  }

  std::string spec_path, synth_out = "synthetic";
  std::optional<std::string> mode;
  std::optional<std::uint64_t> synth_seed;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus with ground truth");
  synth->add_option("--spec", spec_path, "generator spec (key = value); default spec when omitted");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--mode", mode, "exact or sampled (overrides the spec)")->check(CLI::IsMember({"exact", "sampled"}));
  synth->add_option("-o,--out", synth_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      oblit::GeneratorSpec spec = spec_path.empty() ? oblit::GeneratorSpec{} : oblit::read_generator_spec(spec_path);
      if (synth_seed) spec.seed = *synth_seed;
      if (mode) spec.mode = oblit::parse_generation_mode(*mode);
      const auto s = oblit::generate(spec);
      oblit::write_synthetic(s, synth_out);
      std::cerr << "wrote " << s.corpus.papers().size() << " papers and " << s.corpus.contexts().size()
                << " contexts to " << synth_out << '\n';
      return 0;
    }
    oblit::Pipeline pipeline(flags.resolve());
    (pipeline.*chosen)();
  } catch (const oblit::Error& e) {
    std::cerr << "oblit: error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "oblit: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
