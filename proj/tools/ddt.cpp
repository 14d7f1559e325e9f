// ddt — dominant-codeword pipelines over bag-of-visual-words corpora.
//
// Subcommands:
//   synth      generate a synthetic corpus plus its ground-truth sidecar
//   vectorize  build a codebook from descriptor files and emit a BoW corpus
//   run        cross-validated evaluation of one pipeline arm (raw|pca|dcs)
//   oracle     self-checks against independent oracles
//
// Exit codes: 0 success, 1 runtime/degenerate failure, 2 usage/config error.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddt/classify.hpp"
#include "ddt/corpus.hpp"
#include "ddt/dcs.hpp"
#include "ddt/descriptors.hpp"
#include "ddt/lda.hpp"
#include "ddt/quantize.hpp"
#include "ddt/rng.hpp"
#include "ddt/synth.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

// Shortest round-trip decimal form, so reproducibility headers are canonical.
std::string fmt_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

struct SynthFlags {
  int topics = 0;
  int vocab = 0;
  int docs = 0;
  int tokens = 50;
  double noise_fraction = 0.0;
  double noise_rate = 0.0;
  double alpha_true = 1.0;
  double beta_true = 1.0;

  ddt::SynthSpec to_spec(std::uint64_t seed) const {
    ddt::SynthSpec spec;
    spec.num_topics = topics;
    spec.vocab_size = vocab;
    spec.num_docs = docs;
    spec.tokens_per_doc = tokens;
    spec.noise_fraction = noise_fraction;
    spec.noise_rate = noise_rate;
    spec.alpha_true = alpha_true;
    spec.beta_true = beta_true;
    spec.seed = seed;
    return spec;
  }
};

void add_synth_flags(CLI::App* cmd, SynthFlags& flags, const std::string& prefix,
                     bool required) {
  auto* topics = cmd->add_option("--" + prefix + "topics", flags.topics, "planted topic count");
  auto* vocab = cmd->add_option("--" + prefix + "vocab", flags.vocab, "vocabulary size");
  auto* docs = cmd->add_option("--" + prefix + "docs", flags.docs, "document count");
  if (required) {
    topics->required();
    vocab->required();
    docs->required();
  }
  cmd->add_option("--" + prefix + "tokens", flags.tokens, "tokens per document");
  cmd->add_option("--" + prefix + "noise-fraction", flags.noise_fraction,
                  "share of vocabulary reserved as noise words");
  cmd->add_option("--" + prefix + "noise-rate", flags.noise_rate,
                  "per-token noise replacement probability");
  cmd->add_option("--" + prefix + "alpha-true", flags.alpha_true,
                  "Dirichlet concentration of document mixtures");
  cmd->add_option("--" + prefix + "beta-true", flags.beta_true,
                  "Dirichlet concentration of planted topics");
}

std::string synth_command_text(const SynthFlags& flags, const std::string& prefix) {
  std::ostringstream cmd;
  cmd << "--" << prefix << "topics " << flags.topics << " --" << prefix << "vocab "
      << flags.vocab << " --" << prefix << "docs " << flags.docs << " --" << prefix
      << "tokens " << flags.tokens << " --" << prefix
      << "noise-fraction " << fmt_double(flags.noise_fraction) << " --" << prefix
      << "noise-rate " << fmt_double(flags.noise_rate) << " --" << prefix
      << "alpha-true " << fmt_double(flags.alpha_true) << " --" << prefix
      << "beta-true " << fmt_double(flags.beta_true);
  return cmd.str();
}

// ---------------------------------------------------------------- synth ----

int run_synth(const SynthFlags& flags, std::uint64_t seed, const std::string& out_path,
              std::string truth_path) {
  if (truth_path.empty()) truth_path = out_path + ".truth";
  ddt::SynthResult result = ddt::synth_corpus(flags.to_spec(seed));
  ddt::save_corpus(result.corpus, out_path);
  ddt::save_ground_truth(result.truth, truth_path);
  std::cout << "wrote " << out_path << " (" << result.corpus.size() << " docs, vocab "
            << result.corpus.codebook_size << ") and " << truth_path << "\n";
  return 0;
}

// ------------------------------------------------------------ vectorize ----

struct ManifestEntry {
  std::string video_id;
  int view_id = 0;
  int label = 0;
  std::string path;
};

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  std::vector<ManifestEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    ManifestEntry e;
    if (!(row >> e.video_id >> e.view_id >> e.label >> e.path))
      throw ddt::ParseError(path + ":" + std::to_string(line_no) +
                                ": expected <video_id> <view> <label> <file>",
                            line_no);
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw std::invalid_argument("manifest is empty: " + path);
  return entries;
}

int run_vectorize(const std::string& manifest_path, int codewords, std::uint64_t seed,
                  const std::string& out_path, const std::string& codebook_path,
                  int classes, int views) {
  std::vector<ManifestEntry> entries = load_manifest(manifest_path);

  std::vector<Eigen::MatrixXd> per_video;
  per_video.reserve(entries.size());
  Eigen::Index dim = -1;
  Eigen::Index total = 0;
  for (const ManifestEntry& e : entries) {
    Eigen::MatrixXd points = ddt::load_points(e.path);
    if (dim < 0) dim = points.cols();
    if (points.cols() != dim)
      throw std::invalid_argument("descriptor dimension mismatch in " + e.path);
    total += points.rows();
    per_video.push_back(std::move(points));
  }

  Eigen::MatrixXd pool(total, dim);
  Eigen::Index at = 0;
  for (const Eigen::MatrixXd& points : per_video) {
    pool.middleRows(at, points.rows()) = points;
    at += points.rows();
  }
  ddt::Codebook codebook = ddt::fit_codebook(pool, codewords, seed);
  if (!codebook_path.empty()) ddt::save_codebook(codebook, codebook_path);

  ddt::Corpus corpus;
  corpus.codebook_size = codewords;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const ManifestEntry& e = entries[i];
    std::vector<int> ids;
    ids.reserve(per_video[i].rows());
    for (Eigen::Index r = 0; r < per_video[i].rows(); ++r)
      ids.push_back(ddt::assign(per_video[i].row(r).transpose(), codebook));
    ddt::ActionDescriptorVector v;
    v.video_id = e.video_id;
    v.view_id = e.view_id;
    v.label = e.label;
    v.counts = ddt::bow(ids, codewords);
    corpus.num_classes = std::max(corpus.num_classes, e.label + 1);
    corpus.num_views = std::max(corpus.num_views, e.view_id + 1);
    corpus.vectors.push_back(std::move(v));
  }
  if (classes > 0) corpus.num_classes = classes;
  if (views > 0) corpus.num_views = views;
  ddt::save_corpus(corpus, out_path);
  std::cout << "wrote " << out_path << " (" << corpus.size() << " records, vocab "
            << codewords << ")\n";
  return 0;
}

// ------------------------------------------------------------------ run ----

struct RunFlags {
  std::string corpus_path;
  SynthFlags synth;
  bool synth_given = false;
  std::string arm_text = "dcs";
  int topics = 0;
  double alpha = 1.0;
  double beta = 0.01;
  int iterations = 1000;
  double threshold_fraction = 0.01;
  double cost = 10.0;
  std::string folds_text = "kfold:5";
  std::uint64_t seed = 0;
  std::string out_path;
};

ddt::EvalOptions parse_eval_options(const RunFlags& flags) {
  ddt::EvalOptions options;
  if (flags.arm_text == "raw") {
    options.arm = ddt::PipelineArm::kRaw;
  } else if (flags.arm_text == "dcs") {
    options.arm = ddt::PipelineArm::kDcs;
  } else if (flags.arm_text.rfind("pca:", 0) == 0) {
    options.arm = ddt::PipelineArm::kPca;
    options.pca_dims = std::stoi(flags.arm_text.substr(4));
  } else {
    throw std::invalid_argument("unknown arm '" + flags.arm_text +
                                "' (expected raw | pca:<dims> | dcs)");
  }
  if (flags.folds_text == "logo") {
    options.leave_one_group_out = true;
  } else if (flags.folds_text.rfind("kfold:", 0) == 0) {
    options.kfold = std::stoi(flags.folds_text.substr(6));
  } else {
    throw std::invalid_argument("unknown folds spec '" + flags.folds_text +
                                "' (expected kfold:<k> | logo)");
  }
  options.num_topics = flags.topics;
  options.alpha = flags.alpha;
  options.beta = flags.beta;
  options.iterations = flags.iterations;
  options.threshold_fraction = flags.threshold_fraction;
  options.svm_cost = flags.cost;
  options.seed = flags.seed;
  return options;
}

int run_run(const RunFlags& flags) {
  ddt::Corpus corpus;
  std::string source_text;
  if (!flags.corpus_path.empty()) {
    corpus = ddt::load_corpus(flags.corpus_path);
    source_text = "--corpus " + flags.corpus_path;
  } else {
    corpus = ddt::synth_corpus(flags.synth.to_spec(flags.seed)).corpus;
    source_text = synth_command_text(flags.synth, "synth-");
  }

  ddt::EvalOptions options = parse_eval_options(flags);
  ddt::EvalReport report = ddt::evaluate(corpus, options);

  std::ofstream out(flags.out_path);
  if (!out) throw std::runtime_error("cannot write report: " + flags.out_path);
  out << "# ddt " << kVersion << "\n";
  out << "# command: run " << source_text << " --arm " << flags.arm_text
      << " --topics " << flags.topics << " --alpha " << fmt_double(flags.alpha)
      << " --beta " << fmt_double(flags.beta) << " --iterations " << flags.iterations
      << " --threshold-fraction " << fmt_double(flags.threshold_fraction) << " --cost "
      << fmt_double(flags.cost) << " --folds " << flags.folds_text << " --seed "
      << flags.seed << " --out " << flags.out_path << "\n";
  out << "# topics: " << report.num_topics << "\n";
  std::vector<ddt::VideoGroup> videos = ddt::group_by_video(corpus);
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    out << "# fold " << report.fold_keys[f] << ":";
    for (int vi : report.folds[f].test_videos) out << " " << videos[vi].video_id;
    out << "\n";
  }
  ddt::write_eval_csv(report, flags.arm_text, out);
  out.close();

  if (options.arm == ddt::PipelineArm::kDcs) {
    for (const ddt::FoldOutcome& fold : report.folds) {
      for (std::size_t view = 0; view < fold.dominant_per_view.size(); ++view) {
        std::ostringstream path;
        path << flags.out_path << ".fold" << fold.fold << ".view" << view
             << ".dominant";
        ddt::save_dominant_set(fold.dominant_per_view[view], path.str());
      }
    }
  }

  if (report.valid_folds == 0) {
    std::cerr << "error: dominant selection degenerate on every fold; see " << flags.out_path
              << " for per-fold notes\n";
    return 1;
  }
  std::cout << "wrote " << flags.out_path << " (mean accuracy "
            << report.mean_accuracy << ", retained " << report.retained_dims << "/"
            << report.total_dims << ")\n";
  return 0;
}

// --------------------------------------------------------------- oracle ----

// Brute-force evaluation of the co-occurrence sum over all pixel pairs,
// kept independent of the library's single-pass implementation.
ddt::CooccurrenceHistogram brute_force_ecohog(
    const ddt::GradientField& field, const std::vector<std::pair<int, int>>& offsets,
    int bins) {
  ddt::CooccurrenceHistogram histogram;
  histogram.offsets = offsets;
  for (const auto& [x, y] : offsets) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(bins, bins);
    for (int p1 = 0; p1 < field.width(); ++p1)
      for (int q1 = 0; q1 < field.height(); ++q1)
        for (int p2 = 0; p2 < field.width(); ++p2)
          for (int q2 = 0; q2 < field.height(); ++q2) {
            if (p2 - p1 != x || q2 - q1 != y) continue;
            int i = ddt::quantize_orientation(field.orientation(p1, q1), bins);
            int j = ddt::quantize_orientation(field.orientation(p2, q2), bins);
            c(i, j) += field.magnitude(p1, q1) + field.magnitude(p2, q2);
          }
    histogram.bins.push_back(std::move(c));
  }
  return histogram;
}

ddt::GradientField random_field(int n, int m, ddt::Rng& rng) {
  ddt::GradientField field(n, m);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < m; ++q) {
      field.magnitude(p, q) = rng.uniform_double() * 10.0;
      field.orientation(p, q) = rng.uniform_double() * 2.0 * std::numbers::pi;
    }
  return field;
}

// Tiny two-document instance used for the Gibbs-versus-enumeration check.
ddt::Corpus oracle_corpus() {
  ddt::Corpus corpus;
  corpus.codebook_size = 3;
  corpus.num_classes = 2;
  corpus.num_views = 1;
  ddt::ActionDescriptorVector a, b;
  a.video_id = "a";
  a.label = 0;
  a.counts = Eigen::VectorXi::Zero(3);
  a.counts << 2, 1, 0;
  b.video_id = "b";
  b.label = 1;
  b.counts = Eigen::VectorXi::Zero(3);
  b.counts << 0, 1, 2;
  corpus.vectors = {a, b};
  return corpus;
}

int oracle_gibbs_tv(std::uint64_t seed, int samples, int burnin) {
  ddt::Corpus corpus = oracle_corpus();
  ddt::LdaConfig cfg;
  cfg.num_topics = 2;
  cfg.alpha = 1.0;
  cfg.beta = 0.5;
  cfg.iterations = 1;
  cfg.seed = seed;

  ddt::ExactPosterior posterior = ddt::exact_posterior(corpus, cfg);
  ddt::GibbsSampler sampler(corpus, cfg);
  for (int s = 0; s < burnin; ++s) sampler.sweep();
  std::vector<double> empirical(posterior.probabilities.size(), 0.0);
  for (int s = 0; s < samples; ++s) {
    sampler.sweep();
    empirical[sampler.assignment_code()] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t c = 0; c < empirical.size(); ++c)
    tv += std::abs(empirical[c] / samples - posterior.probabilities[c]);
  tv *= 0.5;
  bool pass = tv < 0.05;
  std::cout << "gibbs-tv: total variation " << tv << " (threshold 0.05, " << samples
            << " samples after " << burnin << " burn-in sweeps) -> "
            << (pass ? "pass" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int oracle_ecohog_bf(std::uint64_t seed, int num_fields, int size,
                     const std::string& field_path) {
  const std::vector<std::pair<int, int>> offsets{{1, 0}, {0, 1}};
  const int bins = 8;
  ddt::Rng rng(seed);
  int checked = 0;
  bool pass = true;

  auto check = [&](const ddt::GradientField& field) {
    ddt::CooccurrenceHistogram fast = ddt::ecohog(field, offsets, bins);
    ddt::CooccurrenceHistogram slow = brute_force_ecohog(field, offsets, bins);
    for (std::size_t o = 0; o < offsets.size(); ++o)
      if (fast.bins[o] != slow.bins[o]) pass = false;
    ++checked;
  };

  if (!field_path.empty()) check(ddt::load_gradient_field(field_path));
  for (int f = 0; f < num_fields; ++f) check(random_field(size, size, rng));

  std::cout << "ecohog-bf: " << checked << " fields, exact equality -> "
            << (pass ? "pass" : "FAIL") << "\n";
  return pass ? 0 : 1;
}

int oracle_identity_proj(std::uint64_t seed) {
  ddt::SynthSpec spec;
  spec.num_topics = 3;
  spec.vocab_size = 60;
  spec.num_docs = 90;
  spec.tokens_per_doc = 40;
  spec.noise_fraction = 0.2;
  spec.noise_rate = 0.1;
  spec.seed = seed;
  ddt::Corpus corpus = ddt::synth_corpus(spec).corpus;

  ddt::EvalOptions options;
  options.arm = ddt::PipelineArm::kRaw;
  options.kfold = 3;
  options.seed = seed;
  ddt::EvalReport raw = ddt::evaluate(corpus, options);

  // Same folds and classifier, but features taken straight from the count
  // vectors with no projection step.
  std::vector<ddt::VideoGroup> videos = ddt::group_by_video(corpus);
  std::vector<std::vector<int>> folds = ddt::kfold_split(
      static_cast<int>(videos.size()), options.kfold, ddt::mix_seed(seed, 0xF01D, 0));
  bool pass = true;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<char> is_test(videos.size(), 0);
    for (int vi : folds[f]) is_test[vi] = 1;
    std::vector<Eigen::VectorXd> train_x, test_x;
    std::vector<int> train_y;
    for (std::size_t vi = 0; vi < videos.size(); ++vi) {
      Eigen::VectorXd direct =
          corpus.vectors[videos[vi].record_by_view[0]].counts.cast<double>();
      if (is_test[vi])
        test_x.push_back(direct);
      else {
        train_x.push_back(direct);
        train_y.push_back(videos[vi].label);
      }
    }
    ddt::SvmModel model = ddt::train_svm(train_x, train_y, options.svm_cost,
                                         0, corpus.num_classes);
    for (std::size_t i = 0; i < test_x.size(); ++i)
      if (ddt::predict(model, test_x[i]) != raw.folds[f].predicted[i]) pass = false;
  }
  std::cout << "identity-proj: raw-BoW vs full-index-set projection predictions "
            << (pass ? "identical -> pass" : "differ -> FAIL") << "\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dominant codeword selection pipelines over BoW action corpora"};
  app.require_subcommand(1);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  SynthFlags synth_flags;
  add_synth_flags(synth_cmd, synth_flags, "", true);
  std::uint64_t synth_seed = 0;
  std::string synth_out, synth_truth;
  synth_cmd->add_option("--seed", synth_seed, "generator seed");
  synth_cmd->add_option("--out", synth_out, "corpus output path")->required();
  synth_cmd->add_option("--truth", synth_truth,
                        "ground-truth sidecar path (default <out>.truth)");

  // vectorize
  auto* vec_cmd =
      app.add_subcommand("vectorize", "quantize descriptor files into a BoW corpus");
  std::string vec_manifest, vec_out, vec_codebook;
  int vec_codewords = ddt::kDefaultCodebookSize;
  int vec_classes = 0, vec_views = 0;
  std::uint64_t vec_seed = 0;
  vec_cmd->add_option("--manifest", vec_manifest,
                      "lines: <video_id> <view> <label> <descriptor file>")
      ->required();
  vec_cmd->add_option("--codewords", vec_codewords, "codebook size");
  vec_cmd->add_option("--seed", vec_seed, "k-means seed");
  vec_cmd->add_option("--out", vec_out, "corpus output path")->required();
  vec_cmd->add_option("--codebook", vec_codebook, "also save the fitted codebook");
  vec_cmd->add_option("--classes", vec_classes, "override class count");
  vec_cmd->add_option("--views", vec_views, "override view count");

  // run
  auto* run_cmd = app.add_subcommand("run", "cross-validated pipeline evaluation");
  RunFlags run_flags;
  auto* corpus_opt =
      run_cmd->add_option("--corpus", run_flags.corpus_path, "BoW corpus file");
  add_synth_flags(run_cmd, run_flags.synth, "synth-", false);
  run_cmd->add_option("--arm", run_flags.arm_text, "raw | pca:<dims> | dcs");
  run_cmd->add_option("--topics", run_flags.topics,
                      "LDA topic count (default: corpus class count)");
  run_cmd->add_option("--alpha", run_flags.alpha, "LDA alpha");
  run_cmd->add_option("--beta", run_flags.beta, "LDA beta");
  run_cmd->add_option("--iterations", run_flags.iterations, "Gibbs sweeps");
  run_cmd->add_option("--threshold-fraction", run_flags.threshold_fraction,
                      "dominant threshold as a fraction of training videos");
  run_cmd->add_option("--cost", run_flags.cost, "SVM cost");
  run_cmd->add_option("--folds", run_flags.folds_text, "kfold:<k> | logo");
  run_cmd->add_option("--seed", run_flags.seed, "run seed");
  run_cmd->add_option("--out", run_flags.out_path, "report CSV path")->required();

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "run an oracle self-check");
  std::string oracle_check;
  std::uint64_t oracle_seed = 0;
  int oracle_samples = 20000, oracle_burnin = 2000, oracle_fields = 100,
      oracle_size = 8;
  std::string oracle_field_path;
  oracle_cmd->add_option("check", oracle_check, "gibbs-tv | ecohog-bf | identity-proj")
      ->required();
  oracle_cmd->add_option("--seed", oracle_seed, "oracle seed");
  oracle_cmd->add_option("--samples", oracle_samples, "post-burn-in Gibbs samples");
  oracle_cmd->add_option("--burnin", oracle_burnin, "burn-in sweeps");
  oracle_cmd->add_option("--fields", oracle_fields, "random fields to check");
  oracle_cmd->add_option("--size", oracle_size, "random field side length");
  oracle_cmd->add_option("--field", oracle_field_path, "also check this field file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth_cmd->parsed())
      return run_synth(synth_flags, synth_seed, synth_out, synth_truth);
    if (vec_cmd->parsed())
      return run_vectorize(vec_manifest, vec_codewords, vec_seed, vec_out,
                           vec_codebook, vec_classes, vec_views);
    if (run_cmd->parsed()) {
      bool synth_given = run_cmd->count("--synth-topics") > 0;
      if ((corpus_opt->count() > 0) == synth_given)
        throw std::invalid_argument(
            "run needs exactly one corpus source: --corpus or --synth-* flags");
      if (synth_given && (run_cmd->count("--synth-vocab") == 0 ||
                          run_cmd->count("--synth-docs") == 0))
        throw std::invalid_argument(
            "synthetic source needs --synth-topics, --synth-vocab and --synth-docs");
      return run_run(run_flags);
    }
    if (oracle_cmd->parsed()) {
      if (oracle_check == "gibbs-tv")
        return oracle_gibbs_tv(oracle_seed, oracle_samples, oracle_burnin);
      if (oracle_check == "ecohog-bf")
        return oracle_ecohog_bf(oracle_seed, oracle_fields, oracle_size,
                                oracle_field_path);
      if (oracle_check == "identity-proj") return oracle_identity_proj(oracle_seed);
      std::cerr << "error: unknown oracle check '" << oracle_check
                << "' (expected gibbs-tv | ecohog-bf | identity-proj)\n";
      return 2;
    }
  } catch (const ddt::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ddt::DegenerateSelectionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
