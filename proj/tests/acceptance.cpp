// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code; thresholds are not
// configurable. Run with a list of criterion numbers to execute a subset.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ddt/classify.hpp"
#include "ddt/corpus.hpp"
#include "ddt/dcs.hpp"
#include "ddt/descriptors.hpp"
#include "ddt/lda.hpp"
#include "ddt/rng.hpp"
#include "ddt/synth.hpp"
#include "test_util.hpp"

using namespace ddt;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

void require(Outcome& outcome, bool condition, const std::string& message) {
  if (!condition) {
    outcome.pass = false;
    if (!outcome.detail.empty()) outcome.detail += "; ";
    outcome.detail += "FAILED: " + message;
  }
}

Corpus tiny_two_doc_corpus() {
  // Two documents, three words, six tokens.
  Corpus corpus;
  corpus.codebook_size = 3;
  corpus.num_classes = 2;
  ActionDescriptorVector a, b;
  a.video_id = "a";
  a.label = 0;
  a.counts = (Eigen::VectorXi(3) << 2, 1, 0).finished();
  b.video_id = "b";
  b.label = 1;
  b.counts = (Eigen::VectorXi(3) << 0, 1, 2).finished();
  corpus.vectors = {a, b};
  return corpus;
}

// --------------------------------------------------------------------------
// 1. Gibbs correctness: TV(20k post-burn-in samples, exact posterior) < 0.05
//    on a 2-topic, 3-word, 6-token instance, in under 30 s.
Outcome criterion_gibbs_correctness() {
  Outcome outcome;
  auto start = Clock::now();

  Corpus corpus = tiny_two_doc_corpus();
  LdaConfig cfg;
  cfg.num_topics = 2;
  cfg.alpha = 1.0;
  cfg.beta = 0.5;
  cfg.seed = 2024;

  ExactPosterior posterior = exact_posterior(corpus, cfg);
  GibbsSampler sampler(corpus, cfg);
  const int burnin = 2000, samples = 20000;
  for (int s = 0; s < burnin; ++s) sampler.sweep();
  std::vector<double> empirical(posterior.probabilities.size(), 0.0);
  for (int s = 0; s < samples; ++s) {
    sampler.sweep();
    empirical[sampler.assignment_code()] += 1.0 / samples;
  }
  double tv = testing::total_variation(empirical, posterior.probabilities);
  double elapsed = seconds_since(start);

  std::ostringstream detail;
  detail << "TV=" << tv << " (<0.05), " << elapsed << "s (<30s)";
  outcome.detail = detail.str();
  require(outcome, tv < 0.05, "total variation must be below 0.05");
  require(outcome, elapsed < 30.0, "runtime must be below 30 s");
  return outcome;
}

// --------------------------------------------------------------------------
// 2. Topic recovery: Nt=4, Nw=50, N=200, 50 tokens/doc, no noise, 1000
//    sweeps; greedy-matched per-topic L1(phi_hat, phi_planted) < 0.15 for
//    every topic over 5 seeds, in under 2 minutes.
Outcome criterion_topic_recovery() {
  Outcome outcome;
  auto start = Clock::now();
  double worst = 0.0;

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthSpec spec;
    spec.num_topics = 4;
    spec.vocab_size = 50;
    spec.num_docs = 200;
    spec.tokens_per_doc = 50;
    spec.noise_rate = 0.0;
    spec.alpha_true = 1.0;
    spec.beta_true = 5.0;
    spec.seed = seed;
    SynthResult synth = synth_corpus(spec);

    LdaConfig cfg;
    cfg.num_topics = 4;
    cfg.iterations = 1000;
    cfg.seed = 100 + seed;
    TopicModel model = fit_gibbs(synth.corpus, cfg);

    std::vector<double> matched =
        testing::greedy_match_l1(model.phi, synth.truth.phi);
    for (double d : matched) worst = std::max(worst, d);
  }
  double elapsed = seconds_since(start);

  std::ostringstream detail;
  detail << "worst matched L1=" << worst << " (<0.15) over 5 seeds, " << elapsed
         << "s (<120s)";
  outcome.detail = detail.str();
  require(outcome, worst < 0.15, "every matched per-topic L1 must be below 0.15");
  require(outcome, elapsed < 120.0, "runtime must be below 2 min");
  return outcome;
}

// --------------------------------------------------------------------------
// 3. Noise elimination: with noise_rate=0.1 the DCS union excludes >= 90% of
//    designated noise words and retains >= 90% of planted words whose true
//    per-topic token count exceeds the threshold, over 10 seeds.
Outcome criterion_noise_elimination() {
  Outcome outcome;
  double worst_excluded = 1.0, worst_retained = 1.0;

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    // Gibbs concentrates a rare word's tokens into one topic, so exclusion
    // hinges on each noise word's total count staying below the threshold:
    // 2000 noise tokens over 1200 noise words ~ 1.7 each, threshold 5.
    SynthSpec spec;
    spec.num_topics = 4;
    spec.vocab_size = 1600;
    spec.num_docs = 500;
    spec.tokens_per_doc = 40;
    spec.noise_fraction = 0.75;
    spec.noise_rate = 0.1;
    spec.alpha_true = 0.5;
    spec.beta_true = 8.0;
    spec.seed = seed;
    SynthResult synth = synth_corpus(spec);

    LdaConfig cfg;
    cfg.num_topics = 4;
    cfg.iterations = 1000;
    cfg.seed = 300 + seed;
    TopicModel model = fit_gibbs(synth.corpus, cfg);

    int threshold = compute_threshold(spec.num_docs);
    DominantSet dominant = select_dominant(topic_codewords(model), threshold);
    std::vector<char> in_union(spec.vocab_size, 0);
    for (int w : dominant.union_ids) in_union[w] = 1;

    int noise_total = static_cast<int>(synth.truth.noise_words.size());
    int noise_excluded = 0;
    for (int w : synth.truth.noise_words)
      if (!in_union[w]) ++noise_excluded;

    std::vector<char> is_noise(spec.vocab_size, 0);
    for (int w : synth.truth.noise_words) is_noise[w] = 1;
    int strong_total = 0, strong_retained = 0;
    for (int w = 0; w < spec.vocab_size; ++w) {
      if (is_noise[w]) continue;
      int best = synth.truth.topic_word_counts.col(w).maxCoeff();
      if (best > threshold) {
        ++strong_total;
        if (in_union[w]) ++strong_retained;
      }
    }

    worst_excluded = std::min(worst_excluded,
                              static_cast<double>(noise_excluded) / noise_total);
    worst_retained = std::min(worst_retained,
                              static_cast<double>(strong_retained) / strong_total);
  }

  std::ostringstream detail;
  detail << "worst noise excluded=" << worst_excluded
         << " (>=0.90), worst planted retained=" << worst_retained
         << " (>=0.90) over 10 seeds";
  outcome.detail = detail.str();
  require(outcome, worst_excluded >= 0.90, "must exclude >= 90% of noise words");
  require(outcome, worst_retained >= 0.90,
          "must retain >= 90% of planted above-threshold words");
  return outcome;
}

// --------------------------------------------------------------------------
// 4. Comparative accuracy: over 10 seeds with paired folds, mean DCS-arm
//    accuracy >= mean raw-BoW accuracy, and retained_dims/total_dims within
//    [0.30, 0.80].
Outcome criterion_comparative_accuracy() {
  Outcome outcome;
  double raw_sum = 0.0, dcs_sum = 0.0;
  double ratio_min = 1.0, ratio_max = 0.0;

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    // 600 planted + 1000 noise words; within a training fold each noise
    // word totals ~1.3 tokens against a threshold of 4, so the union keeps
    // the planted blocks plus a thin noise tail. Planted blocks are near
    // uniform (beta_true 40) so no planted word falls under the threshold.
    SynthSpec spec;
    spec.num_topics = 4;
    spec.vocab_size = 1600;
    spec.num_docs = 400;
    spec.tokens_per_doc = 40;
    spec.noise_fraction = 0.625;
    spec.noise_rate = 0.1;
    spec.alpha_true = 0.3;
    spec.beta_true = 40.0;
    spec.seed = 40 + seed;
    Corpus corpus = synth_corpus(spec).corpus;

    EvalOptions options;
    options.kfold = 5;
    options.iterations = 1000;
    options.svm_cost = 1.0;
    options.seed = seed;  // shared by both arms: paired folds

    options.arm = PipelineArm::kRaw;
    EvalReport raw = evaluate(corpus, options);
    options.arm = PipelineArm::kDcs;
    EvalReport dcs = evaluate(corpus, options);

    raw_sum += raw.mean_accuracy;
    dcs_sum += dcs.mean_accuracy;
    double ratio = static_cast<double>(dcs.retained_dims) / dcs.total_dims;
    ratio_min = std::min(ratio_min, ratio);
    ratio_max = std::max(ratio_max, ratio);
  }
  double raw_mean = raw_sum / 10.0, dcs_mean = dcs_sum / 10.0;

  std::ostringstream detail;
  detail << "mean accuracy dcs=" << dcs_mean << " vs raw=" << raw_mean
         << " (dcs>=raw), retained/total in [" << ratio_min << ", " << ratio_max
         << "] (within [0.30, 0.80])";
  outcome.detail = detail.str();
  require(outcome, dcs_mean >= raw_mean, "mean DCS accuracy must be >= raw");
  require(outcome, ratio_min >= 0.30 && ratio_max <= 0.80,
          "retained/total must fall in [0.30, 0.80]");
  return outcome;
}

// --------------------------------------------------------------------------
// 5. Worked example fidelity: thresholding removes words 3 and 6 from the
//    three topic supports {1,3,5}, {1,2,7}, {3,6,7}; the union is {1,2,5,7}.
Outcome criterion_worked_example() {
  Outcome outcome;
  TopicCodewords tc;
  tc.frequency = Eigen::MatrixXi::Zero(3, 8);
  tc.frequency(0, 1) = 60;
  tc.frequency(0, 3) = 10;
  tc.frequency(0, 5) = 55;
  tc.frequency(1, 1) = 60;
  tc.frequency(1, 2) = 52;
  tc.frequency(1, 7) = 70;
  tc.frequency(2, 3) = 12;
  tc.frequency(2, 6) = 20;
  tc.frequency(2, 7) = 51;

  DominantSet dominant = select_dominant(tc, 50);
  require(outcome, dominant.per_topic[0] == std::vector<int>{1, 5},
          "topic 1 must keep {1, 5}");
  require(outcome, dominant.per_topic[1] == std::vector<int>{1, 2, 7},
          "topic 2 must keep {1, 2, 7}");
  require(outcome, dominant.per_topic[2] == std::vector<int>{7},
          "topic 3 must keep {7}");
  require(outcome, union_dominant(dominant) == std::vector<int>{1, 2, 5, 7},
          "union must be {1, 2, 5, 7}");
  if (outcome.pass)
    outcome.detail = "selection {1,5} {1,2,7} {7}, union {1,2,5,7}";
  return outcome;
}

// --------------------------------------------------------------------------
// 6. Threshold arithmetic: 1% of 5000 training vectors gives threshold 50.
Outcome criterion_threshold_arithmetic() {
  Outcome outcome;
  int threshold = compute_threshold(5000, 0.01);
  std::ostringstream detail;
  detail << "compute_threshold(5000, 0.01)=" << threshold << " (==50)";
  outcome.detail = detail.str();
  require(outcome, threshold == 50, "threshold of 5000 videos at 1% must be 50");
  return outcome;
}

// --------------------------------------------------------------------------
// 7. ECoHOG oracle equivalence: exact equality against the brute-force
//    double loop on 100 random 8x8 fields with offsets {(1,0),(0,1)}, and a
//    96-dimensional HOG patch under the 2x2x3x8 layout.
Outcome criterion_ecohog_oracle() {
  Outcome outcome;
  Rng rng(777);
  const std::vector<std::pair<int, int>> offsets{{1, 0}, {0, 1}};
  int equal_fields = 0;
  for (int f = 0; f < 100; ++f) {
    GradientField field = testing::random_field(8, 8, rng);
    CooccurrenceHistogram fast = ecohog(field, offsets, 8);
    CooccurrenceHistogram slow = testing::brute_force_ecohog(field, offsets, 8);
    bool equal = true;
    for (std::size_t o = 0; o < offsets.size(); ++o)
      if (fast.bins[o] != slow.bins[o]) equal = false;
    if (equal) ++equal_fields;
  }

  std::vector<GradientField> slices;
  for (int t = 0; t < 3; ++t) slices.push_back(testing::random_field(4, 4, rng));
  Eigen::Index hog_dims = hog_patch(slices, kHogLayout).size();

  std::ostringstream detail;
  detail << equal_fields << "/100 fields bit-exact, hog dims=" << hog_dims
         << " (==96)";
  outcome.detail = detail.str();
  require(outcome, equal_fields == 100, "all 100 fields must match exactly");
  require(outcome, hog_dims == 96, "hog layout must give 96 dimensions");
  return outcome;
}

// --------------------------------------------------------------------------
// 8. Identity/degeneracy suite: full-index-set projection reproduces raw-BoW
//    classification bit-for-bit; threshold sweeps are monotone; counts are
//    conserved after every sweep; runs are seed-deterministic byte-for-byte.
Outcome criterion_identity_suite() {
  Outcome outcome;

  SynthSpec spec;
  spec.num_topics = 3;
  spec.vocab_size = 80;
  spec.num_docs = 90;
  spec.tokens_per_doc = 30;
  spec.noise_fraction = 0.3;
  spec.noise_rate = 0.1;
  spec.alpha_true = 0.5;
  spec.beta_true = 5.0;
  spec.seed = 9090;
  Corpus corpus = synth_corpus(spec).corpus;

  // (a) Projection identity: evaluate's raw arm (which projects with the
  // full index set) against a direct classifier on the untouched counts.
  EvalOptions options;
  options.arm = PipelineArm::kRaw;
  options.kfold = 3;
  options.iterations = 100;
  options.seed = 77;
  EvalReport raw = evaluate(corpus, options);

  std::vector<VideoGroup> videos = group_by_video(corpus);
  std::vector<std::vector<int>> folds =
      kfold_split(static_cast<int>(videos.size()), options.kfold,
                  mix_seed(options.seed, 0xF01D, 0));
  bool identical = true;
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
    SvmModel model =
        train_svm(train_x, train_y, options.svm_cost, 0, corpus.num_classes);
    for (std::size_t i = 0; i < test_x.size(); ++i)
      if (predict(model, test_x[i]) != raw.folds[f].predicted[i]) identical = false;
  }
  require(outcome, identical,
          "raw-BoW and full-index-set projections must classify identically");

  // (b) Threshold sweep monotonicity on a fitted model.
  LdaConfig cfg;
  cfg.num_topics = 3;
  cfg.iterations = 200;
  cfg.seed = 5;
  TopicCodewords tc = topic_codewords(fit_gibbs(corpus, cfg));
  bool monotone = true;
  std::size_t previous_union = 0;
  bool first = true;
  for (int threshold = 1; threshold <= 40; ++threshold) {
    DominantSet dominant;
    try {
      dominant = select_dominant(tc, threshold);
    } catch (const DegenerateSelectionError&) {
      break;
    }
    if (!first && dominant.union_ids.size() > previous_union) monotone = false;
    previous_union = dominant.union_ids.size();
    first = false;
  }
  require(outcome, monotone, "raising the threshold must never grow the union");

  // (c) Count conservation after every sweep.
  Eigen::VectorXi word_totals = Eigen::VectorXi::Zero(spec.vocab_size);
  for (const auto& v : corpus.vectors) word_totals += v.counts;
  GibbsSampler sampler(corpus, cfg);
  bool conserved = true;
  for (int s = 0; s < 50; ++s) {
    sampler.sweep();
    if (!sampler.counts_consistent()) conserved = false;
    Eigen::VectorXi by_word = sampler.topic_word_counts().colwise().sum();
    if (by_word.transpose() != word_totals.transpose()) conserved = false;
  }
  require(outcome, conserved, "counts must be conserved after every sweep");

  // (d) Seed determinism, byte-for-byte.
  std::ostringstream corpus_a, corpus_b;
  save_corpus(synth_corpus(spec).corpus, corpus_a);
  save_corpus(synth_corpus(spec).corpus, corpus_b);
  require(outcome, corpus_a.str() == corpus_b.str(),
          "synthetic corpora must be byte-identical under one seed");

  options.arm = PipelineArm::kDcs;
  std::ostringstream csv_a, csv_b;
  write_eval_csv(evaluate(corpus, options), "dcs", csv_a);
  write_eval_csv(evaluate(corpus, options), "dcs", csv_b);
  require(outcome, csv_a.str() == csv_b.str(),
          "evaluation reports must be byte-identical under one seed");

  if (outcome.pass)
    outcome.detail =
        "projection identity, threshold monotonicity, count conservation, "
        "byte-identical reruns";
  return outcome;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "gibbs correctness vs exact posterior", criterion_gibbs_correctness},
      {2, "topic recovery on planted corpora", criterion_topic_recovery},
      {3, "noise elimination via dominant union", criterion_noise_elimination},
      {4, "comparative accuracy and dimensionality", criterion_comparative_accuracy},
      {5, "worked selection example fidelity", criterion_worked_example},
      {6, "threshold arithmetic", criterion_threshold_arithmetic},
      {7, "ecohog oracle equivalence", criterion_ecohog_oracle},
      {8, "identity and degeneracy suite", criterion_identity_suite},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), criterion.id) == selected.end())
      continue;
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s -- %s\n", outcome.pass ? "PASS" : "FAIL",
                criterion.id, criterion.name, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
