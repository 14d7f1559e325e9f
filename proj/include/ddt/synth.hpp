#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ddt/corpus.hpp"

namespace ddt {

// Generative spec for a synthetic BoW corpus with planted motion primitives.
// A trailing noise_fraction share of the vocabulary is reserved for noise
// words; the planted topics are supported on disjoint blocks of the
// remaining prefix.
struct SynthSpec {
  int num_topics = 1;
  int vocab_size = 0;
  int num_docs = 0;
  int tokens_per_doc = 0;
  double noise_fraction = 0.0;  // share of vocab reserved as noise words
  double noise_rate = 0.0;      // per-token probability of noise replacement
  double alpha_true = 1.0;      // Dirichlet concentration of doc mixtures
  double beta_true = 1.0;       // Dirichlet concentration of planted topics
  std::uint64_t seed = 0;
};

// Everything the generator knows that an estimator has to recover.
struct GroundTruth {
  Eigen::MatrixXd phi;              // num_topics x vocab, planted topic-word dists
  Eigen::MatrixXd theta;            // docs x topics, planted mixtures
  std::vector<int> noise_words;     // designated noise ids (vocabulary suffix)
  Eigen::MatrixXi topic_word_counts;  // emitted tokens by true topic and final word
};

struct SynthResult {
  Corpus corpus;
  GroundTruth truth;
};

// Draws each document by the LDA generative process (theta ~ Dir(alpha_true),
// token topic ~ theta, word ~ planted phi), then independently replaces each
// token by a uniform noise word with probability noise_rate. Labels are the
// argmax planted topic of theta. Bit-reproducible for a given seed.
SynthResult synth_corpus(const SynthSpec& spec);

void save_ground_truth(const GroundTruth& truth, std::ostream& out);
void save_ground_truth(const GroundTruth& truth, const std::string& path);
GroundTruth load_ground_truth(std::istream& in);
GroundTruth load_ground_truth(const std::string& path);

}  // namespace ddt
