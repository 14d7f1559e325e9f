#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ddt/corpus.hpp"
#include "ddt/rng.hpp"

namespace ddt {

struct LdaConfig {
  int num_topics = 0;     // Nt; must be >= 1 when fitting
  double alpha = 1.0;     // topic-selection hyperparameter
  double beta = 0.01;     // word-selection hyperparameter
  int iterations = 1000;  // full Gibbs sweeps
  std::uint64_t seed = 0;
};

// Fitted topic model. phi and theta are smoothed count estimates taken from
// the final sweep:
//   phi(k, w)  = (n_kw + beta)  / (n_k + Nw * beta)
//   theta(d, k) = (n_dk + alpha) / (n_d + Nt * alpha)
struct TopicModel {
  LdaConfig config;
  std::vector<std::vector<int>> assignments;  // per doc, per token topic ids
  Eigen::MatrixXi topic_word_counts;          // Nt x Nw
  Eigen::MatrixXi doc_topic_counts;           // N x Nt
  Eigen::MatrixXd phi;                        // Nt x Nw, rows sum to 1
  Eigen::MatrixXd theta;                      // N x Nt, rows sum to 1

  int num_topics() const { return static_cast<int>(topic_word_counts.rows()); }
  int vocab_size() const { return static_cast<int>(topic_word_counts.cols()); }
  int num_docs() const { return static_cast<int>(doc_topic_counts.rows()); }
};

// Sequential collapsed Gibbs sampler over the nonzero-reduced documents of a
// corpus. Documents are visited in corpus order and tokens within a document
// in ascending word-id order (count repeats adjacent); each token's topic is
// drawn by inverse-CDF over the Nt unnormalized conditional weights
//   (n_kw^-i + beta) / (n_k^-i + Nw*beta) * (n_dk^-i + alpha)
// in topic-index order. All-zero documents are kept (with empty token lists)
// so document indices stay aligned, but contribute nothing to the fit.
class GibbsSampler {
 public:
  GibbsSampler(const Corpus& corpus, const LdaConfig& config);

  void sweep();

  int num_docs() const { return static_cast<int>(doc_words_.size()); }
  int num_topics() const { return config_.num_topics; }
  int vocab_size() const { return vocab_; }
  int total_tokens() const { return total_tokens_; }
  int sweeps_done() const { return sweeps_done_; }

  const std::vector<std::vector<int>>& assignments() const { return z_; }
  const Eigen::MatrixXi& topic_word_counts() const { return topic_word_; }
  const Eigen::VectorXi& topic_totals() const { return topic_total_; }
  Eigen::MatrixXi doc_topic_counts() const;  // N x Nt

  // Verifies that the count matrices match the token assignments exactly.
  bool counts_consistent() const;

  // Doc-major base-Nt encoding of the current assignment vector; token t is
  // digit t with weight Nt^t. Only valid while Nt^tokens fits in 63 bits.
  std::uint64_t assignment_code() const;

  TopicModel finalize() const;

 private:
  LdaConfig config_;
  int vocab_ = 0;
  int total_tokens_ = 0;
  int sweeps_done_ = 0;
  std::vector<std::vector<int>> doc_words_;  // token word ids per document
  std::vector<std::vector<int>> z_;          // token topic ids per document
  Eigen::MatrixXi topic_word_;               // Nt x Nw
  Eigen::MatrixXi doc_topic_;                // Nt x N (column per doc)
  Eigen::VectorXi topic_total_;              // Nt
  Rng rng_;
};

// Runs config.iterations full sweeps and returns the final-sweep model.
// Deterministic for a given (corpus, config).
TopicModel fit_gibbs(const Corpus& corpus, const LdaConfig& config);

// Exhaustive posterior over all topic-assignment configurations of a tiny
// corpus, weighted by the collapsed joint p(z, w | alpha, beta). Configuration
// index matches GibbsSampler::assignment_code().
struct ExactPosterior {
  int num_topics = 0;
  int total_tokens = 0;
  std::vector<double> probabilities;  // size Nt^tokens, sums to 1
};

// Refuses instances above the enumeration bound: tokens <= 12, Nt <= 3.
ExactPosterior exact_posterior(const Corpus& corpus, const LdaConfig& config);

// Sum over tokens of log sum_k theta(d, k) * phi(k, w).
double log_likelihood(const TopicModel& model, const Corpus& corpus);

// Text serialization carrying config, topic_word_counts and assignments;
// loading re-derives counts, phi and theta exactly.
void save_topic_model(const TopicModel& model, std::ostream& out);
void save_topic_model(const TopicModel& model, const std::string& path);
TopicModel load_topic_model(std::istream& in);
TopicModel load_topic_model(const std::string& path);

}  // namespace ddt
