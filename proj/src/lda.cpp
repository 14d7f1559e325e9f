#include "ddt/lda.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ddt {
namespace {

void validate_config(const LdaConfig& config) {
  if (config.num_topics < 1)
    throw std::invalid_argument("lda: num_topics must be >= 1");
  if (!(config.alpha > 0.0) || !(config.beta > 0.0))
    throw std::invalid_argument("lda: alpha and beta must be > 0");
  if (config.iterations < 1)
    throw std::invalid_argument("lda: iterations must be >= 1");
}

std::vector<std::vector<int>> token_streams(const Corpus& corpus) {
  std::vector<std::vector<int>> docs;
  docs.reserve(corpus.size());
  for (const ActionDescriptorVector& v : corpus.vectors) {
    ReducedVector r = nonzero_reduce(v);
    std::vector<int> words;
    words.reserve(v.total_tokens());
    for (int i = 0; i < r.size(); ++i)
      for (int c = 0; c < r.values[i]; ++c) words.push_back(r.indices[i]);
    docs.push_back(std::move(words));
  }
  return docs;
}

}  // namespace

GibbsSampler::GibbsSampler(const Corpus& corpus, const LdaConfig& config)
    : config_(config), vocab_(corpus.codebook_size), rng_(config.seed) {
  validate_config(config);
  if (corpus.size() == 0) throw std::invalid_argument("lda: empty corpus");
  if (vocab_ < 1) throw std::invalid_argument("lda: corpus has no vocabulary");

  doc_words_ = token_streams(corpus);
  for (const auto& words : doc_words_) total_tokens_ += static_cast<int>(words.size());
  if (total_tokens_ == 0)
    throw std::invalid_argument("lda: corpus is empty after dropping all-zero documents");

  const int nt = config_.num_topics;
  const int nd = static_cast<int>(doc_words_.size());
  topic_word_ = Eigen::MatrixXi::Zero(nt, vocab_);
  doc_topic_ = Eigen::MatrixXi::Zero(nt, nd);
  topic_total_ = Eigen::VectorXi::Zero(nt);

  z_.resize(nd);
  for (int d = 0; d < nd; ++d) {
    z_[d].resize(doc_words_[d].size());
    for (std::size_t t = 0; t < doc_words_[d].size(); ++t) {
      int k = rng_.uniform_index(nt);
      z_[d][t] = k;
      topic_word_(k, doc_words_[d][t]) += 1;
      doc_topic_(k, d) += 1;
      topic_total_[k] += 1;
    }
  }
}

void GibbsSampler::sweep() {
  const int nt = config_.num_topics;
  const double alpha = config_.alpha;
  const double beta = config_.beta;
  const double vocab_beta = vocab_ * beta;
  std::vector<double> weight(nt);

  for (std::size_t d = 0; d < doc_words_.size(); ++d) {
    const std::vector<int>& words = doc_words_[d];
    std::vector<int>& topics = z_[d];
    for (std::size_t t = 0; t < words.size(); ++t) {
      const int w = words[t];
      const int old_k = topics[t];
      topic_word_(old_k, w) -= 1;
      doc_topic_(old_k, d) -= 1;
      topic_total_[old_k] -= 1;

      double total = 0.0;
      for (int k = 0; k < nt; ++k) {
        weight[k] = (topic_word_(k, w) + beta) / (topic_total_[k] + vocab_beta) *
                    (doc_topic_(k, d) + alpha);
        total += weight[k];
      }
      double u = rng_.uniform_double() * total;
      int new_k = nt - 1;
      double cum = 0.0;
      for (int k = 0; k < nt; ++k) {
        cum += weight[k];
        if (u < cum) {
          new_k = k;
          break;
        }
      }

      topics[t] = new_k;
      topic_word_(new_k, w) += 1;
      doc_topic_(new_k, d) += 1;
      topic_total_[new_k] += 1;
    }
  }
  ++sweeps_done_;
}

Eigen::MatrixXi GibbsSampler::doc_topic_counts() const {
  return doc_topic_.transpose();
}

bool GibbsSampler::counts_consistent() const {
  Eigen::MatrixXi tw = Eigen::MatrixXi::Zero(config_.num_topics, vocab_);
  Eigen::MatrixXi dt = Eigen::MatrixXi::Zero(config_.num_topics, num_docs());
  Eigen::VectorXi tt = Eigen::VectorXi::Zero(config_.num_topics);
  for (std::size_t d = 0; d < doc_words_.size(); ++d) {
    for (std::size_t t = 0; t < doc_words_[d].size(); ++t) {
      int k = z_[d][t];
      tw(k, doc_words_[d][t]) += 1;
      dt(k, static_cast<int>(d)) += 1;
      tt[k] += 1;
    }
  }
  return tw == topic_word_ && dt == doc_topic_ && tt == topic_total_;
}

std::uint64_t GibbsSampler::assignment_code() const {
  const std::uint64_t nt = static_cast<std::uint64_t>(config_.num_topics);
  std::uint64_t code = 0;
  std::uint64_t place = 1;
  for (const auto& topics : z_) {
    for (int k : topics) {
      if (place > (~std::uint64_t{0}) / (nt ? nt : 1) / 2)
        throw std::invalid_argument("assignment_code: instance too large to encode");
      code += place * static_cast<std::uint64_t>(k);
      place *= nt;
    }
  }
  return code;
}

TopicModel GibbsSampler::finalize() const {
  const int nt = config_.num_topics;
  const int nd = num_docs();
  TopicModel model;
  model.config = config_;
  model.assignments = z_;
  model.topic_word_counts = topic_word_;
  model.doc_topic_counts = doc_topic_.transpose();

  model.phi.resize(nt, vocab_);
  for (int k = 0; k < nt; ++k) {
    double denom = topic_total_[k] + vocab_ * config_.beta;
    for (int w = 0; w < vocab_; ++w)
      model.phi(k, w) = (topic_word_(k, w) + config_.beta) / denom;
  }

  model.theta.resize(nd, nt);
  for (int d = 0; d < nd; ++d) {
    double doc_total = doc_topic_.col(d).sum();
    double denom = doc_total + nt * config_.alpha;
    for (int k = 0; k < nt; ++k)
      model.theta(d, k) = (doc_topic_(k, d) + config_.alpha) / denom;
  }
  return model;
}

TopicModel fit_gibbs(const Corpus& corpus, const LdaConfig& config) {
  GibbsSampler sampler(corpus, config);
  for (int it = 0; it < config.iterations; ++it) sampler.sweep();
  return sampler.finalize();
}

ExactPosterior exact_posterior(const Corpus& corpus, const LdaConfig& config) {
  validate_config(config);
  const int nt = config.num_topics;
  const int nw = corpus.codebook_size;
  std::vector<std::vector<int>> docs = token_streams(corpus);

  int total_tokens = 0;
  for (const auto& words : docs) total_tokens += static_cast<int>(words.size());
  if (total_tokens == 0)
    throw std::invalid_argument("exact_posterior: corpus has no tokens");
  if (total_tokens > 12 || nt > 3)
    throw std::invalid_argument(
        "exact_posterior: instance above enumeration bound (tokens <= 12, topics <= 3)");

  // Flat token list with document boundaries, doc-major order.
  std::vector<int> token_word;
  std::vector<int> token_doc;
  for (std::size_t d = 0; d < docs.size(); ++d)
    for (int w : docs[d]) {
      token_word.push_back(w);
      token_doc.push_back(static_cast<int>(d));
    }

  // lgamma tables over the integer counts 0..total_tokens.
  std::vector<double> lg_alpha(total_tokens + 1), lg_beta(total_tokens + 1),
      lg_topic_denom(total_tokens + 1);
  for (int c = 0; c <= total_tokens; ++c) {
    lg_alpha[c] = std::lgamma(c + config.alpha);
    lg_beta[c] = std::lgamma(c + config.beta);
    lg_topic_denom[c] = std::lgamma(c + nw * config.beta);
  }

  // Distinct words present, for the topic-word product.
  std::vector<int> present_words;
  {
    std::vector<char> seen(nw, 0);
    for (int w : token_word)
      if (!seen[w]) {
        seen[w] = 1;
        present_words.push_back(w);
      }
  }

  std::uint64_t num_configs = 1;
  for (int t = 0; t < total_tokens; ++t) num_configs *= nt;

  const int nd = static_cast<int>(docs.size());
  ExactPosterior posterior;
  posterior.num_topics = nt;
  posterior.total_tokens = total_tokens;
  posterior.probabilities.resize(num_configs);

  std::vector<int> z(total_tokens, 0);
  Eigen::MatrixXi n_dk = Eigen::MatrixXi::Zero(nd, nt);
  Eigen::MatrixXi n_kw = Eigen::MatrixXi::Zero(nt, nw);
  Eigen::VectorXi n_k = Eigen::VectorXi::Zero(nt);

  std::vector<double> logw(num_configs);
  double max_logw = -std::numeric_limits<double>::infinity();
  for (std::uint64_t code = 0; code < num_configs; ++code) {
    n_dk.setZero();
    n_kw.setZero();
    n_k.setZero();
    for (int t = 0; t < total_tokens; ++t) {
      n_dk(token_doc[t], z[t]) += 1;
      n_kw(z[t], token_word[t]) += 1;
      n_k[z[t]] += 1;
    }
    // Collapsed joint up to a configuration-independent constant.
    double lw = 0.0;
    for (int d = 0; d < nd; ++d)
      for (int k = 0; k < nt; ++k) lw += lg_alpha[n_dk(d, k)];
    for (int k = 0; k < nt; ++k) {
      for (int w : present_words) lw += lg_beta[n_kw(k, w)];
      lw -= lg_topic_denom[n_k[k]];
    }
    logw[code] = lw;
    if (lw > max_logw) max_logw = lw;

    // Odometer increment; token 0 is the least-significant digit.
    for (int t = 0; t < total_tokens; ++t) {
      if (++z[t] < nt) break;
      z[t] = 0;
    }
  }

  double total = 0.0;
  for (std::uint64_t code = 0; code < num_configs; ++code) {
    posterior.probabilities[code] = std::exp(logw[code] - max_logw);
    total += posterior.probabilities[code];
  }
  for (double& p : posterior.probabilities) p /= total;
  return posterior;
}

double log_likelihood(const TopicModel& model, const Corpus& corpus) {
  if (model.vocab_size() != corpus.codebook_size)
    throw std::invalid_argument("log_likelihood: vocabulary size mismatch");
  if (model.num_docs() != corpus.size())
    throw std::invalid_argument("log_likelihood: document count mismatch");
  double ll = 0.0;
  for (int d = 0; d < corpus.size(); ++d) {
    ReducedVector r = nonzero_reduce(corpus.vectors[d]);
    for (int i = 0; i < r.size(); ++i) {
      double p = model.theta.row(d).dot(model.phi.col(r.indices[i]));
      ll += r.values[i] * std::log(p);
    }
  }
  return ll;
}

void save_topic_model(const TopicModel& model, std::ostream& out) {
  out << "ldamodel " << model.num_topics() << " " << model.vocab_size() << " "
      << model.num_docs() << "\n";
  out << "config " << std::setprecision(17) << model.config.alpha << " "
      << model.config.beta << " " << model.config.iterations << " "
      << model.config.seed << "\n";
  for (int k = 0; k < model.num_topics(); ++k) {
    out << "topic_word " << k << ":";
    for (int w = 0; w < model.vocab_size(); ++w)
      out << " " << model.topic_word_counts(k, w);
    out << "\n";
  }
  for (int d = 0; d < model.num_docs(); ++d) {
    out << "doc " << d << ":";
    for (int k : model.assignments[d]) out << " " << k;
    out << "\n";
  }
}

void save_topic_model(const TopicModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  save_topic_model(model, out);
}

TopicModel load_topic_model(std::istream& in) {
  std::string magic;
  int nt = 0, nw = 0, nd = 0;
  if (!(in >> magic) || magic != "ldamodel" || !(in >> nt >> nw >> nd))
    throw ParseError("topic model: bad header", 1);

  TopicModel model;
  std::string tag;
  if (!(in >> tag) || tag != "config" ||
      !(in >> model.config.alpha >> model.config.beta >> model.config.iterations >>
        model.config.seed))
    throw ParseError("topic model: bad config line", 2);
  model.config.num_topics = nt;

  model.topic_word_counts = Eigen::MatrixXi::Zero(nt, nw);
  model.assignments.assign(nd, {});
  int line_no = 2;
  std::string line;
  std::getline(in, line);  // rest of config line
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    row >> tag;
    int index;
    char colon;
    if (!(row >> index >> colon) || colon != ':')
      throw ParseError("topic model: bad row header", line_no);
    if (tag == "topic_word") {
      for (int w = 0; w < nw; ++w)
        if (!(row >> model.topic_word_counts(index, w)))
          throw ParseError("topic model: short topic_word row", line_no);
    } else if (tag == "doc") {
      int k;
      while (row >> k) model.assignments[index].push_back(k);
    } else {
      throw ParseError("topic model: unknown row tag '" + tag + "'", line_no);
    }
  }

  // Re-derive the dependent state exactly as the sampler would.
  model.doc_topic_counts = Eigen::MatrixXi::Zero(nd, nt);
  for (int d = 0; d < nd; ++d)
    for (int k : model.assignments[d]) model.doc_topic_counts(d, k) += 1;

  Eigen::VectorXi topic_total = model.topic_word_counts.rowwise().sum();
  model.phi.resize(nt, nw);
  for (int k = 0; k < nt; ++k) {
    double denom = topic_total[k] + nw * model.config.beta;
    for (int w = 0; w < nw; ++w)
      model.phi(k, w) = (model.topic_word_counts(k, w) + model.config.beta) / denom;
  }
  model.theta.resize(nd, nt);
  for (int d = 0; d < nd; ++d) {
    double doc_total = model.doc_topic_counts.row(d).sum();
    double denom = doc_total + nt * model.config.alpha;
    for (int k = 0; k < nt; ++k)
      model.theta(d, k) = (model.doc_topic_counts(d, k) + model.config.alpha) / denom;
  }
  return model;
}

TopicModel load_topic_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  return load_topic_model(in);
}

}  // namespace ddt
