#include "ddt/synth.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "ddt/rng.hpp"

namespace ddt {
namespace {

void validate(const SynthSpec& spec) {
  if (spec.num_topics < 1) throw std::invalid_argument("synth: num_topics must be >= 1");
  if (spec.vocab_size < 1) throw std::invalid_argument("synth: vocab_size must be >= 1");
  if (spec.num_docs < 1) throw std::invalid_argument("synth: num_docs must be >= 1");
  if (spec.tokens_per_doc < 1)
    throw std::invalid_argument("synth: tokens_per_doc must be >= 1");
  if (spec.noise_fraction < 0.0 || spec.noise_fraction >= 1.0)
    throw std::invalid_argument("synth: noise_fraction must be in [0, 1)");
  if (spec.noise_rate < 0.0 || spec.noise_rate >= 1.0)
    throw std::invalid_argument("synth: noise_rate must be in [0, 1)");
  if (!(spec.alpha_true > 0.0) || !(spec.beta_true > 0.0))
    throw std::invalid_argument("synth: alpha_true and beta_true must be > 0");
}

int argmax_row(const Eigen::VectorXd& row) {
  int best = 0;
  for (int k = 1; k < row.size(); ++k)
    if (row[k] > row[best]) best = k;
  return best;
}

}  // namespace

SynthResult synth_corpus(const SynthSpec& spec) {
  validate(spec);

  const int num_noise = static_cast<int>(spec.noise_fraction * spec.vocab_size);
  const int num_primitive = spec.vocab_size - num_noise;
  if (num_primitive < spec.num_topics)
    throw std::invalid_argument(
        "synth: vocabulary leaves fewer primitive words than topics "
        "(noise_fraction too large or vocab too small)");
  if (spec.noise_rate > 0.0 && num_noise == 0)
    throw std::invalid_argument(
        "synth: noise_rate > 0 requires a nonzero noise_fraction");

  Rng rng(spec.seed);

  // Topic k owns a contiguous block of the primitive prefix; blocks differ
  // in size by at most one word.
  std::vector<int> block_start(spec.num_topics + 1, 0);
  {
    int base = num_primitive / spec.num_topics;
    int extra = num_primitive % spec.num_topics;
    for (int k = 0; k < spec.num_topics; ++k)
      block_start[k + 1] = block_start[k] + base + (k < extra ? 1 : 0);
  }

  GroundTruth truth;
  truth.phi = Eigen::MatrixXd::Zero(spec.num_topics, spec.vocab_size);
  truth.theta = Eigen::MatrixXd::Zero(spec.num_docs, spec.num_topics);
  truth.topic_word_counts = Eigen::MatrixXi::Zero(spec.num_topics, spec.vocab_size);
  for (int w = num_primitive; w < spec.vocab_size; ++w)
    truth.noise_words.push_back(w);

  std::vector<Eigen::VectorXd> block_weights(spec.num_topics);
  for (int k = 0; k < spec.num_topics; ++k) {
    int len = block_start[k + 1] - block_start[k];
    block_weights[k] = rng.dirichlet(spec.beta_true, len);
    truth.phi.row(k).segment(block_start[k], len) = block_weights[k].transpose();
  }

  Corpus corpus;
  corpus.codebook_size = spec.vocab_size;
  corpus.num_classes = spec.num_topics;
  corpus.num_views = 1;
  corpus.vectors.reserve(spec.num_docs);

  for (int d = 0; d < spec.num_docs; ++d) {
    Eigen::VectorXd theta = rng.dirichlet(spec.alpha_true, spec.num_topics);
    truth.theta.row(d) = theta.transpose();

    ActionDescriptorVector v;
    {
      std::ostringstream id;
      id << "d" << std::setw(5) << std::setfill('0') << d;
      v.video_id = id.str();
    }
    v.view_id = 0;
    v.label = argmax_row(theta);
    v.counts = Eigen::VectorXi::Zero(spec.vocab_size);

    for (int t = 0; t < spec.tokens_per_doc; ++t) {
      int z = rng.categorical(theta);
      int w = block_start[z] + rng.categorical(block_weights[z]);
      if (spec.noise_rate > 0.0 && rng.uniform_double() < spec.noise_rate)
        w = num_primitive + rng.uniform_index(num_noise);
      v.counts[w] += 1;
      truth.topic_word_counts(z, w) += 1;
    }
    corpus.vectors.push_back(std::move(v));
  }

  return SynthResult{std::move(corpus), std::move(truth)};
}

void save_ground_truth(const GroundTruth& truth, std::ostream& out) {
  const int nt = static_cast<int>(truth.phi.rows());
  const int nw = static_cast<int>(truth.phi.cols());
  const int nd = static_cast<int>(truth.theta.rows());
  out << "groundtruth " << nt << " " << nw << " " << nd << "\n";
  out << "noise:";
  for (int w : truth.noise_words) out << " " << w;
  out << "\n";
  out << std::setprecision(17);
  for (int k = 0; k < nt; ++k) {
    out << "phi " << k << ":";
    for (int w = 0; w < nw; ++w) out << " " << truth.phi(k, w);
    out << "\n";
  }
  for (int d = 0; d < nd; ++d) {
    out << "theta " << d << ":";
    for (int k = 0; k < nt; ++k) out << " " << truth.theta(d, k);
    out << "\n";
  }
  for (int k = 0; k < nt; ++k) {
    out << "counts " << k << ":";
    for (int w = 0; w < nw; ++w) out << " " << truth.topic_word_counts(k, w);
    out << "\n";
  }
}

void save_ground_truth(const GroundTruth& truth, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ground-truth file: " + path);
  save_ground_truth(truth, out);
}

GroundTruth load_ground_truth(std::istream& in) {
  std::string magic;
  int nt = 0, nw = 0, nd = 0;
  if (!(in >> magic) || magic != "groundtruth" || !(in >> nt >> nw >> nd))
    throw ParseError("ground truth: bad header", 1);
  GroundTruth truth;
  truth.phi = Eigen::MatrixXd::Zero(nt, nw);
  truth.theta = Eigen::MatrixXd::Zero(nd, nt);
  truth.topic_word_counts = Eigen::MatrixXi::Zero(nt, nw);

  std::string line;
  std::getline(in, line);  // rest of header line
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string tag;
    row >> tag;
    if (tag == "noise:") {
      int w;
      while (row >> w) truth.noise_words.push_back(w);
    } else if (tag == "phi" || tag == "theta" || tag == "counts") {
      int index;
      char colon;
      if (!(row >> index) || !(row >> colon) || colon != ':')
        throw ParseError("ground truth: bad row header", line_no);
      if (tag == "phi") {
        for (int w = 0; w < nw; ++w)
          if (!(row >> truth.phi(index, w)))
            throw ParseError("ground truth: short phi row", line_no);
      } else if (tag == "theta") {
        for (int k = 0; k < nt; ++k)
          if (!(row >> truth.theta(index, k)))
            throw ParseError("ground truth: short theta row", line_no);
      } else {
        for (int w = 0; w < nw; ++w)
          if (!(row >> truth.topic_word_counts(index, w)))
            throw ParseError("ground truth: short counts row", line_no);
      }
    } else {
      throw ParseError("ground truth: unknown row tag '" + tag + "'", line_no);
    }
  }
  return truth;
}

GroundTruth load_ground_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ground-truth file: " + path);
  return load_ground_truth(in);
}

}  // namespace ddt
