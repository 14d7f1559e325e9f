#include "ddt/classify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ddt/lda.hpp"
#include "ddt/rng.hpp"

namespace ddt {
namespace {

constexpr int kSvmEpochs = 200;
constexpr int kMaxJacobiSweeps = 100;

void check_uniform_dim(const std::vector<Eigen::VectorXd>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("no input vectors");
  const Eigen::Index dim = vectors.front().size();
  for (const Eigen::VectorXd& v : vectors)
    if (v.size() != dim)
      throw std::invalid_argument("input vectors differ in dimension");
}

}  // namespace

Eigen::VectorXd hellinger_map(const Eigen::VectorXd& v) {
  double l1 = v.cwiseAbs().sum();
  if (!(l1 > 0.0)) return Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double s = std::sqrt(std::abs(v[i]) / l1);
    out[i] = v[i] < 0.0 ? -s : s;
  }
  return out;
}

SvmModel train_svm(const std::vector<Eigen::VectorXd>& vectors,
                   const std::vector<int>& labels, double cost,
                   std::uint64_t /*seed*/, int num_classes) {
  check_uniform_dim(vectors);
  if (vectors.size() != labels.size())
    throw std::invalid_argument("train_svm: vectors/labels size mismatch");
  if (!(cost > 0.0)) throw std::invalid_argument("train_svm: cost must be > 0");

  const int n = static_cast<int>(vectors.size());
  const int dim = static_cast<int>(vectors.front().size());
  int max_label = 0;
  std::set<int> distinct;
  for (int y : labels) {
    if (y < 0) throw std::invalid_argument("train_svm: negative label");
    max_label = std::max(max_label, y);
    distinct.insert(y);
  }
  if (distinct.size() < 2)
    throw std::invalid_argument("train_svm: need at least two classes present");
  int c_total = num_classes > 0 ? num_classes : max_label + 1;
  if (max_label >= c_total)
    throw std::invalid_argument("train_svm: label exceeds num_classes");

  std::vector<Eigen::VectorXd> x(n);
  Eigen::VectorXd q(n);  // x_i . x_i plus the implicit bias feature
  for (int i = 0; i < n; ++i) {
    x[i] = hellinger_map(vectors[i]);
    q[i] = x[i].squaredNorm() + 1.0;
  }

  SvmModel model;
  model.weights = Eigen::MatrixXd::Zero(c_total, dim);
  model.biases = Eigen::VectorXd::Zero(c_total);

  for (int c = 0; c < c_total; ++c) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
    double b = 0.0;
    std::vector<double> alpha(n, 0.0);
    for (int epoch = 0; epoch < kSvmEpochs; ++epoch) {
      for (int i = 0; i < n; ++i) {
        double y = labels[i] == c ? 1.0 : -1.0;
        double g = y * (w.dot(x[i]) + b) - 1.0;
        double pg = g;
        if (alpha[i] <= 0.0)
          pg = std::min(g, 0.0);
        else if (alpha[i] >= cost)
          pg = std::max(g, 0.0);
        if (std::abs(pg) > 1e-12) {
          double next = std::clamp(alpha[i] - g / q[i], 0.0, cost);
          double delta = (next - alpha[i]) * y;
          alpha[i] = next;
          w += delta * x[i];
          b += delta;
        }
      }
    }
    model.weights.row(c) = w.transpose();
    model.biases[c] = b;
  }
  return model;
}

Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::VectorXd& vector) {
  if (vector.size() != model.feature_dim())
    throw std::invalid_argument("predict: vector dimension " +
                                std::to_string(vector.size()) + " != model dim " +
                                std::to_string(model.feature_dim()));
  Eigen::VectorXd x =
      model.feature_transform == "hellinger" ? hellinger_map(vector) : vector;
  return model.weights * x + model.biases;
}

int predict(const SvmModel& model, const Eigen::VectorXd& vector) {
  Eigen::VectorXd scores = decision_values(model, vector);
  int best = 0;
  for (int c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  return best;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> jacobi_eigensymm(Eigen::MatrixXd a,
                                                             double tolerance) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw std::invalid_argument("jacobi: matrix must be square");
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  double scale = std::max(1e-300, a.cwiseAbs().maxCoeff());
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= tolerance * scale) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) <= tolerance * scale * 1e-3) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        Eigen::VectorXd ap = a.col(p);
        Eigen::VectorXd aq = a.col(q);
        a.col(p) = c * ap - s * aq;
        a.col(q) = s * ap + c * aq;
        Eigen::VectorXd rp = a.row(p).transpose();
        Eigen::VectorXd rq = a.row(q).transpose();
        a.row(p) = (c * rp - s * rq).transpose();
        a.row(q) = (s * rp + c * rq).transpose();
        Eigen::VectorXd vp = v.col(p);
        Eigen::VectorXd vq = v.col(q);
        v.col(p) = c * vp - s * vq;
        v.col(q) = s * vp + c * vq;
      }
    }
  }

  // Symmetrize the tiny residuals left on the off-diagonal, then sort.
  Eigen::VectorXd values(n);
  for (int i = 0; i < n; ++i) values[i] = a(i, i);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return values[i] > values[j]; });

  Eigen::VectorXd sorted_values(n);
  Eigen::MatrixXd sorted_vectors(n, n);
  for (int i = 0; i < n; ++i) {
    sorted_values[i] = values[order[i]];
    sorted_vectors.col(i) = v.col(order[i]);
  }

  // Deterministic sign: largest-magnitude entry positive.
  for (int i = 0; i < n; ++i) {
    int arg = 0;
    for (int r = 1; r < n; ++r)
      if (std::abs(sorted_vectors(r, i)) > std::abs(sorted_vectors(arg, i))) arg = r;
    if (sorted_vectors(arg, i) < 0.0) sorted_vectors.col(i) = -sorted_vectors.col(i);
  }
  return {sorted_values, sorted_vectors};
}

PcaResult pca_reduce(const std::vector<Eigen::VectorXd>& vectors, int dims) {
  check_uniform_dim(vectors);
  const int n = static_cast<int>(vectors.size());
  const int dim = static_cast<int>(vectors.front().size());
  if (n < 2) throw std::invalid_argument("pca_reduce: need at least two vectors");
  if (dims < 1 || dims > dim)
    throw std::invalid_argument("pca_reduce: dims " + std::to_string(dims) +
                                " out of range [1, " + std::to_string(dim) + "]");

  PcaResult result;
  result.basis.mean = Eigen::VectorXd::Zero(dim);
  for (const Eigen::VectorXd& v : vectors) result.basis.mean += v;
  result.basis.mean /= n;

  Eigen::MatrixXd centered(n, dim);
  for (int i = 0; i < n; ++i)
    centered.row(i) = (vectors[i] - result.basis.mean).transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1);

  auto [values, basis_vectors] = jacobi_eigensymm(std::move(cov));
  result.basis.eigenvalues = values;
  result.basis.components = basis_vectors.leftCols(dims);

  result.projected.reserve(n);
  for (int i = 0; i < n; ++i)
    result.projected.push_back(result.basis.components.transpose() *
                               centered.row(i).transpose());
  return result;
}

Eigen::VectorXd pca_apply(const PcaBasis& basis, const Eigen::VectorXd& vector) {
  if (vector.size() != basis.mean.size())
    throw std::invalid_argument("pca_apply: vector dimension mismatch");
  return basis.components.transpose() * (vector - basis.mean);
}

std::vector<std::vector<int>> kfold_split(int n, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("kfold_split: k must be >= 1");
  if (k > n)
    throw std::invalid_argument("kfold_split: k (" + std::to_string(k) +
                                ") exceeds n (" + std::to_string(n) + ")");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.uniform_index(i + 1)]);

  std::vector<std::vector<int>> folds(k);
  int base = n / k;
  int extra = n % k;
  int at = 0;
  for (int f = 0; f < k; ++f) {
    int size = base + (f < extra ? 1 : 0);
    folds[f].assign(perm.begin() + at, perm.begin() + at + size);
    std::sort(folds[f].begin(), folds[f].end());
    at += size;
  }
  return folds;
}

std::vector<std::pair<std::string, std::vector<int>>> leave_one_group_out(
    const std::vector<std::string>& groups) {
  std::map<std::string, std::vector<int>> by_group;
  for (std::size_t i = 0; i < groups.size(); ++i)
    by_group[groups[i]].push_back(static_cast<int>(i));
  if (by_group.size() < 2)
    throw std::invalid_argument("leave_one_group_out: need at least two groups");
  return {by_group.begin(), by_group.end()};
}

std::string video_group(const std::string& video_id) {
  std::size_t underscore = video_id.find('_');
  return underscore == std::string::npos ? video_id : video_id.substr(0, underscore);
}

namespace {

// Per-video feature assembly: project each view's record with that view's
// index set and concatenate in view order.
Eigen::VectorXd video_features(const Corpus& corpus, const VideoGroup& video,
                               const std::vector<std::vector<int>>& view_index_sets) {
  std::vector<Eigen::VectorXd> per_view;
  per_view.reserve(video.record_by_view.size());
  for (std::size_t view = 0; view < video.record_by_view.size(); ++view)
    per_view.push_back(
        project(corpus.vectors[video.record_by_view[view]], view_index_sets[view]));
  return multiview_concat(per_view);
}

Corpus view_subcorpus(const Corpus& corpus, const std::vector<VideoGroup>& videos,
                      const std::vector<int>& video_indices, int view) {
  Corpus sub;
  sub.codebook_size = corpus.codebook_size;
  sub.num_classes = corpus.num_classes;
  sub.num_views = 1;
  sub.vectors.reserve(video_indices.size());
  for (int vi : video_indices) {
    ActionDescriptorVector v = corpus.vectors[videos[vi].record_by_view[view]];
    v.view_id = 0;
    sub.vectors.push_back(std::move(v));
  }
  return sub;
}

}  // namespace

FoldOutcome evaluate_fold(const Corpus& corpus, const EvalOptions& options,
                          const std::vector<VideoGroup>& videos, int fold_index,
                          const std::vector<int>& test_videos) {
  FoldOutcome outcome;
  outcome.fold = fold_index;
  outcome.test_videos = test_videos;

  const int num_views = corpus.num_views;
  const int vocab = corpus.codebook_size;
  const int num_topics =
      options.num_topics > 0 ? options.num_topics : corpus.num_classes;

  std::vector<char> is_test(videos.size(), 0);
  for (int vi : test_videos) is_test[vi] = 1;
  std::vector<int> train_videos;
  for (std::size_t vi = 0; vi < videos.size(); ++vi)
    if (!is_test[vi]) train_videos.push_back(static_cast<int>(vi));
  if (train_videos.empty())
    throw std::invalid_argument("evaluate: fold leaves no training videos");

  std::vector<int> all_words(vocab);
  std::iota(all_words.begin(), all_words.end(), 0);
  std::vector<std::vector<int>> view_index_sets(num_views, all_words);

  if (options.arm == PipelineArm::kDcs) {
    int threshold = compute_threshold(static_cast<int>(train_videos.size()),
                                      options.threshold_fraction);
    for (int view = 0; view < num_views; ++view) {
      Corpus train_view = view_subcorpus(corpus, videos, train_videos, view);
      LdaConfig cfg;
      cfg.num_topics = num_topics;
      cfg.alpha = options.alpha;
      cfg.beta = options.beta;
      cfg.iterations = options.iterations;
      cfg.seed = mix_seed(options.seed, static_cast<std::uint64_t>(fold_index) + 1,
                          static_cast<std::uint64_t>(view));
      TopicModel model = fit_gibbs(train_view, cfg);
      try {
        DominantSet dominant = select_dominant(topic_codewords(model), threshold);
        view_index_sets[view] = dominant.union_ids;
        outcome.dominant_per_view.push_back(std::move(dominant));
      } catch (const DegenerateSelectionError& e) {
        outcome.degenerate = true;
        std::ostringstream note;
        note << "fold " << fold_index << " view " << view << ": " << e.what();
        outcome.note = note.str();
        return outcome;
      }
    }
    outcome.retained_dims = 0;
    for (const auto& ids : view_index_sets)
      outcome.retained_dims += static_cast<int>(ids.size());
  } else {
    outcome.retained_dims = vocab * num_views;
  }

  std::vector<Eigen::VectorXd> train_features, test_features;
  std::vector<int> train_labels, test_labels;
  train_features.reserve(train_videos.size());
  test_features.reserve(test_videos.size());
  for (int vi : train_videos) {
    train_features.push_back(video_features(corpus, videos[vi], view_index_sets));
    train_labels.push_back(videos[vi].label);
  }
  for (int vi : test_videos) {
    test_features.push_back(video_features(corpus, videos[vi], view_index_sets));
    test_labels.push_back(videos[vi].label);
  }

  if (options.arm == PipelineArm::kPca) {
    PcaResult pca = pca_reduce(train_features, options.pca_dims);
    for (std::size_t i = 0; i < test_features.size(); ++i)
      test_features[i] = pca_apply(pca.basis, test_features[i]);
    train_features = std::move(pca.projected);
    outcome.retained_dims = options.pca_dims;
  }

  SvmModel model = train_svm(train_features, train_labels, options.svm_cost,
                             mix_seed(options.seed, 0x5F17, fold_index),
                             corpus.num_classes);

  int correct = 0;
  outcome.predicted.reserve(test_videos.size());
  for (std::size_t i = 0; i < test_features.size(); ++i) {
    int p = predict(model, test_features[i]);
    outcome.predicted.push_back(p);
    if (p == test_labels[i]) ++correct;
  }
  outcome.actual = std::move(test_labels);
  outcome.accuracy =
      test_videos.empty() ? 0.0 : static_cast<double>(correct) / test_videos.size();
  return outcome;
}

EvalReport evaluate(const Corpus& corpus, const EvalOptions& options) {
  if (corpus.size() == 0) throw std::invalid_argument("evaluate: empty corpus");
  if (options.arm == PipelineArm::kPca && options.pca_dims < 1)
    throw std::invalid_argument("evaluate: pca arm needs pca_dims >= 1");

  std::vector<VideoGroup> videos = group_by_video(corpus);

  std::vector<std::vector<int>> fold_sets;
  std::vector<std::string> fold_keys;
  if (options.leave_one_group_out) {
    std::vector<std::string> groups;
    groups.reserve(videos.size());
    for (const VideoGroup& g : videos) groups.push_back(video_group(g.video_id));
    for (auto& [key, indices] : leave_one_group_out(groups)) {
      fold_keys.push_back(key);
      fold_sets.push_back(std::move(indices));
    }
  } else {
    fold_sets =
        kfold_split(static_cast<int>(videos.size()), options.kfold,
                    mix_seed(options.seed, 0xF01D, 0));
    for (std::size_t f = 0; f < fold_sets.size(); ++f)
      fold_keys.push_back(std::to_string(f));
  }

  EvalReport report;
  report.fold_keys = std::move(fold_keys);
  report.total_dims = corpus.codebook_size * corpus.num_views;
  report.num_topics =
      options.num_topics > 0 ? options.num_topics : corpus.num_classes;
  report.confusion = Eigen::MatrixXi::Zero(corpus.num_classes, corpus.num_classes);

  double accuracy_sum = 0.0;
  double retained_sum = 0.0;
  for (std::size_t f = 0; f < fold_sets.size(); ++f) {
    FoldOutcome outcome =
        evaluate_fold(corpus, options, videos, static_cast<int>(f), fold_sets[f]);
    if (!outcome.degenerate) {
      accuracy_sum += outcome.accuracy;
      retained_sum += outcome.retained_dims;
      for (std::size_t i = 0; i < outcome.predicted.size(); ++i)
        report.confusion(outcome.actual[i], outcome.predicted[i]) += 1;
      ++report.valid_folds;
    }
    report.folds.push_back(std::move(outcome));
  }
  if (report.valid_folds > 0) {
    report.mean_accuracy = accuracy_sum / report.valid_folds;
    report.retained_dims =
        static_cast<int>(std::llround(retained_sum / report.valid_folds));
  }
  return report;
}

void write_eval_csv(const EvalReport& report, const std::string& pipeline_name,
                    std::ostream& out) {
  out << "pipeline,fold,accuracy,retained_dims,total_dims\n";
  out << std::fixed << std::setprecision(6);
  for (const FoldOutcome& fold : report.folds) {
    if (fold.degenerate) {
      out << pipeline_name << "," << fold.fold << ",degenerate,,"
          << report.total_dims << "\n";
    } else {
      out << pipeline_name << "," << fold.fold << "," << fold.accuracy << ","
          << fold.retained_dims << "," << report.total_dims << "\n";
    }
  }
  out << "# mean_accuracy: " << report.mean_accuracy << "\n";
  out << "# valid_folds: " << report.valid_folds << " of " << report.folds.size()
      << "\n";
  for (const FoldOutcome& fold : report.folds)
    if (fold.degenerate) out << "# warning: " << fold.note << "\n";
  out << "# confusion " << pipeline_name << " (rows=actual, cols=predicted)\n";
  for (int r = 0; r < report.confusion.rows(); ++r) {
    out << "#";
    for (int c = 0; c < report.confusion.cols(); ++c) {
      out << (c ? "," : " ") << report.confusion(r, c);
    }
    out << "\n";
  }
}

}  // namespace ddt
