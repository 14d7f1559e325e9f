#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ddt/corpus.hpp"
#include "ddt/dcs.hpp"

namespace ddt {

// One-vs-rest linear SVM. Inputs are Hellinger-normalized at train and
// predict time: L1-normalize, then element-wise square root (sign-preserving,
// so PCA-projected vectors with negative entries stay well defined).
struct SvmModel {
  Eigen::MatrixXd weights;  // num_classes x feature_dim
  Eigen::VectorXd biases;   // num_classes
  std::string feature_transform = "hellinger";

  int num_classes() const { return static_cast<int>(weights.rows()); }
  int feature_dim() const { return static_cast<int>(weights.cols()); }
};

Eigen::VectorXd hellinger_map(const Eigen::VectorXd& v);

// Trains C binary L2-regularized hinge-loss machines (class c vs rest) by
// dual coordinate descent with a fixed 200 epochs in sequential index order;
// fully deterministic, the seed is recorded for interface stability only.
// num_classes = 0 infers max(labels) + 1.
SvmModel train_svm(const std::vector<Eigen::VectorXd>& vectors,
                   const std::vector<int>& labels, double cost = 10.0,
                   std::uint64_t seed = 0, int num_classes = 0);

// Per-class decision values w_c . x + b_c of the transformed input.
Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::VectorXd& vector);

// Argmax class, ties broken by lowest class id.
int predict(const SvmModel& model, const Eigen::VectorXd& vector);

struct PcaBasis {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;   // feature_dim x dims, orthonormal columns
  Eigen::VectorXd eigenvalues;  // full spectrum, descending
};

struct PcaResult {
  std::vector<Eigen::VectorXd> projected;
  PcaBasis basis;
};

// Mean-centered projection onto the top-dims eigenvectors of the sample
// covariance, eigendecomposed by cyclic Jacobi sweeps (tolerance 1e-10).
// Eigenvectors are ordered by descending eigenvalue with the sign fixed so
// each column's largest-magnitude entry is positive.
PcaResult pca_reduce(const std::vector<Eigen::VectorXd>& vectors, int dims);

Eigen::VectorXd pca_apply(const PcaBasis& basis, const Eigen::VectorXd& vector);

// Jacobi eigensolver for a symmetric matrix; returns (eigenvalues descending,
// eigenvector columns in matching order).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> jacobi_eigensymm(Eigen::MatrixXd a,
                                                             double tolerance = 1e-10);

// Seeded permutation split into k folds with sizes differing by at most one;
// fold contents are sorted ascending. Folds partition {0..n-1}.
std::vector<std::vector<int>> kfold_split(int n, int k, std::uint64_t seed);

// One fold per distinct group id, keyed and ordered by group id.
std::vector<std::pair<std::string, std::vector<int>>> leave_one_group_out(
    const std::vector<std::string>& groups);

// Group id used for leave-one-group-out on corpus files: the video id prefix
// before the first '_' (ids like "p03_take2"), or the whole id if there is
// no underscore.
std::string video_group(const std::string& video_id);

enum class PipelineArm { kRaw, kPca, kDcs };

struct EvalOptions {
  PipelineArm arm = PipelineArm::kDcs;
  int pca_dims = 0;               // required for the pca arm
  int num_topics = 0;             // 0: default to corpus.num_classes
  double alpha = 1.0;
  double beta = 0.01;
  int iterations = 1000;
  double threshold_fraction = 0.01;
  double svm_cost = 10.0;
  bool leave_one_group_out = false;  // otherwise k-fold
  int kfold = 5;
  std::uint64_t seed = 0;
};

struct FoldOutcome {
  int fold = 0;
  bool degenerate = false;  // dominant selection failed; excluded from means
  std::string note;
  double accuracy = 0.0;
  int retained_dims = 0;
  std::vector<int> test_videos;  // indices into group_by_video order
  std::vector<int> predicted;
  std::vector<int> actual;
  std::vector<DominantSet> dominant_per_view;  // dcs arm only
};

struct EvalReport {
  double mean_accuracy = 0.0;   // over non-degenerate folds
  Eigen::MatrixXi confusion;    // pooled, rows = actual, cols = predicted
  int retained_dims = 0;        // rounded mean over non-degenerate folds
  int total_dims = 0;           // Nw * num_views
  int num_topics = 0;           // Nt actually used
  int valid_folds = 0;
  std::vector<FoldOutcome> folds;
  std::vector<std::string> fold_keys;  // group ids for LOGO, fold numbers otherwise
};

// Runs one pipeline arm under cross-validation. Fitting (LDA + selection,
// PCA basis, SVM) happens on training videos only; held-out videos are
// projected with the train-derived index set or basis. Multiview corpora fit
// LDA + DCS per view and concatenate per-view projections in view order.
EvalReport evaluate(const Corpus& corpus, const EvalOptions& options);

// One fold of evaluate, exposed so folds can be recomputed in isolation;
// results depend only on (corpus, options, fold_index, test_videos).
FoldOutcome evaluate_fold(const Corpus& corpus, const EvalOptions& options,
                          const std::vector<VideoGroup>& videos, int fold_index,
                          const std::vector<int>& test_videos);

// CSV rows "pipeline,fold,accuracy,retained_dims,total_dims" followed by a
// commented confusion block; degenerate folds carry their note instead of an
// accuracy value.
void write_eval_csv(const EvalReport& report, const std::string& pipeline_name,
                    std::ostream& out);

}  // namespace ddt
