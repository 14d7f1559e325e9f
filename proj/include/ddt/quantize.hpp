#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ddt {

// Default dictionary size for trajectory descriptors.
inline constexpr int kDefaultCodebookSize = 4000;

struct Codebook {
  Eigen::MatrixXd centroids;  // k x feature_dim, one centroid per row

  int size() const { return static_cast<int>(centroids.rows()); }
  int feature_dim() const { return static_cast<int>(centroids.cols()); }
};

// Per-iteration fitting diagnostics, filled when requested.
struct KMeansStats {
  std::vector<double> distortions;  // total squared distance per Lloyd iteration
  int iterations = 0;
  bool converged = false;  // assignment fixpoint reached before the cap
};

// k-means++ seeding followed by Lloyd iterations until the assignment
// fixpoint or 100 iterations. Empty clusters are reseeded to the point
// farthest from its current centroid. Deterministic for a given seed.
Codebook fit_codebook(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                      KMeansStats* stats = nullptr);

// Index of the nearest centroid under squared Euclidean distance, ties
// broken by lowest index.
int assign(const Eigen::Ref<const Eigen::VectorXd>& point, const Codebook& codebook);

// counts[w] = multiplicity of w in the assignment sequence.
Eigen::VectorXi bow(const std::vector<int>& assignments, int vocab_size);

// Text format: header "codebook <k> <dim>" followed by k centroid rows.
void save_codebook(const Codebook& codebook, std::ostream& out);
void save_codebook(const Codebook& codebook, const std::string& path);
Codebook load_codebook(std::istream& in, const std::string& source_name = "<stream>");
Codebook load_codebook(const std::string& path);

// Descriptor point files: header "descriptors <n> <dim>" then n rows.
Eigen::MatrixXd load_points(std::istream& in, const std::string& source_name = "<stream>");
Eigen::MatrixXd load_points(const std::string& path);
void save_points(const Eigen::MatrixXd& points, std::ostream& out);
void save_points(const Eigen::MatrixXd& points, const std::string& path);

}  // namespace ddt
