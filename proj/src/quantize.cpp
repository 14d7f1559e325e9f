#include "ddt/quantize.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ddt/errors.hpp"
#include "ddt/rng.hpp"

namespace ddt {
namespace {

constexpr int kMaxLloydIterations = 100;

// Squared distances from every point to its nearest chosen centroid,
// maintained incrementally during k-means++ seeding.
void update_d2(const Eigen::MatrixXd& points, const Eigen::RowVectorXd& centroid,
               Eigen::VectorXd& d2) {
  for (int i = 0; i < points.rows(); ++i) {
    double dist = (points.row(i) - centroid).squaredNorm();
    if (dist < d2[i]) d2[i] = dist;
  }
}

}  // namespace

Codebook fit_codebook(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                      KMeansStats* stats) {
  const int n = static_cast<int>(points.rows());
  const int dim = static_cast<int>(points.cols());
  if (k < 1) throw std::invalid_argument("fit_codebook: k must be >= 1");
  if (n < k)
    throw std::invalid_argument("fit_codebook: fewer points (" + std::to_string(n) +
                                ") than clusters (" + std::to_string(k) + ")");

  Rng rng(seed);
  Codebook cb;
  cb.centroids.resize(k, dim);

  // k-means++ seeding: first centroid uniform, the rest D^2-weighted.
  Eigen::VectorXd d2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::max());
  cb.centroids.row(0) = points.row(rng.uniform_index(n));
  update_d2(points, cb.centroids.row(0), d2);
  for (int c = 1; c < k; ++c) {
    double total = d2.sum();
    int pick;
    if (total > 0.0) {
      double u = rng.uniform_double() * total;
      double cum = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        cum += d2[i];
        if (u < cum) {
          pick = i;
          break;
        }
      }
    } else {
      // Every point coincides with a chosen centroid.
      pick = rng.uniform_index(n);
    }
    cb.centroids.row(c) = points.row(pick);
    update_d2(points, cb.centroids.row(c), d2);
  }

  std::vector<int> assignment(n, -1);
  std::vector<int> previous(n, -2);
  double last_distortion = std::numeric_limits<double>::max();
  if (stats) *stats = KMeansStats{};

  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    // Assignment step; also collects the distortion of the current centroids.
    double distortion = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_dist = (points.row(i) - cb.centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        double dist = (points.row(i) - cb.centroids.row(c)).squaredNorm();
        if (dist < best_dist) {
          best_dist = dist;
          best = c;
        }
      }
      assignment[i] = best;
      distortion += best_dist;
    }
    if (distortion > last_distortion * (1.0 + 1e-12) + 1e-12)
      throw std::logic_error("fit_codebook: distortion increased across iterations");
    last_distortion = distortion;
    if (stats) {
      stats->distortions.push_back(distortion);
      stats->iterations = iter + 1;
    }

    if (assignment == previous) {
      if (stats) stats->converged = true;
      break;
    }
    previous = assignment;

    // Update step: mean of assigned points, summed in index order.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(assignment[i]) += points.row(i);
      counts[assignment[i]] += 1;
    }
    std::vector<char> reseeded(n, 0);
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        cb.centroids.row(c) = sums.row(c) / counts[c];
      } else {
        // Reseed an empty cluster to the point farthest from its centroid.
        int far = -1;
        double far_dist = -1.0;
        for (int i = 0; i < n; ++i) {
          if (reseeded[i]) continue;
          double dist =
              (points.row(i) - cb.centroids.row(assignment[i])).squaredNorm();
          if (dist > far_dist) {
            far_dist = dist;
            far = i;
          }
        }
        cb.centroids.row(c) = points.row(far);
        reseeded[far] = 1;
      }
    }
  }

  return cb;
}

int assign(const Eigen::Ref<const Eigen::VectorXd>& point, const Codebook& codebook) {
  if (point.size() != codebook.feature_dim())
    throw std::invalid_argument("assign: point dimension " +
                                std::to_string(point.size()) + " != codebook dim " +
                                std::to_string(codebook.feature_dim()));
  int best = 0;
  double best_dist = (codebook.centroids.row(0).transpose() - point).squaredNorm();
  for (int c = 1; c < codebook.size(); ++c) {
    double dist = (codebook.centroids.row(c).transpose() - point).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = c;
    }
  }
  return best;
}

Eigen::VectorXi bow(const std::vector<int>& assignments, int vocab_size) {
  if (vocab_size < 1) throw std::invalid_argument("bow: vocab_size must be >= 1");
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(vocab_size);
  for (int w : assignments) {
    if (w < 0 || w >= vocab_size)
      throw std::invalid_argument("bow: word id " + std::to_string(w) +
                                  " out of range [0, " + std::to_string(vocab_size) + ")");
    counts[w] += 1;
  }
  return counts;
}

void save_codebook(const Codebook& codebook, std::ostream& out) {
  out << "codebook " << codebook.size() << " " << codebook.feature_dim() << "\n"
      << std::setprecision(17);
  for (int c = 0; c < codebook.size(); ++c) {
    for (int j = 0; j < codebook.feature_dim(); ++j) {
      if (j) out << " ";
      out << codebook.centroids(c, j);
    }
    out << "\n";
  }
}

void save_codebook(const Codebook& codebook, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write codebook file: " + path);
  save_codebook(codebook, out);
}

Codebook load_codebook(std::istream& in, const std::string& source_name) {
  std::string magic;
  int k = 0, dim = 0;
  if (!(in >> magic) || magic != "codebook" || !(in >> k >> dim) || k < 1 || dim < 1)
    throw ParseError(source_name + ":1: expected header 'codebook <k> <dim>'", 1);
  Codebook cb;
  cb.centroids.resize(k, dim);
  for (int c = 0; c < k; ++c)
    for (int j = 0; j < dim; ++j)
      if (!(in >> cb.centroids(c, j)))
        throw ParseError(source_name + ": codebook truncated at row " +
                             std::to_string(c),
                         c + 2);
  return cb;
}

Codebook load_codebook(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open codebook file: " + path);
  return load_codebook(in, path);
}

Eigen::MatrixXd load_points(std::istream& in, const std::string& source_name) {
  std::string magic;
  int n = 0, dim = 0;
  if (!(in >> magic) || magic != "descriptors" || !(in >> n >> dim) || n < 0 || dim < 1)
    throw ParseError(source_name + ":1: expected header 'descriptors <n> <dim>'", 1);
  Eigen::MatrixXd points(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j)
      if (!(in >> points(i, j)))
        throw ParseError(source_name + ": descriptor file truncated at row " +
                             std::to_string(i),
                         i + 2);
  return points;
}

Eigen::MatrixXd load_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open descriptor file: " + path);
  return load_points(in, path);
}

void save_points(const Eigen::MatrixXd& points, std::ostream& out) {
  out << "descriptors " << points.rows() << " " << points.cols() << "\n"
      << std::setprecision(17);
  for (int i = 0; i < points.rows(); ++i) {
    for (int j = 0; j < points.cols(); ++j) {
      if (j) out << " ";
      out << points(i, j);
    }
    out << "\n";
  }
}

void save_points(const Eigen::MatrixXd& points, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write descriptor file: " + path);
  save_points(points, out);
}

}  // namespace ddt
