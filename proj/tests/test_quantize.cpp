#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "ddt/errors.hpp"
#include "ddt/quantize.hpp"
#include "ddt/rng.hpp"

using namespace ddt;

namespace {

Eigen::MatrixXd two_blobs(int per_blob, double radius, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd points(2 * per_blob, 2);
  for (int i = 0; i < per_blob; ++i) {
    points(i, 0) = 0.0 + (rng.uniform_double() * 2 - 1) * radius;
    points(i, 1) = 0.0 + (rng.uniform_double() * 2 - 1) * radius;
    points(per_blob + i, 0) = 10.0 + (rng.uniform_double() * 2 - 1) * radius;
    points(per_blob + i, 1) = 10.0 + (rng.uniform_double() * 2 - 1) * radius;
  }
  return points;
}

}  // namespace

TEST_CASE("k equal to point count makes every distinct point a centroid") {
  Eigen::MatrixXd points(4, 2);
  points << 0, 0, 1, 0, 0, 1, 5, 5;
  Codebook cb = fit_codebook(points, 4, 123);
  double distortion = 0.0;
  std::set<int> used;
  for (int i = 0; i < points.rows(); ++i) {
    int a = assign(points.row(i).transpose(), cb);
    used.insert(a);
    distortion += (points.row(i) - cb.centroids.row(a)).squaredNorm();
  }
  CHECK(distortion == 0.0);
  CHECK(used.size() == 4);
}

TEST_CASE("two tight blobs recover their means with k = 2") {
  Eigen::MatrixXd points = two_blobs(50, 0.1, 77);
  Eigen::RowVector2d mean_a = points.topRows(50).colwise().mean();
  Eigen::RowVector2d mean_b = points.bottomRows(50).colwise().mean();

  Codebook cb = fit_codebook(points, 2, 9);
  double d_a = std::min((cb.centroids.row(0) - mean_a).norm(),
                        (cb.centroids.row(1) - mean_a).norm());
  double d_b = std::min((cb.centroids.row(0) - mean_b).norm(),
                        (cb.centroids.row(1) - mean_b).norm());
  CHECK(d_a < 0.2);
  CHECK(d_b < 0.2);
}

TEST_CASE("fit_codebook is deterministic for a fixed seed") {
  Eigen::MatrixXd points = two_blobs(30, 1.0, 5);
  Codebook a = fit_codebook(points, 8, 42);
  Codebook b = fit_codebook(points, 8, 42);
  CHECK(a.centroids == b.centroids);
}

TEST_CASE("fit_codebook rejects fewer points than clusters") {
  Eigen::MatrixXd points(3, 2);
  points.setZero();
  CHECK_THROWS_AS(fit_codebook(points, 4, 0), std::invalid_argument);
}

TEST_CASE("Lloyd distortion is non-increasing across iterations") {
  Rng rng(55);
  Eigen::MatrixXd points(200, 3);
  for (int i = 0; i < points.rows(); ++i)
    for (int j = 0; j < 3; ++j) points(i, j) = rng.uniform_double() * 4.0;
  KMeansStats stats;
  fit_codebook(points, 10, 17, &stats);
  REQUIRE(stats.iterations >= 1);
  for (std::size_t i = 1; i < stats.distortions.size(); ++i)
    CHECK(stats.distortions[i] <= stats.distortions[i - 1] * (1.0 + 1e-12));
  CHECK(stats.converged);
}

TEST_CASE("assign returns the exact centroid and breaks ties low") {
  Codebook cb;
  cb.centroids = Eigen::MatrixXd::Zero(8, 2);
  for (int c = 0; c < 8; ++c) cb.centroids(c, 1) = 10.0 + c;  // far row
  cb.centroids.row(2) << 1.0, 0.0;
  cb.centroids.row(7) << -1.0, 0.0;

  Eigen::VectorXd exact = cb.centroids.row(5).transpose();
  CHECK(assign(exact, cb) == 5);

  // The origin is equidistant between centroids 2 and 7; lower index wins.
  CHECK(assign(Eigen::VectorXd::Zero(2), cb) == 2);

  Eigen::VectorXd wrong_dim(3);
  wrong_dim.setZero();
  CHECK_THROWS_AS(assign(wrong_dim, cb), std::invalid_argument);
}

TEST_CASE("every training point lands on its true nearest centroid") {
  Rng rng(404);
  Eigen::MatrixXd points(300, 4);
  for (int i = 0; i < points.rows(); ++i)
    for (int j = 0; j < 4; ++j) points(i, j) = rng.uniform_double();
  for (int k : {2, 16, 64}) {
    Codebook cb = fit_codebook(points, k, 3);
    for (int i = 0; i < points.rows(); ++i) {
      int a = assign(points.row(i).transpose(), cb);
      double chosen = (points.row(i) - cb.centroids.row(a)).squaredNorm();
      for (int c = 0; c < k; ++c)
        CHECK(chosen <= (points.row(i) - cb.centroids.row(c)).squaredNorm());
    }
  }
}

TEST_CASE("bow counts multiplicities and conserves tokens") {
  Eigen::VectorXi counts = bow({0, 0, 3}, 4);
  Eigen::VectorXi expected(4);
  expected << 2, 0, 0, 1;
  CHECK(counts == expected);

  CHECK(bow({}, 7).sum() == 0);
  CHECK(bow({}, 7).size() == 7);

  Rng rng(8);
  std::vector<int> ids;
  for (int i = 0; i < 500; ++i) ids.push_back(rng.uniform_index(40));
  CHECK(bow(ids, 40).sum() == 500);

  CHECK_THROWS_AS(bow({0, 5}, 5), std::invalid_argument);
  CHECK(kDefaultCodebookSize == 4000);
}

TEST_CASE("codebook round-trips through the text format") {
  Eigen::MatrixXd points = two_blobs(10, 0.5, 2);
  Codebook cb = fit_codebook(points, 3, 11);
  std::ostringstream out;
  save_codebook(cb, out);
  std::istringstream in(out.str());
  Codebook reloaded = load_codebook(in);
  CHECK(reloaded.centroids == cb.centroids);

  std::istringstream bad("codebook 2 2\n0 0\n");
  CHECK_THROWS_AS(load_codebook(bad), ParseError);
}

TEST_CASE("descriptor point files round-trip") {
  Rng rng(6);
  Eigen::MatrixXd points(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) points(i, j) = rng.uniform_double();
  std::ostringstream out;
  save_points(points, out);
  std::istringstream in(out.str());
  CHECK(load_points(in) == points);
}
