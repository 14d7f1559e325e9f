#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace ddt {

// Dense gradient field on an n x m grid, indexed (p, q) with p along x in
// [0, n) and q along y in [0, m). Orientations are radians; any finite value
// is accepted and wrapped into [0, 2*pi) at quantization time.
struct GradientField {
  Eigen::ArrayXXd magnitude;    // n x m, entries >= 0
  Eigen::ArrayXXd orientation;  // n x m

  GradientField() = default;
  GradientField(int n, int m)
      : magnitude(Eigen::ArrayXXd::Zero(n, m)),
        orientation(Eigen::ArrayXXd::Zero(n, m)) {}

  int width() const { return static_cast<int>(magnitude.rows()); }
  int height() const { return static_cast<int>(magnitude.cols()); }
};

// Co-occurrence histogram: one d x d matrix per pixel displacement.
struct CooccurrenceHistogram {
  std::vector<std::pair<int, int>> offsets;  // (x, y) displacements
  std::vector<Eigen::MatrixXd> bins;         // aligned d x d matrices
};

// Cell grid of an oriented-gradient patch descriptor.
struct DescriptorLayout {
  int cells_x = 2;
  int cells_y = 2;
  int cells_t = 3;
  int direction_bins = 8;

  int dimension() const { return cells_x * cells_y * cells_t * direction_bins; }
};

// Patch layouts used by the trajectory descriptors: 2x2x3 cells with 8
// orientation bins (96 dims) for HOG/MBH and 9 bins (108 dims) for HOF.
inline constexpr DescriptorLayout kHogLayout{2, 2, 3, 8};
inline constexpr DescriptorLayout kHofLayout{2, 2, 3, 9};
inline constexpr DescriptorLayout kMbhLayout{2, 2, 3, 8};

// Wraps angle into [0, 2*pi) and returns floor(angle * d / 2*pi), in [0, d).
int quantize_orientation(double angle, int direction_bins);

// Magnitude-weighted orientation histogram per cell, one field per temporal
// slice, cells concatenated in (t, y, x) major order. The patch vector is
// L2-normalized unless its norm is below 1e-6, which leaves an all-zero
// field as an all-zero descriptor.
Eigen::VectorXd hog_patch(const std::vector<GradientField>& temporal_slices,
                          const DescriptorLayout& layout);

// Co-occurrence of quantized orientations: for each offset (x, y),
// C(i, j) sums |g(p, q)| + |g(p+x, q+y)| over in-bounds pixel pairs whose
// orientations quantize to i and j. Pairs leaving the field are skipped.
CooccurrenceHistogram ecohog(const GradientField& field,
                             const std::vector<std::pair<int, int>>& offsets,
                             int direction_bins);

// Concatenates each offset's d x d matrix row-major, offsets in declaration
// order; length = |offsets| * d^2.
Eigen::VectorXd flatten_ecohog(const CooccurrenceHistogram& histogram);

// Plain-text field format: header "field <n> <m>", then n*m magnitude lines
// and n*m orientation lines, one value per line, pixel index p*m + q.
GradientField load_gradient_field(std::istream& in,
                                  const std::string& source_name = "<stream>");
GradientField load_gradient_field(const std::string& path);
void save_gradient_field(const GradientField& field, std::ostream& out);
void save_gradient_field(const GradientField& field, const std::string& path);

}  // namespace ddt
