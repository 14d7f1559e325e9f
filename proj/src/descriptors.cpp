#include "ddt/descriptors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ddt/errors.hpp"

namespace ddt {

int quantize_orientation(double angle, int direction_bins) {
  if (direction_bins < 1)
    throw std::invalid_argument("quantize_orientation: bin count must be >= 1");
  if (!std::isfinite(angle))
    throw std::invalid_argument("quantize_orientation: angle must be finite");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(angle, two_pi);
  if (wrapped < 0.0) wrapped += two_pi;
  int bin = static_cast<int>(wrapped * direction_bins / two_pi);
  // fmod can land exactly on two_pi after the negative fixup.
  if (bin >= direction_bins) bin = direction_bins - 1;
  if (bin < 0) bin = 0;
  return bin;
}

Eigen::VectorXd hog_patch(const std::vector<GradientField>& temporal_slices,
                          const DescriptorLayout& layout) {
  if (layout.cells_x < 1 || layout.cells_y < 1 || layout.cells_t < 1 ||
      layout.direction_bins < 1)
    throw std::invalid_argument("hog_patch: layout fields must be positive");
  if (static_cast<int>(temporal_slices.size()) != layout.cells_t)
    throw std::invalid_argument("hog_patch: need one field per temporal cell");

  const int n = temporal_slices.front().width();
  const int m = temporal_slices.front().height();
  if (n % layout.cells_x != 0 || m % layout.cells_y != 0)
    throw std::invalid_argument("hog_patch: field dims not divisible by cell grid");
  for (const GradientField& f : temporal_slices) {
    if (f.width() != n || f.height() != m)
      throw std::invalid_argument("hog_patch: temporal slices differ in size");
    if (f.magnitude.rows() != f.orientation.rows() ||
        f.magnitude.cols() != f.orientation.cols())
      throw std::invalid_argument("hog_patch: magnitude/orientation shape mismatch");
  }

  const int cell_w = n / layout.cells_x;
  const int cell_h = m / layout.cells_y;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(layout.dimension());

  for (int t = 0; t < layout.cells_t; ++t) {
    const GradientField& f = temporal_slices[t];
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < m; ++q) {
        int cx = p / cell_w;
        int cy = q / cell_h;
        int bin = quantize_orientation(f.orientation(p, q), layout.direction_bins);
        int cell = (t * layout.cells_y + cy) * layout.cells_x + cx;
        out[cell * layout.direction_bins + bin] += f.magnitude(p, q);
      }
    }
  }

  double norm = out.norm();
  if (norm > 1e-6) out /= norm;
  return out;
}

CooccurrenceHistogram ecohog(const GradientField& field,
                             const std::vector<std::pair<int, int>>& offsets,
                             int direction_bins) {
  if (offsets.empty()) throw std::invalid_argument("ecohog: empty offset list");
  if (direction_bins < 1)
    throw std::invalid_argument("ecohog: bin count must be >= 1");
  const int n = field.width();
  const int m = field.height();
  if (field.magnitude.rows() != field.orientation.rows() ||
      field.magnitude.cols() != field.orientation.cols())
    throw std::invalid_argument("ecohog: magnitude/orientation shape mismatch");

  CooccurrenceHistogram histogram;
  histogram.offsets = offsets;
  histogram.bins.reserve(offsets.size());

  for (const auto& [x, y] : offsets) {
    if (std::abs(x) >= n || std::abs(y) >= m)
      throw std::invalid_argument("ecohog: offset (" + std::to_string(x) + ", " +
                                  std::to_string(y) +
                                  ") keeps no in-bounds pair");
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(direction_bins, direction_bins);
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < m; ++q) {
        int p2 = p + x;
        int q2 = q + y;
        if (p2 < 0 || p2 >= n || q2 < 0 || q2 >= m) continue;
        int i = quantize_orientation(field.orientation(p, q), direction_bins);
        int j = quantize_orientation(field.orientation(p2, q2), direction_bins);
        c(i, j) += field.magnitude(p, q) + field.magnitude(p2, q2);
      }
    }
    histogram.bins.push_back(std::move(c));
  }
  return histogram;
}

Eigen::VectorXd flatten_ecohog(const CooccurrenceHistogram& histogram) {
  if (histogram.bins.empty()) return Eigen::VectorXd();
  const int d = static_cast<int>(histogram.bins.front().rows());
  Eigen::VectorXd out(static_cast<int>(histogram.bins.size()) * d * d);
  int at = 0;
  for (const Eigen::MatrixXd& c : histogram.bins) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out[at++] = c(i, j);
  }
  return out;
}

GradientField load_gradient_field(std::istream& in, const std::string& source_name) {
  std::string magic;
  int n = 0, m = 0;
  if (!(in >> magic) || magic != "field" || !(in >> n >> m) || n < 1 || m < 1)
    throw ParseError(source_name + ":1: expected header 'field <n> <m>'", 1);
  GradientField field(n, m);
  for (int i = 0; i < 2 * n * m; ++i) {
    double value;
    if (!(in >> value))
      throw ParseError(source_name + ": field file truncated at value " +
                           std::to_string(i + 2),
                       i + 2);
    int p = (i % (n * m)) / m;
    int q = (i % (n * m)) % m;
    if (i < n * m)
      field.magnitude(p, q) = value;
    else
      field.orientation(p, q) = value;
  }
  return field;
}

GradientField load_gradient_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open field file: " + path);
  return load_gradient_field(in, path);
}

void save_gradient_field(const GradientField& field, std::ostream& out) {
  const int n = field.width();
  const int m = field.height();
  out << "field " << n << " " << m << "\n" << std::setprecision(17);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < m; ++q) out << field.magnitude(p, q) << "\n";
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < m; ++q) out << field.orientation(p, q) << "\n";
}

void save_gradient_field(const GradientField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write field file: " + path);
  save_gradient_field(field, out);
}

}  // namespace ddt
