#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ddt/errors.hpp"

namespace ddt {

// Bag-of-words count vector for one action video in one camera view.
struct ActionDescriptorVector {
  std::string video_id;
  int view_id = 0;
  int label = 0;
  Eigen::VectorXi counts;  // length Nw, entries >= 0

  int total_tokens() const { return counts.sum(); }
};

// Sparse view of an ActionDescriptorVector keeping only its nonzero counts.
struct ReducedVector {
  std::vector<int> indices;  // strictly ascending word ids
  std::vector<int> values;   // positive counts, aligned with indices
  int source_length = 0;     // Nw of the source vector
  bool degenerate = false;   // set when the source vector was all zero

  int size() const { return static_cast<int>(indices.size()); }
};

struct Corpus {
  std::vector<ActionDescriptorVector> vectors;
  int codebook_size = 0;  // Nw, shared by every vector
  int num_classes = 0;
  int num_views = 1;

  int size() const { return static_cast<int>(vectors.size()); }
};

// One video's records across all views, in ascending view order.
struct VideoGroup {
  std::string video_id;
  int label = 0;
  std::vector<int> record_by_view;  // index into corpus.vectors, one per view
};

// Text format (line oriented, UTF-8):
//   bowcorpus <Nw> <num_classes> <num_views>
//   <video_id>\t<view_id>\t<label>\t<wordid>:<count> [<wordid>:<count> ...]
// Word ids strictly ascending within a record, counts positive. Lines
// starting with '#' and blank lines are skipped. A record whose pair list is
// empty is an all-zero (degenerate) vector.
Corpus load_corpus(std::istream& in, const std::string& source_name = "<stream>");
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::string& path);

// Keeps exactly the positions with count > 0, ascending.
ReducedVector nonzero_reduce(const ActionDescriptorVector& v);

// Inverse of nonzero_reduce: rebuilds the dense counts vector.
Eigen::VectorXi scatter_back(const ReducedVector& r);

// Groups records by video id and checks multiview completeness: every video
// must have exactly one record for every view, with a consistent label.
// Videos are returned in order of first appearance.
std::vector<VideoGroup> group_by_video(const Corpus& corpus);

}  // namespace ddt
