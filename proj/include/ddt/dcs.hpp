#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ddt/corpus.hpp"
#include "ddt/lda.hpp"

namespace ddt {

// Per-topic codeword frequencies: tokens assigned to (topic, word) in the
// final Gibbs sweep.
struct TopicCodewords {
  Eigen::MatrixXi frequency;  // Nt x Nw

  int num_topics() const { return static_cast<int>(frequency.rows()); }
  int vocab_size() const { return static_cast<int>(frequency.cols()); }
};

// Dominant codewords per topic and their union, the index set of the
// dominant BoW vector.
struct DominantSet {
  std::vector<std::vector<int>> per_topic;  // ascending word ids per topic
  std::vector<int> union_ids;               // ascending union of all topics
  int threshold = 0;
};

TopicCodewords topic_codewords(const TopicModel& model);

// Smallest integer >= fraction * num_videos, floored at 1. The default
// fraction is 1%.
int compute_threshold(int num_videos, double fraction = 0.01);

// Keeps codewords with frequency >= threshold in each topic. Throws
// DegenerateSelectionError when every per-topic set comes out empty.
DominantSet select_dominant(const TopicCodewords& codewords, int threshold);

// Set-union of the per-topic dominant sets, ascending. Throws
// DegenerateSelectionError on an empty union.
std::vector<int> union_dominant(const DominantSet& dominant);

// output[j] = v.counts[index_set[j]]. Counts are copied, never rescaled.
Eigen::VectorXd project(const ActionDescriptorVector& v,
                        const std::vector<int>& index_set);

// Concatenates one video's per-view projected vectors in view order.
Eigen::VectorXd multiview_concat(const std::vector<Eigen::VectorXd>& per_view);

// Text lines "topic <n>: <wordid> ...", "union: <wordid> ...",
// "threshold: <t>".
void save_dominant_set(const DominantSet& dominant, std::ostream& out);
void save_dominant_set(const DominantSet& dominant, const std::string& path);
DominantSet load_dominant_set(std::istream& in);
DominantSet load_dominant_set(const std::string& path);

}  // namespace ddt
