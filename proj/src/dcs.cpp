#include "ddt/dcs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ddt {

TopicCodewords topic_codewords(const TopicModel& model) {
  if (model.topic_word_counts.size() == 0)
    throw std::invalid_argument("topic_codewords: model has no counts");
  return TopicCodewords{model.topic_word_counts};
}

int compute_threshold(int num_videos, double fraction) {
  if (num_videos < 1)
    throw std::invalid_argument("compute_threshold: num_videos must be >= 1");
  if (!(fraction > 0.0) || !(fraction < 1.0))
    throw std::invalid_argument("compute_threshold: fraction must be in (0, 1)");
  // fraction * N is a rational with a small denominator; absorb the binary
  // representation error before taking the ceiling so e.g. 0.01 * 5000
  // yields 50, not 51.
  double x = fraction * num_videos;
  double nearest = std::round(x);
  double snapped =
      std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x)) ? nearest : std::ceil(x);
  return std::max(1, static_cast<int>(snapped));
}

DominantSet select_dominant(const TopicCodewords& codewords, int threshold) {
  if (threshold < 1)
    throw std::invalid_argument("select_dominant: threshold must be >= 1");
  DominantSet dominant;
  dominant.threshold = threshold;
  dominant.per_topic.resize(codewords.num_topics());

  bool any = false;
  std::set<int> all;
  for (int k = 0; k < codewords.num_topics(); ++k) {
    for (int w = 0; w < codewords.vocab_size(); ++w) {
      if (codewords.frequency(k, w) >= threshold) {
        dominant.per_topic[k].push_back(w);
        all.insert(w);
        any = true;
      }
    }
  }
  if (!any)
    throw DegenerateSelectionError(
        "select_dominant: threshold " + std::to_string(threshold) +
        " exceeds every per-topic codeword frequency");
  dominant.union_ids.assign(all.begin(), all.end());
  return dominant;
}

std::vector<int> union_dominant(const DominantSet& dominant) {
  std::set<int> all;
  for (const std::vector<int>& topic : dominant.per_topic)
    all.insert(topic.begin(), topic.end());
  if (all.empty())
    throw DegenerateSelectionError("union_dominant: empty dominant union");
  return {all.begin(), all.end()};
}

Eigen::VectorXd project(const ActionDescriptorVector& v,
                        const std::vector<int>& index_set) {
  if (index_set.empty())
    throw std::invalid_argument("project: empty index set");
  Eigen::VectorXd out(static_cast<int>(index_set.size()));
  for (std::size_t j = 0; j < index_set.size(); ++j) {
    int w = index_set[j];
    if (w < 0 || w >= v.counts.size())
      throw std::invalid_argument("project: index " + std::to_string(w) +
                                  " out of range [0, " +
                                  std::to_string(v.counts.size()) + ")");
    out[static_cast<int>(j)] = v.counts[w];
  }
  return out;
}

Eigen::VectorXd multiview_concat(const std::vector<Eigen::VectorXd>& per_view) {
  if (per_view.empty())
    throw std::invalid_argument("multiview_concat: no views given");
  Eigen::Index total = 0;
  for (const Eigen::VectorXd& v : per_view) total += v.size();
  Eigen::VectorXd out(total);
  Eigen::Index at = 0;
  for (const Eigen::VectorXd& v : per_view) {
    out.segment(at, v.size()) = v;
    at += v.size();
  }
  return out;
}

void save_dominant_set(const DominantSet& dominant, std::ostream& out) {
  for (std::size_t k = 0; k < dominant.per_topic.size(); ++k) {
    out << "topic " << k << ":";
    for (int w : dominant.per_topic[k]) out << " " << w;
    out << "\n";
  }
  out << "union:";
  for (int w : dominant.union_ids) out << " " << w;
  out << "\n";
  out << "threshold: " << dominant.threshold << "\n";
}

void save_dominant_set(const DominantSet& dominant, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dominant-set file: " + path);
  save_dominant_set(dominant, out);
}

DominantSet load_dominant_set(std::istream& in) {
  DominantSet dominant;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string tag;
    row >> tag;
    if (tag == "topic") {
      int index;
      char colon;
      if (!(row >> index >> colon) || colon != ':')
        throw ParseError("dominant set: bad topic row", line_no);
      if (index != static_cast<int>(dominant.per_topic.size()))
        throw ParseError("dominant set: topic rows out of order", line_no);
      std::vector<int> ids;
      int w;
      while (row >> w) ids.push_back(w);
      dominant.per_topic.push_back(std::move(ids));
    } else if (tag == "union:") {
      int w;
      while (row >> w) dominant.union_ids.push_back(w);
    } else if (tag == "threshold:") {
      if (!(row >> dominant.threshold))
        throw ParseError("dominant set: bad threshold row", line_no);
    } else {
      throw ParseError("dominant set: unknown row tag '" + tag + "'", line_no);
    }
  }
  return dominant;
}

DominantSet load_dominant_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dominant-set file: " + path);
  return load_dominant_set(in);
}

}  // namespace ddt
