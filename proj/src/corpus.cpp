#include "ddt/corpus.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace ddt {
namespace {

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line << ": " << what;
  throw ParseError(msg.str(), line);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

int parse_int(const std::string& text, const std::string& source, int line,
              const std::string& what) {
  try {
    std::size_t pos = 0;
    int value = std::stoi(text, &pos);
    if (pos != text.size()) fail(source, line, "trailing junk in " + what);
    return value;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    fail(source, line, "cannot parse " + what + " from '" + text + "'");
  }
}

}  // namespace

Corpus load_corpus(std::istream& in, const std::string& source_name) {
  Corpus corpus;
  std::string line;
  int line_no = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    if (!header_seen) {
      std::istringstream hdr(line);
      std::string magic;
      hdr >> magic;
      if (magic != "bowcorpus")
        fail(source_name, line_no, "missing 'bowcorpus' header");
      if (!(hdr >> corpus.codebook_size >> corpus.num_classes >> corpus.num_views))
        fail(source_name, line_no, "header needs <Nw> <num_classes> <num_views>");
      if (corpus.codebook_size < 1 || corpus.num_classes < 1 || corpus.num_views < 1)
        fail(source_name, line_no, "header fields must be positive");
      header_seen = true;
      continue;
    }

    std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != 4)
      fail(source_name, line_no, "record needs 4 tab-separated fields");
    if (fields[0].empty()) fail(source_name, line_no, "empty video id");

    ActionDescriptorVector v;
    v.video_id = fields[0];
    v.view_id = parse_int(fields[1], source_name, line_no, "view id");
    v.label = parse_int(fields[2], source_name, line_no, "label");
    if (v.view_id < 0 || v.view_id >= corpus.num_views)
      fail(source_name, line_no, "view id " + fields[1] + " out of range");
    if (v.label < 0 || v.label >= corpus.num_classes)
      fail(source_name, line_no, "label " + fields[2] + " out of range");

    v.counts = Eigen::VectorXi::Zero(corpus.codebook_size);
    std::istringstream body(fields[3]);
    std::string pair;
    int prev_word = -1;
    while (body >> pair) {
      std::size_t colon = pair.find(':');
      if (colon == std::string::npos)
        fail(source_name, line_no, "expected <wordid>:<count>, got '" + pair + "'");
      int word = parse_int(pair.substr(0, colon), source_name, line_no, "word id");
      int count = parse_int(pair.substr(colon + 1), source_name, line_no, "count");
      if (word < 0 || word >= corpus.codebook_size)
        fail(source_name, line_no,
             "word id " + std::to_string(word) + " out of range [0, " +
                 std::to_string(corpus.codebook_size) + ")");
      if (word == prev_word)
        fail(source_name, line_no, "duplicate word id " + std::to_string(word));
      if (word < prev_word)
        fail(source_name, line_no, "word ids must be ascending");
      if (count <= 0)
        fail(source_name, line_no,
             "count for word " + std::to_string(word) + " must be positive");
      v.counts[word] = count;
      prev_word = word;
    }
    corpus.vectors.push_back(std::move(v));
  }

  if (!header_seen) fail(source_name, line_no, "missing 'bowcorpus' header");
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  return load_corpus(in, path);
}

void save_corpus(const Corpus& corpus, std::ostream& out) {
  out << "bowcorpus " << corpus.codebook_size << " " << corpus.num_classes
      << " " << corpus.num_views << "\n";
  for (const ActionDescriptorVector& v : corpus.vectors) {
    out << v.video_id << "\t" << v.view_id << "\t" << v.label << "\t";
    bool first = true;
    for (int w = 0; w < v.counts.size(); ++w) {
      if (v.counts[w] == 0) continue;
      if (!first) out << " ";
      out << w << ":" << v.counts[w];
      first = false;
    }
    out << "\n";
  }
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path);
  save_corpus(corpus, out);
}

ReducedVector nonzero_reduce(const ActionDescriptorVector& v) {
  ReducedVector r;
  r.source_length = static_cast<int>(v.counts.size());
  for (int w = 0; w < v.counts.size(); ++w) {
    if (v.counts[w] < 0)
      throw std::invalid_argument("nonzero_reduce: negative count at word " +
                                  std::to_string(w));
    if (v.counts[w] > 0) {
      r.indices.push_back(w);
      r.values.push_back(v.counts[w]);
    }
  }
  r.degenerate = r.indices.empty();
  return r;
}

Eigen::VectorXi scatter_back(const ReducedVector& r) {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(r.source_length);
  for (std::size_t i = 0; i < r.indices.size(); ++i)
    counts[r.indices[i]] = r.values[i];
  return counts;
}

std::vector<VideoGroup> group_by_video(const Corpus& corpus) {
  std::vector<VideoGroup> videos;
  std::map<std::string, int> index_of;
  for (int i = 0; i < corpus.size(); ++i) {
    const ActionDescriptorVector& v = corpus.vectors[i];
    auto [it, inserted] = index_of.try_emplace(v.video_id, static_cast<int>(videos.size()));
    if (inserted) {
      VideoGroup g;
      g.video_id = v.video_id;
      g.label = v.label;
      g.record_by_view.assign(corpus.num_views, -1);
      videos.push_back(std::move(g));
    }
    VideoGroup& g = videos[it->second];
    if (g.label != v.label)
      throw std::invalid_argument("video '" + v.video_id +
                                  "' has inconsistent labels across views");
    if (g.record_by_view[v.view_id] != -1)
      throw std::invalid_argument("video '" + v.video_id + "' has duplicate view " +
                                  std::to_string(v.view_id));
    g.record_by_view[v.view_id] = i;
  }
  for (const VideoGroup& g : videos) {
    for (int view = 0; view < corpus.num_views; ++view) {
      if (g.record_by_view[view] == -1)
        throw std::invalid_argument("video '" + g.video_id + "' is missing view " +
                                    std::to_string(view));
    }
  }
  return videos;
}

}  // namespace ddt
