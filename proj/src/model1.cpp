#include "model1.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mt {

std::vector<RawPair> parse_bitext(std::istream& in) {
  std::vector<RawPair> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t sep = line.find("|||");
    if (sep == std::string::npos)
      throw ParseError("bitext line " + std::to_string(lineno) +
                       ": missing '|||' separator");
    RawPair pair;
    std::istringstream src(line.substr(0, sep));
    std::istringstream tgt(line.substr(sep + 3));
    std::string w;
    while (src >> w) pair.source.push_back(w);
    while (tgt >> w) pair.target.push_back(w);
    if (pair.source.empty() || pair.target.empty())
      throw ParseError("bitext line " + std::to_string(lineno) +
                       ": empty side");
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<RawPair> load_bitext(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open bitext file: " + path);
  return parse_bitext(in);
}

void Model1::train(const std::vector<RawPair>& pairs, int iterations) {
  if (pairs.empty()) throw DataError("Model 1: empty bitext");
  if (iterations < 1) throw DataError("Model 1: iterations must be >= 1");

  // Uniform init over co-occurring candidates.
  table_.clear();
  for (const auto& pair : pairs)
    for (const auto& s : pair.source)
      for (const auto& t : pair.target) table_[s][t] = 1.0;
  for (auto& [s, row] : table_) {
    double u = 1.0 / static_cast<double>(row.size());
    for (auto& [t, v] : row) v = u;
  }

  for (int it = 0; it < iterations; ++it) {
    std::unordered_map<std::string, std::unordered_map<std::string, double>>
        counts;
    for (const auto& pair : pairs) {
      for (const auto& t : pair.target) {
        double denom = 0.0;
        for (const auto& s : pair.source) denom += table_[s][t];
        if (denom <= 0.0) continue;
        for (const auto& s : pair.source)
          counts[s][t] += table_[s][t] / denom;
      }
    }
    for (auto& [s, row] : counts) {
      double total = 0.0;
      for (const auto& [t, c] : row) total += c;
      auto& trow = table_[s];
      for (const auto& [t, c] : row) trow[t] = c / total;
    }
  }
}

double Model1::prob(const std::string& src_word,
                    const std::string& tgt_word) const {
  auto it = table_.find(src_word);
  if (it == table_.end()) return 0.0;
  auto jt = it->second.find(tgt_word);
  return jt == it->second.end() ? 0.0 : jt->second;
}

DirAlignment Model1::best_links(const RawPair& pair) const {
  DirAlignment out;
  for (int j = 0; j < static_cast<int>(pair.target.size()); ++j) {
    double denom = 0.0;
    std::vector<double> ps(pair.source.size(), 0.0);
    for (int i = 0; i < static_cast<int>(pair.source.size()); ++i) {
      ps[i] = prob(pair.source[i], pair.target[j]);
      denom += ps[i];
    }
    if (denom <= 0.0) continue;  // unseen word: leave unaligned
    int best = 0;
    for (int i = 1; i < static_cast<int>(ps.size()); ++i)
      if (ps[i] > ps[best]) best = i;
    out.push_back(DirLink{best, j, ps[best] / denom});
  }
  return out;
}

void model1_align(const std::vector<RawPair>& bitext, int iterations,
                  std::vector<DirAlignment>& fwd,
                  std::vector<DirAlignment>& rev) {
  Model1 forward;
  forward.train(bitext, iterations);
  fwd.clear();
  fwd.reserve(bitext.size());
  for (const auto& pair : bitext) fwd.push_back(forward.best_links(pair));

  std::vector<RawPair> swapped;
  swapped.reserve(bitext.size());
  for (const auto& pair : bitext)
    swapped.push_back(RawPair{pair.target, pair.source});
  Model1 reverse;
  reverse.train(swapped, iterations);
  rev.clear();
  rev.reserve(bitext.size());
  for (size_t k = 0; k < bitext.size(); ++k) {
    // best_links on the swapped pair yields (tgt, src) roles; swap back.
    DirAlignment links = reverse.best_links(swapped[k]);
    for (auto& l : links) std::swap(l.src, l.tgt);
    rev.push_back(std::move(links));
  }
}

void write_alignments(std::ostream& out,
                      const std::vector<DirAlignment>& alignments) {
  char buf[64];
  for (const auto& sent : alignments) {
    bool first = true;
    for (const auto& l : sent) {
      std::snprintf(buf, sizeof buf, "%d-%d:%.6f", l.src, l.tgt, l.p);
      if (!first) out << ' ';
      out << buf;
      first = false;
    }
    out << '\n';
  }
}

void save_alignments(const std::string& path,
                     const std::vector<DirAlignment>& alignments) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write alignment file: " + path);
  write_alignments(out, alignments);
}

std::vector<DirAlignment> parse_alignments(std::istream& in) {
  std::vector<DirAlignment> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    DirAlignment sent;
    std::istringstream toks(line);
    std::string t;
    while (toks >> t) {
      DirLink l;
      char* end = nullptr;
      l.src = static_cast<int>(std::strtol(t.c_str(), &end, 10));
      if (!end || *end != '-')
        throw ParseError("alignment line " + std::to_string(lineno) +
                         ": bad link '" + t + "'");
      l.tgt = static_cast<int>(std::strtol(end + 1, &end, 10));
      if (!end || *end != ':')
        throw ParseError("alignment line " + std::to_string(lineno) +
                         ": bad link '" + t + "'");
      l.p = std::strtod(end + 1, &end);
      if (l.src < 0 || l.tgt < 0 || l.p < 0.0 || l.p > 1.0)
        throw ParseError("alignment line " + std::to_string(lineno) +
                         ": out-of-range link '" + t + "'");
      sent.push_back(l);
    }
    out.push_back(std::move(sent));
  }
  return out;
}

std::vector<DirAlignment> load_alignments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open alignment file: " + path);
  return parse_alignments(in);
}

std::vector<AlignmentLink> intersect_and_filter(const DirAlignment& fwd,
                                                const DirAlignment& rev,
                                                double alpha, int src_len,
                                                int tgt_len) {
  auto check = [&](const DirLink& l) {
    if (l.src < 0 || l.src >= src_len || l.tgt < 0 || l.tgt >= tgt_len)
      throw DataError("alignment link (" + std::to_string(l.src) + "," +
                      std::to_string(l.tgt) + ") out of sentence bounds");
  };
  std::unordered_map<long long, double> rev_map;
  for (const auto& l : rev) {
    check(l);
    rev_map[static_cast<long long>(l.src) * 1000000 + l.tgt] = l.p;
  }
  std::vector<AlignmentLink> out;
  for (const auto& l : fwd) {
    check(l);
    auto it = rev_map.find(static_cast<long long>(l.src) * 1000000 + l.tgt);
    if (it == rev_map.end()) continue;
    if (l.p >= alpha && it->second >= alpha)
      out.push_back(AlignmentLink{l.src, l.tgt, l.p, it->second});
  }
  return out;
}

}  // namespace mt
