#ifndef MORPHTAG_MODEL1_HPP
#define MORPHTAG_MODEL1_HPP

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "tag.hpp"

namespace mt {

struct RawPair {
  std::vector<std::string> source;
  std::vector<std::string> target;
};

// Bitext format: one pair per line, "source tokens ||| target tokens".
std::vector<RawPair> parse_bitext(std::istream& in);
std::vector<RawPair> load_bitext(const std::string& path);

// One directional alignment point with its posterior.
struct DirLink {
  int src = -1;
  int tgt = -1;
  double p = 0.0;
};

// Per sentence pair: the argmax link for each token of the modelled side.
using DirAlignment = std::vector<DirLink>;

// An intersected, threshold-filtered link carrying both posteriors.
struct AlignmentLink {
  int src = -1;
  int tgt = -1;
  double p_fwd = 0.0;
  double p_rev = 0.0;
};

// IBM Model 1 lexical translation model, trained by EM in one direction.
// Directions are handled by the caller swapping the sides.
class Model1 {
 public:
  // iterations >= 1; empty bitext is an error. `pairs` is read as
  // (conditioning side, generated side): the model learns p(generated |
  // conditioning) with no null word.
  void train(const std::vector<RawPair>& pairs, int iterations);

  // Translation probability p(tgt_word | src_word); 0 if unseen.
  double prob(const std::string& src_word, const std::string& tgt_word) const;

  // For each generated-side token j, the posterior p(a_j = i) over
  // conditioning-side positions i, and the argmax link.
  DirAlignment best_links(const RawPair& pair) const;

 private:
  std::unordered_map<std::string,
                     std::unordered_map<std::string, double>> table_;
};

// Runs Model 1 in both directions. fwd models target given source (one link
// per target token); rev models source given target (one link per source
// token).
void model1_align(const std::vector<RawPair>& bitext, int iterations,
                  std::vector<DirAlignment>& fwd,
                  std::vector<DirAlignment>& rev);

// Directional alignment file: one line per pair, space-separated "i-j:p"
// triples, 0-based source index i, target index j, posterior p.
void write_alignments(std::ostream& out,
                      const std::vector<DirAlignment>& alignments);
void save_alignments(const std::string& path,
                     const std::vector<DirAlignment>& alignments);
std::vector<DirAlignment> parse_alignments(std::istream& in);
std::vector<DirAlignment> load_alignments(const std::string& path);

// Keeps (i,j) iff present in both directional sets and both posteriors are
// >= alpha. src_len/tgt_len bound-check the indices.
std::vector<AlignmentLink> intersect_and_filter(const DirAlignment& fwd,
                                                const DirAlignment& rev,
                                                double alpha, int src_len,
                                                int tgt_len);

}  // namespace mt

#endif
