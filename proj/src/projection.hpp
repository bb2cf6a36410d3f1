#ifndef MORPHTAG_PROJECTION_HPP
#define MORPHTAG_PROJECTION_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "model1.hpp"
#include "tag.hpp"

namespace mt {

enum class ConstraintMode { kType, kTypeAndToken, kUnambiguousType };

struct ProjectionConfig {
  double alpha = 0.8;  // alignment posterior threshold
  double beta = 0.3;   // type distribution threshold
  long long max_train_tokens = 2000000;
  ConstraintMode constraint_mode = ConstraintMode::kType;
};

// A word-aligned sentence pair; links are post-filter (intersected and
// thresholded).
struct SentencePair {
  Sentence source;  // tagged
  Sentence target;
  std::vector<AlignmentLink> links;
};

struct TagDistribution {
  std::map<std::string, long long> counts;  // canonical tag -> count
  long long total = 0;
};

// word type -> permitted tag set (indices into the inventory). An entry may
// be empty (flat distribution); a missing entry means the type was never
// aligned.
struct TypeDictionary {
  TagInventory inventory;
  std::unordered_map<std::string, std::vector<int>> entries;

  const std::vector<int>* entry(const std::string& word) const {
    auto it = entries.find(word);
    return it == entries.end() ? nullptr : &it->second;
  }
};

// Per-token permitted tag sets for one sentence. An empty `allowed` vector
// at a position means the full inventory. `is_example` is false for tokens
// that carry no training signal (unconstrained, or non-examples in
// unambiguous mode).
struct ConstraintLattice {
  Sentence sentence;
  std::vector<std::vector<int>> allowed;
  std::vector<char> is_example;
};

// Expected source-side tag of a token: predicted if set, else gold.
const MorphTag* source_tag(const Token& tok);

// Keeps at most one link per target token: max min(p_fwd, p_rev), ties to
// the smaller source index.
std::vector<AlignmentLink> select_links(const std::vector<AlignmentLink>& links);

// Counts source tags aligned to each target word type, over all pairs.
// Pairs must carry post-filter links and tagged source tokens.
std::map<std::string, TagDistribution> accumulate_type_distributions(
    const std::vector<SentencePair>& pairs);

// entry(w) = tags with relative frequency >= beta; may come out empty.
TypeDictionary build_type_dictionary(
    const std::map<std::string, TagDistribution>& distributions, double beta,
    const TagInventory& inventory);

// Keeps only the entries with exactly one tag.
TypeDictionary make_unambiguous(const TypeDictionary& dict);

// entry(w) = all gold tags observed for w in the gold corpus.
TypeDictionary build_oracle_dictionary(const Corpus& gold_corpus);

// Tag of the aligned source token (after select_links), or nullopt when the
// target token is unaligned.
std::optional<MorphTag> token_constraint(const SentencePair& pair,
                                         int tgt_index);

// The four-way combination rule for token and type constraints. A null
// dict_entry means no entry; an empty entry behaves as "all tags". Returns
// sorted tag indices; never empty.
std::vector<int> combine_constraints(const std::optional<MorphTag>& token_c,
                                     const std::vector<int>* dict_entry,
                                     const TagInventory& inventory);

// Builds lattices for the target sentences, truncating at the whole-sentence
// token budget. In unambiguous mode the dictionary is reduced to singleton
// entries first.
std::vector<ConstraintLattice> build_lattice_corpus(
    const std::vector<SentencePair>& pairs, const TypeDictionary& dictionary,
    const ProjectionConfig& config);

// Applies a dictionary to an already-tagged or raw corpus: each token whose
// type has a non-empty entry gets that entry, others are unconstrained.
// With require_singleton, only singleton entries produce examples. Used for
// the oracle and gold training paths.
std::vector<ConstraintLattice> lattices_from_dictionary(
    const Corpus& corpus, const TypeDictionary& dictionary,
    long long max_train_tokens);

// Singleton lattices from gold tags (supervised training).
std::vector<ConstraintLattice> lattices_from_gold(const Corpus& corpus,
                                                  const TagInventory& inventory,
                                                  long long max_train_tokens);

// Dictionary file: one line per type, "word<TAB>tag1<TAB>tag2..."; empty
// entries serialize with zero tags. Types are written sorted.
void write_dictionary(std::ostream& out, const TypeDictionary& dict);
void save_dictionary(const std::string& path, const TypeDictionary& dict);
TypeDictionary parse_dictionary(std::istream& in);
TypeDictionary load_dictionary(const std::string& path);

// Lattice corpus file: a header with the tag inventory, then one token per
// line with its allowed set ("*" = unconstrained), blank line between
// sentences.
void write_lattices(std::ostream& out, const TagInventory& inventory,
                    const std::vector<ConstraintLattice>& lattices);
void save_lattices(const std::string& path, const TagInventory& inventory,
                   const std::vector<ConstraintLattice>& lattices);
std::pair<TagInventory, std::vector<ConstraintLattice>> parse_lattices(
    std::istream& in);
std::pair<TagInventory, std::vector<ConstraintLattice>> load_lattices(
    const std::string& path);

}  // namespace mt

#endif
