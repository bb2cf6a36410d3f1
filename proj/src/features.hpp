#ifndef MORPHTAG_FEATURES_HPP
#define MORPHTAG_FEATURES_HPP

#include <iosfwd>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "tag.hpp"

namespace mt {

// Pre-trained word vectors, looked up by surface form. Unknown words get
// the zero vector.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(int dim = 64) : dim_(dim) {}

  int dim() const { return dim_; }
  size_t size() const { return vectors_.size(); }
  size_t duplicate_count() const { return duplicates_; }

  // nullptr for unknown words (callers treat that as the zero vector).
  const std::vector<double>* lookup(const std::string& word) const;

  void insert(const std::string& word, std::vector<double> vec);

  // Text format: "word v1 v2 ... vdim" per line; an optional first line
  // "count dim". Inconsistent dimensionality is an error; duplicate words
  // keep the last vector and are counted.
  static EmbeddingTable parse(std::istream& in);
  static EmbeddingTable load(const std::string& path);

 private:
  int dim_;
  size_t duplicates_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// Word -> cluster id in 0..K-1 for the most frequent words; everything else
// maps to the reserved UNK cluster with id K.
class ClusterMap {
 public:
  explicit ClusterMap(int k = 256) : k_(k) {}

  int k() const { return k_; }
  int unk_id() const { return k_; }
  size_t size() const { return assignment_.size(); }

  int cluster_of(const std::string& word) const;
  void assign(const std::string& word, int cluster);
  const std::unordered_map<std::string, int>& assignment() const {
    return assignment_;
  }

  // Cluster file: one "word<TAB>cluster_id" per line.
  void write(std::ostream& out) const;
  void save(const std::string& path) const;
  static ClusterMap parse(std::istream& in);
  static ClusterMap load(const std::string& path);

 private:
  int k_;
  std::unordered_map<std::string, int> assignment_;
};

// Greedy exchange clustering over class bigrams. Only the max_words most
// frequent types are assigned (and movable); iterates until a full pass
// makes no move or max_iterations passes are done. Deterministic.
// objective_history, when given, records the exchange objective before any
// move and after every accepted move.
ClusterMap induce_clusters(const Corpus& raw_corpus, int k,
                           int max_words = 100000, int max_iterations = 20,
                           std::vector<double>* objective_history = nullptr);

// Class-bigram log-likelihood of the corpus under a cluster assignment:
// sum N(c1,c2) log p(c2|c1) + sum N(c,w) log p(w|c). Used as the exchange
// objective; exposed for tests.
double clustering_objective(const Corpus& raw_corpus,
                            const ClusterMap& clusters);

// Dense id map over sparse feature strings; after freezing, unseen features
// are dropped instead of growing the vocabulary.
class FeatureVocabulary {
 public:
  // Returns the id, inserting when not frozen; -1 for unseen after freeze.
  int add(const std::string& feature);
  int lookup(const std::string& feature) const;
  int size() const { return static_cast<int>(names_.size()); }
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> names_;
  bool frozen_ = false;
};

// Input representation for one token: concatenated context embeddings plus
// indexed sparse features.
struct FeatureVector {
  std::vector<double> dense;
  std::vector<int> sparse;  // sorted valid ids
  bool dense_nonzero = false;
};

struct WsabieFeatureConfig {
  int context = 5;         // embedding window on either side
  int cluster_window = 1;  // cluster features at i-1..i+1
};

// Feature extraction for the ranking tagger. vocab grows unless frozen.
FeatureVector wsabie_features(const Sentence& sentence, int i,
                              const EmbeddingTable& embeddings,
                              const ClusterMap& clusters,
                              FeatureVocabulary& vocab,
                              const WsabieFeatureConfig& config = {});

// Same extraction against a frozen vocabulary (unseen features dropped).
FeatureVector wsabie_features(const Sentence& sentence, int i,
                              const EmbeddingTable& embeddings,
                              const ClusterMap& clusters,
                              const FeatureVocabulary& vocab,
                              const WsabieFeatureConfig& config = {});

// The sparse feature strings only (affixes, clusters, boundary indicators).
std::vector<std::string> wsabie_sparse_features(
    const Sentence& sentence, int i, const ClusterMap& clusters,
    const WsabieFeatureConfig& config = {});

// Word-level emission predicates for the HMM: identity, suffixes 1..3,
// punctuation / digit / capitalization flags, cluster id. The shape flags
// can be turned off for a strict feature set.
std::vector<std::string> hmm_word_predicates(const std::string& word,
                                             const ClusterMap& clusters,
                                             bool shape_flags = true);

// Emission features conjoined with the tag, as feature strings.
std::set<std::string> hmm_emission_features(const std::string& word,
                                            const MorphTag& tag,
                                            const ClusterMap& clusters,
                                            bool shape_flags = true);

bool is_punctuation(const std::string& word);
bool has_digit(const std::string& word);
bool is_capitalized(const std::string& word);

}  // namespace mt

#endif
