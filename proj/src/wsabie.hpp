#ifndef MORPHTAG_WSABIE_HPP
#define MORPHTAG_WSABIE_HPP

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "corpus.hpp"
#include "features.hpp"
#include "projection.hpp"
#include "tag.hpp"

namespace mt {

struct WsabieConfig {
  int joint_dim = 50;          // D
  double learning_rate = 0.01;
  double margin = 0.1;
  int epochs = 25;
  double norm_cap = 1.0;       // C, column-norm constraint on V and W
  uint64_t seed = 1;
  bool uniform_rank_weight = false;  // ablation: eta = 1
  int embedding_dim = 64;
  WsabieFeatureConfig features;
};

struct WarpStepReport {
  bool updated = false;
  int positive = -1;
  int negative = -1;
  int draws = 0;
  double rank_weight = 0.0;
};

// Phi(floor(num_negatives / draws)) with Phi(k) = sum_{i=1..k} 1/i.
double warp_rank_weight(int num_negatives, int draws);

// Joint-embedding ranking tagger: f_t(x) = W_t . (V x).
class WsabieModel {
 public:
  WsabieModel() = default;

  // Uniform init in [-1/sqrt(D), 1/sqrt(D)], seeded from config.seed.
  static WsabieModel init(const TagInventory& inventory,
                          FeatureVocabulary vocab, const WsabieConfig& config);

  const TagInventory& inventory() const { return inventory_; }
  const FeatureVocabulary& vocab() const { return vocab_; }
  const WsabieConfig& config() const { return config_; }
  int num_tags() const { return inventory_.size(); }
  int dense_dim() const { return dense_dim_; }
  int input_dim() const { return dense_dim_ + vocab_.size(); }

  Eigen::MatrixXd& input_matrix() { return v_; }
  const Eigen::MatrixXd& input_matrix() const { return v_; }
  Eigen::MatrixXd& tag_matrix() { return w_; }
  const Eigen::MatrixXd& tag_matrix() const { return w_; }

  Eigen::VectorXd input_map(const FeatureVector& x) const;  // V x
  Eigen::VectorXd score_tags(const FeatureVector& x) const;

  // One WARP update: sample a positive from `allowed`, sample negatives
  // with replacement until one violates the margin (at most
  // L - |allowed| draws), take a rank-weighted hinge step and project the
  // touched columns back to the norm cap. No violator, no update.
  WarpStepReport warp_step(const FeatureVector& x,
                           const std::vector<int>& allowed,
                           std::mt19937_64& rng);

  // Per-token argmax; ties break to the lowest tag index.
  std::vector<int> predict_indices(const Sentence& sentence,
                                   const EmbeddingTable& embeddings,
                                   const ClusterMap& clusters) const;
  std::vector<MorphTag> predict(const Sentence& sentence,
                                const EmbeddingTable& embeddings,
                                const ClusterMap& clusters) const;

  // Feature extraction against the frozen vocabulary.
  FeatureVector features_for(const Sentence& sentence, int i,
                             const EmbeddingTable& embeddings,
                             const ClusterMap& clusters) const;

  // Max column norm over V and W (invariant: <= norm_cap + 1e-6).
  double max_column_norm() const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static WsabieModel load(std::istream& in);
  static WsabieModel load_file(const std::string& path);

 private:
  void project_column(Eigen::MatrixXd& m, int col);

  WsabieConfig config_;
  TagInventory inventory_;
  FeatureVocabulary vocab_;
  int dense_dim_ = 0;
  Eigen::MatrixXd v_;  // D x (dense_dim + vocab size)
  Eigen::MatrixXd w_;  // D x L
};

struct WsabieTrainReport {
  size_t trainable_tokens = 0;
  size_t skipped_tokens = 0;  // unconstrained / full-inventory tokens
  size_t updates = 0;
};

// Trains on the constrained tokens of the lattices: epochs passes in a
// seeded-shuffled token order. Tokens whose allowed set is the full
// inventory carry no ranking signal and are skipped. Throws when nothing
// is trainable.
WsabieModel wsabie_train(const std::vector<ConstraintLattice>& lattices,
                         const TagInventory& inventory,
                         const EmbeddingTable& embeddings,
                         const ClusterMap& clusters,
                         const WsabieConfig& config,
                         WsabieTrainReport* report = nullptr);

}  // namespace mt

#endif
