#ifndef MORPHTAG_HMM_HPP
#define MORPHTAG_HMM_HPP

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "features.hpp"
#include "projection.hpp"
#include "tag.hpp"

namespace mt {

struct HmmConfig {
  double l2_strength = 1.0;
  int lbfgs_memory = 10;
  int max_iterations = 100;
  double convergence_tol = 1e-5;
  long long rare_threshold = 1;  // forms with count <= this become signatures
  bool shape_flags = true;       // capital/digit emission flags
  bool pos_pair_feature = true;  // shared POS-pair transition feature
};

// Shape signature used as the emission-support surrogate for rare and
// unseen words: suffix up to 3 plus digit/capital/punctuation flags.
std::string unk_signature(const std::string& word);

// HMM with log-linear transition and emission distributions over a fixed
// emission support, trained by L-BFGS on the constrained marginal
// likelihood.
class FeatureHmm {
 public:
  // Probability tables in log space, rebuilt from the weights.
  struct LogTables {
    Eigen::MatrixXd emit;   // L x S
    Eigen::MatrixXd trans;  // (L+1) x L; row L is START
  };

  struct TrainReport {
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    bool line_search_warning = false;
    size_t skipped_sentences = 0;
  };

  FeatureHmm() = default;

  // Builds the emission support, predicates and feature layout from the
  // training lattices; weights start at zero (uniform model).
  static FeatureHmm build(const std::vector<ConstraintLattice>& lattices,
                          const TagInventory& inventory,
                          const ClusterMap& clusters, const HmmConfig& config);

  TrainReport train(const std::vector<ConstraintLattice>& lattices);

  const TagInventory& inventory() const { return inventory_; }
  const HmmConfig& config() const { return config_; }
  int num_tags() const { return inventory_.size(); }
  int support_size() const { return static_cast<int>(support_.size()); }
  int num_parameters() const;

  Eigen::VectorXd& weights() { return theta_; }
  const Eigen::VectorXd& weights() const { return theta_; }

  // Support index for a word: kept form, else its signature, else UNK.
  int support_index(const std::string& word) const;
  const std::string& support_key(int index) const { return support_[index]; }

  LogTables compute_distributions() const;

  // Log marginal of the allowed paths; -inf when every path is excluded.
  // When the count matrices are given, posterior expected emission counts
  // (L x S) and transition counts ((L+1) x L) are added into them.
  double constrained_log_marginal(const LogTables& tables,
                                  const ConstraintLattice& lattice,
                                  Eigen::MatrixXd* emit_counts = nullptr,
                                  Eigen::MatrixXd* trans_counts = nullptr) const;

  // Maximization objective: sum of log marginals minus (l2/2)||theta||^2.
  // Gradient has the same orientation. Sentences whose lattice admits no
  // path are skipped and counted.
  double objective_and_gradient(const std::vector<ConstraintLattice>& lattices,
                                Eigen::VectorXd* grad,
                                size_t* skipped = nullptr) const;

  // Argmax tag sequence over the full tag set; exact ties break toward the
  // lexicographically smallest index sequence.
  std::vector<int> viterbi_indices(const Sentence& sentence) const;
  std::vector<MorphTag> viterbi(const Sentence& sentence) const;

  // Same, restricted to a lattice (decode-time dictionary constraints).
  std::vector<int> viterbi_indices_constrained(
      const ConstraintLattice& lattice) const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static FeatureHmm load(std::istream& in);
  static FeatureHmm load_file(const std::string& path);

 private:
  std::vector<int> viterbi_on(const Sentence& sentence,
                              const std::vector<std::vector<int>>* allowed) const;

  double emit_score(int tag, int support) const;
  double trans_score(int prev, int tag) const;  // prev == L means START

  HmmConfig config_;
  TagInventory inventory_;
  std::vector<std::string> support_;       // kept forms and signature keys
  std::vector<char> support_is_signature_;
  std::unordered_map<std::string, int> support_index_;
  int unk_index_ = -1;

  FeatureVocabulary predicates_;
  std::vector<std::vector<int>> support_preds_;

  std::vector<std::string> pos_names_;  // distinct POS, first-occurrence
  std::vector<int> tag_pos_;            // tag index -> pos index

  // Layout: [emission L*P][pair (L+1)*L][pos (P0+1)*P0 when enabled].
  Eigen::VectorXd theta_;

  int emit_offset() const { return 0; }
  int pair_offset() const { return num_tags() * predicates_.size(); }
  int pos_offset() const {
    return pair_offset() + (num_tags() + 1) * num_tags();
  }
};

}  // namespace mt

#endif
