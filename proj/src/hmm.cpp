#include "hmm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "io_util.hpp"
#include "lbfgs.hpp"

namespace mt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const char* const kUnkKey = "<unk>";

double logsumexp(const std::vector<double>& xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<int> materialize(const std::vector<int>& allowed, int num_tags) {
  if (!allowed.empty()) return allowed;
  std::vector<int> all(num_tags);
  for (int t = 0; t < num_tags; ++t) all[t] = t;
  return all;
}

}  // namespace

std::string unk_signature(const std::string& word) {
  int len = static_cast<int>(word.size());
  std::string suffix = word.substr(len - std::min(3, len));
  std::string sig = "sig:" + suffix + ":";
  sig += has_digit(word) ? '1' : '0';
  sig += is_capitalized(word) ? '1' : '0';
  sig += is_punctuation(word) ? '1' : '0';
  return sig;
}

FeatureHmm FeatureHmm::build(const std::vector<ConstraintLattice>& lattices,
                             const TagInventory& inventory,
                             const ClusterMap& clusters,
                             const HmmConfig& config) {
  FeatureHmm hmm;
  hmm.config_ = config;
  hmm.inventory_ = inventory;

  std::unordered_map<std::string, long long> counts;
  std::vector<const std::string*> first_seen;
  for (const auto& lat : lattices)
    for (const auto& tok : lat.sentence.tokens) {
      auto [it, fresh] = counts.emplace(tok.surface, 0);
      if (fresh) first_seen.push_back(&it->first);
      it->second++;
    }

  auto add_support = [&](const std::string& key, bool is_signature,
                         std::vector<std::string> preds) {
    if (hmm.support_index_.count(key)) return;
    int idx = static_cast<int>(hmm.support_.size());
    hmm.support_.push_back(key);
    hmm.support_is_signature_.push_back(is_signature);
    hmm.support_index_.emplace(key, idx);
    std::vector<int> ids;
    for (const auto& p : preds) ids.push_back(hmm.predicates_.add(p));
    std::sort(ids.begin(), ids.end());
    hmm.support_preds_.push_back(std::move(ids));
  };

  for (const std::string* w : first_seen) {
    if (counts[*w] > config.rare_threshold) {
      add_support(*w, false,
                  hmm_word_predicates(*w, clusters, config.shape_flags));
    } else {
      std::string sig = unk_signature(*w);
      std::vector<std::string> preds;
      preds.push_back("w=" + sig);
      // Suffix and shape predicates are shared with unseen test words that
      // map to the same signature.
      int wlen = static_cast<int>(w->size());
      std::string suffix = w->substr(wlen - std::min(3, wlen));
      int len = static_cast<int>(suffix.size());
      for (int n = 1; n <= len; ++n)
        preds.push_back("s" + std::to_string(n) + "=" +
                        suffix.substr(len - n));
      if (is_punctuation(*w)) preds.push_back("punct");
      if (config.shape_flags) {
        if (has_digit(*w)) preds.push_back("digit");
        if (is_capitalized(*w)) preds.push_back("cap");
      }
      add_support(sig, true, std::move(preds));
    }
  }
  add_support(kUnkKey, true, {std::string("w=") + kUnkKey});
  hmm.unk_index_ = hmm.support_index_.at(kUnkKey);
  hmm.predicates_.freeze();

  for (int t = 0; t < inventory.size(); ++t) {
    const std::string& pos = inventory.tag_at(t).pos();
    auto it = std::find(hmm.pos_names_.begin(), hmm.pos_names_.end(), pos);
    if (it == hmm.pos_names_.end()) {
      hmm.tag_pos_.push_back(static_cast<int>(hmm.pos_names_.size()));
      hmm.pos_names_.push_back(pos);
    } else {
      hmm.tag_pos_.push_back(
          static_cast<int>(it - hmm.pos_names_.begin()));
    }
  }

  hmm.theta_ = Eigen::VectorXd::Zero(hmm.num_parameters());
  return hmm;
}

int FeatureHmm::num_parameters() const {
  int l = num_tags();
  int n = l * predicates_.size() + (l + 1) * l;
  if (config_.pos_pair_feature) {
    int p0 = static_cast<int>(pos_names_.size());
    n += (p0 + 1) * p0;
  }
  return n;
}

int FeatureHmm::support_index(const std::string& word) const {
  auto it = support_index_.find(word);
  if (it != support_index_.end() && !support_is_signature_[it->second])
    return it->second;
  it = support_index_.find(unk_signature(word));
  if (it != support_index_.end()) return it->second;
  return unk_index_;
}

double FeatureHmm::emit_score(int tag, int support) const {
  const int p = predicates_.size();
  double score = 0.0;
  for (int pred : support_preds_[support])
    score += theta_[emit_offset() + tag * p + pred];
  return score;
}

double FeatureHmm::trans_score(int prev, int tag) const {
  double score = theta_[pair_offset() + prev * num_tags() + tag];
  if (config_.pos_pair_feature) {
    int p0 = static_cast<int>(pos_names_.size());
    int prev_pos = prev == num_tags() ? p0 : tag_pos_[prev];
    score += theta_[pos_offset() + prev_pos * p0 + tag_pos_[tag]];
  }
  return score;
}

FeatureHmm::LogTables FeatureHmm::compute_distributions() const {
  const int l = num_tags();
  const int s = support_size();
  LogTables tables;
  tables.emit.resize(l, s);
  for (int t = 0; t < l; ++t) {
    double m = kNegInf;
    for (int w = 0; w < s; ++w) {
      tables.emit(t, w) = emit_score(t, w);
      m = std::max(m, tables.emit(t, w));
    }
    double sum = 0.0;
    for (int w = 0; w < s; ++w) sum += std::exp(tables.emit(t, w) - m);
    double lz = m + std::log(sum);
    for (int w = 0; w < s; ++w) tables.emit(t, w) -= lz;
  }
  tables.trans.resize(l + 1, l);
  for (int prev = 0; prev <= l; ++prev) {
    double m = kNegInf;
    for (int t = 0; t < l; ++t) {
      tables.trans(prev, t) = trans_score(prev, t);
      m = std::max(m, tables.trans(prev, t));
    }
    double sum = 0.0;
    for (int t = 0; t < l; ++t) sum += std::exp(tables.trans(prev, t) - m);
    double lz = m + std::log(sum);
    for (int t = 0; t < l; ++t) tables.trans(prev, t) -= lz;
  }
  return tables;
}

double FeatureHmm::constrained_log_marginal(
    const LogTables& tables, const ConstraintLattice& lattice,
    Eigen::MatrixXd* emit_counts, Eigen::MatrixXd* trans_counts) const {
  const int l = num_tags();
  const int n = static_cast<int>(lattice.sentence.tokens.size());
  if (n == 0) return kNegInf;

  std::vector<std::vector<int>> allowed(n);
  std::vector<int> word(n);
  for (int i = 0; i < n; ++i) {
    allowed[i] = materialize(lattice.allowed[i], l);
    word[i] = support_index(lattice.sentence.tokens[i].surface);
  }

  std::vector<std::vector<double>> alpha(n);
  for (int i = 0; i < n; ++i) alpha[i].assign(allowed[i].size(), kNegInf);
  for (size_t a = 0; a < allowed[0].size(); ++a) {
    int t = allowed[0][a];
    alpha[0][a] = tables.trans(l, t) + tables.emit(t, word[0]);
  }
  std::vector<double> tmp;
  for (int i = 1; i < n; ++i) {
    for (size_t b = 0; b < allowed[i].size(); ++b) {
      int t2 = allowed[i][b];
      tmp.clear();
      for (size_t a = 0; a < allowed[i - 1].size(); ++a)
        tmp.push_back(alpha[i - 1][a] +
                      tables.trans(allowed[i - 1][a], t2));
      alpha[i][b] = logsumexp(tmp) + tables.emit(t2, word[i]);
    }
  }
  double log_z = logsumexp(alpha[n - 1]);
  if (!std::isfinite(log_z)) return kNegInf;
  if (!emit_counts && !trans_counts) return log_z;

  std::vector<std::vector<double>> beta(n);
  for (int i = 0; i < n; ++i) beta[i].assign(allowed[i].size(), 0.0);
  for (int i = n - 2; i >= 0; --i) {
    for (size_t a = 0; a < allowed[i].size(); ++a) {
      int t1 = allowed[i][a];
      tmp.clear();
      for (size_t b = 0; b < allowed[i + 1].size(); ++b) {
        int t2 = allowed[i + 1][b];
        tmp.push_back(tables.trans(t1, t2) + tables.emit(t2, word[i + 1]) +
                      beta[i + 1][b]);
      }
      beta[i][a] = logsumexp(tmp);
    }
  }

  if (emit_counts) {
    for (int i = 0; i < n; ++i)
      for (size_t a = 0; a < allowed[i].size(); ++a) {
        double g = std::exp(alpha[i][a] + beta[i][a] - log_z);
        (*emit_counts)(allowed[i][a], word[i]) += g;
      }
  }
  if (trans_counts) {
    for (size_t a = 0; a < allowed[0].size(); ++a)
      (*trans_counts)(l, allowed[0][a]) +=
          std::exp(alpha[0][a] + beta[0][a] - log_z);
    for (int i = 1; i < n; ++i)
      for (size_t a = 0; a < allowed[i - 1].size(); ++a) {
        int t1 = allowed[i - 1][a];
        for (size_t b = 0; b < allowed[i].size(); ++b) {
          int t2 = allowed[i][b];
          double xi = std::exp(alpha[i - 1][a] + tables.trans(t1, t2) +
                               tables.emit(t2, word[i]) + beta[i][b] -
                               log_z);
          (*trans_counts)(t1, t2) += xi;
        }
      }
  }
  return log_z;
}

double FeatureHmm::objective_and_gradient(
    const std::vector<ConstraintLattice>& lattices, Eigen::VectorXd* grad,
    size_t* skipped) const {
  const int l = num_tags();
  const int s = support_size();
  const int p = predicates_.size();
  LogTables tables = compute_distributions();

  Eigen::MatrixXd emit_counts = Eigen::MatrixXd::Zero(l, s);
  Eigen::MatrixXd trans_counts = Eigen::MatrixXd::Zero(l + 1, l);
  double ll = 0.0;
  size_t n_skipped = 0;
  for (const auto& lat : lattices) {
    double lm = constrained_log_marginal(
        tables, lat, grad ? &emit_counts : nullptr,
        grad ? &trans_counts : nullptr);
    if (!std::isfinite(lm)) {
      n_skipped++;
      continue;
    }
    ll += lm;
  }
  if (skipped) *skipped = n_skipped;

  double value =
      ll - 0.5 * config_.l2_strength * theta_.squaredNorm();
  if (!std::isfinite(value))
    throw DataError("HMM objective is non-finite");
  if (!grad) return value;

  grad->setZero(num_parameters());
  // Emissions: c(t,w) (f - expected f) per tag row.
  for (int t = 0; t < l; ++t) {
    double total = emit_counts.row(t).sum();
    for (int w = 0; w < s; ++w) {
      double weight =
          emit_counts(t, w) - total * std::exp(tables.emit(t, w));
      if (weight == 0.0) continue;
      for (int pred : support_preds_[w])
        (*grad)[emit_offset() + t * p + pred] += weight;
    }
  }
  // Transitions: pair and POS-pair features are both active per cell.
  const int p0 = static_cast<int>(pos_names_.size());
  for (int prev = 0; prev <= l; ++prev) {
    double total = trans_counts.row(prev).sum();
    for (int t = 0; t < l; ++t) {
      double d =
          trans_counts(prev, t) - total * std::exp(tables.trans(prev, t));
      (*grad)[pair_offset() + prev * l + t] += d;
      if (config_.pos_pair_feature) {
        int prev_pos = prev == l ? p0 : tag_pos_[prev];
        (*grad)[pos_offset() + prev_pos * p0 + tag_pos_[t]] += d;
      }
    }
  }
  *grad -= config_.l2_strength * theta_;
  return value;
}

FeatureHmm::TrainReport FeatureHmm::train(
    const std::vector<ConstraintLattice>& lattices) {
  TrainReport report;
  if (config_.max_iterations <= 0) {
    // Zero budget: keep the uniform (zero-weight) model.
    report.objective = objective_and_gradient(lattices, nullptr,
                                              &report.skipped_sentences);
    return report;
  }
  LbfgsOptions opt;
  opt.memory = config_.lbfgs_memory;
  opt.max_iterations = config_.max_iterations;
  opt.tol = config_.convergence_tol;
  auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    theta_ = x;
    double v = objective_and_gradient(lattices, &g, nullptr);
    g = -g;
    return -v;
  };
  LbfgsResult res = lbfgs_minimize(objective, theta_, opt);
  theta_ = res.x;
  report.objective = -res.value;
  report.iterations = res.iterations;
  report.converged = res.converged;
  report.line_search_warning = res.line_search_failed;
  objective_and_gradient(lattices, nullptr, &report.skipped_sentences);
  return report;
}

std::vector<int> FeatureHmm::viterbi_on(
    const Sentence& sentence,
    const std::vector<std::vector<int>>* allowed_in) const {
  const int l = num_tags();
  const int n = static_cast<int>(sentence.tokens.size());
  std::vector<int> out;
  if (n == 0) return out;
  LogTables tables = compute_distributions();

  std::vector<std::vector<int>> allowed(n);
  std::vector<int> word(n);
  for (int i = 0; i < n; ++i) {
    allowed[i] = allowed_in ? materialize((*allowed_in)[i], l)
                            : materialize({}, l);
    word[i] = support_index(sentence.tokens[i].surface);
  }

  // Best continuation score from position i when the tag at i is fixed;
  // selecting forward over these breaks ties toward the lexicographically
  // smallest sequence.
  std::vector<std::vector<double>> cont(n);
  cont[n - 1].assign(allowed[n - 1].size(), 0.0);
  for (int i = n - 2; i >= 0; --i) {
    cont[i].assign(allowed[i].size(), kNegInf);
    for (size_t a = 0; a < allowed[i].size(); ++a) {
      int t1 = allowed[i][a];
      double best = kNegInf;
      for (size_t b = 0; b < allowed[i + 1].size(); ++b) {
        int t2 = allowed[i + 1][b];
        double v = tables.trans(t1, t2) + tables.emit(t2, word[i + 1]) +
                   cont[i + 1][b];
        if (v > best) best = v;
      }
      cont[i][a] = best;
    }
  }

  int prev = l;  // START
  for (int i = 0; i < n; ++i) {
    double best = kNegInf;
    int best_b = -1;
    for (size_t b = 0; b < allowed[i].size(); ++b) {
      int t = allowed[i][b];
      double v = tables.trans(prev, t) + tables.emit(t, word[i]) + cont[i][b];
      if (v > best) {  // strict: first (smallest index) wins ties
        best = v;
        best_b = static_cast<int>(b);
      }
    }
    prev = allowed[i][best_b];
    out.push_back(prev);
  }
  return out;
}

std::vector<int> FeatureHmm::viterbi_indices(const Sentence& sentence) const {
  return viterbi_on(sentence, nullptr);
}

std::vector<MorphTag> FeatureHmm::viterbi(const Sentence& sentence) const {
  std::vector<MorphTag> out;
  for (int t : viterbi_indices(sentence)) out.push_back(inventory_.tag_at(t));
  return out;
}

std::vector<int> FeatureHmm::viterbi_indices_constrained(
    const ConstraintLattice& lattice) const {
  return viterbi_on(lattice.sentence, &lattice.allowed);
}

namespace {
constexpr uint32_t kHmmMagic = 0x4d48544d;  // "MTHM"
constexpr uint32_t kHmmVersion = 1;
}  // namespace

void FeatureHmm::save(std::ostream& out) const {
  write_u32(out, kHmmMagic);
  write_u32(out, kHmmVersion);
  write_f64(out, config_.l2_strength);
  write_u32(out, config_.lbfgs_memory);
  write_u32(out, config_.max_iterations);
  write_f64(out, config_.convergence_tol);
  write_u64(out, config_.rare_threshold);
  write_u32(out, config_.shape_flags ? 1 : 0);
  write_u32(out, config_.pos_pair_feature ? 1 : 0);

  write_u64(out, inventory_.size());
  for (const auto& tag : inventory_.tags()) write_str(out, tag.canonical());

  write_u64(out, support_.size());
  for (size_t i = 0; i < support_.size(); ++i) {
    write_str(out, support_[i]);
    write_u32(out, support_is_signature_[i] ? 1 : 0);
  }

  write_u64(out, predicates_.names().size());
  for (const auto& name : predicates_.names()) write_str(out, name);

  for (const auto& preds : support_preds_) {
    write_u64(out, preds.size());
    for (int p : preds) write_u32(out, p);
  }

  write_u64(out, pos_names_.size());
  for (const auto& name : pos_names_) write_str(out, name);
  for (int p : tag_pos_) write_u32(out, p);

  write_u64(out, theta_.size());
  for (Eigen::Index i = 0; i < theta_.size(); ++i) write_f64(out, theta_[i]);
}

void FeatureHmm::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path);
  save(out);
}

FeatureHmm FeatureHmm::load(std::istream& in) {
  if (read_u32(in) != kHmmMagic)
    throw DataError("not an HMM model file (bad magic)");
  if (read_u32(in) != kHmmVersion)
    throw DataError("unsupported HMM model version");
  FeatureHmm hmm;
  hmm.config_.l2_strength = read_f64(in);
  hmm.config_.lbfgs_memory = static_cast<int>(read_u32(in));
  hmm.config_.max_iterations = static_cast<int>(read_u32(in));
  hmm.config_.convergence_tol = read_f64(in);
  hmm.config_.rare_threshold = static_cast<long long>(read_u64(in));
  hmm.config_.shape_flags = read_u32(in) != 0;
  hmm.config_.pos_pair_feature = read_u32(in) != 0;

  uint64_t l = read_u64(in);
  for (uint64_t i = 0; i < l; ++i)
    hmm.inventory_.add(MorphTag::from_canonical(read_str(in)));

  uint64_t s = read_u64(in);
  for (uint64_t i = 0; i < s; ++i) {
    std::string key = read_str(in);
    hmm.support_is_signature_.push_back(read_u32(in) != 0);
    hmm.support_index_.emplace(key, static_cast<int>(i));
    hmm.support_.push_back(std::move(key));
  }
  hmm.unk_index_ = hmm.support_index_.at(kUnkKey);

  uint64_t np = read_u64(in);
  for (uint64_t i = 0; i < np; ++i) hmm.predicates_.add(read_str(in));
  hmm.predicates_.freeze();

  for (uint64_t i = 0; i < s; ++i) {
    uint64_t k = read_u64(in);
    std::vector<int> preds(k);
    for (uint64_t j = 0; j < k; ++j)
      preds[j] = static_cast<int>(read_u32(in));
    hmm.support_preds_.push_back(std::move(preds));
  }

  uint64_t p0 = read_u64(in);
  for (uint64_t i = 0; i < p0; ++i) hmm.pos_names_.push_back(read_str(in));
  for (uint64_t i = 0; i < l; ++i)
    hmm.tag_pos_.push_back(static_cast<int>(read_u32(in)));

  uint64_t nw = read_u64(in);
  hmm.theta_.resize(static_cast<Eigen::Index>(nw));
  for (uint64_t i = 0; i < nw; ++i) hmm.theta_[i] = read_f64(in);
  if (hmm.theta_.size() != hmm.num_parameters())
    throw DataError("HMM model file: weight count mismatch");
  return hmm;
}

FeatureHmm FeatureHmm::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  return load(in);
}

}  // namespace mt
