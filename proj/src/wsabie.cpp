#include "wsabie.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "io_util.hpp"

namespace mt {

namespace {

constexpr uint32_t kWsabieMagic = 0x5357544d;  // "MTWS"
constexpr uint32_t kWsabieVersion = 1;

// Uniform in [0,1): top 53 bits; deterministic across platforms.
double unit_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

uint64_t bounded(std::mt19937_64& rng, uint64_t n) { return rng() % n; }

}  // namespace

double warp_rank_weight(int num_negatives, int draws) {
  int rank = num_negatives / draws;
  double phi = 0.0;
  for (int i = 1; i <= rank; ++i) phi += 1.0 / static_cast<double>(i);
  return phi;
}

WsabieModel WsabieModel::init(const TagInventory& inventory,
                              FeatureVocabulary vocab,
                              const WsabieConfig& config) {
  WsabieModel model;
  model.config_ = config;
  model.inventory_ = inventory;
  model.vocab_ = std::move(vocab);
  model.vocab_.freeze();
  model.dense_dim_ =
      (2 * config.features.context + 1) * config.embedding_dim;

  const int d = model.input_dim();
  const int depth = config.joint_dim;
  const int l = inventory.size();
  model.v_.resize(depth, d);
  model.w_.resize(depth, l);
  std::mt19937_64 rng(config.seed);
  double scale = 1.0 / std::sqrt(static_cast<double>(depth));
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < depth; ++r)
      model.v_(r, c) = (2.0 * unit_real(rng) - 1.0) * scale;
  for (int c = 0; c < l; ++c)
    for (int r = 0; r < depth; ++r)
      model.w_(r, c) = (2.0 * unit_real(rng) - 1.0) * scale;
  return model;
}

Eigen::VectorXd WsabieModel::input_map(const FeatureVector& x) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(config_.joint_dim);
  if (x.dense_nonzero) {
    if (static_cast<int>(x.dense.size()) != dense_dim_)
      throw DataError("feature vector dense size mismatch");
    Eigen::Map<const Eigen::VectorXd> xd(x.dense.data(), dense_dim_);
    z.noalias() += v_.leftCols(dense_dim_) * xd;
  }
  for (int s : x.sparse) {
    if (s < 0 || s >= vocab_.size())
      throw DataError("sparse feature id out of range");
    z += v_.col(dense_dim_ + s);
  }
  return z;
}

Eigen::VectorXd WsabieModel::score_tags(const FeatureVector& x) const {
  return w_.transpose() * input_map(x);
}

void WsabieModel::project_column(Eigen::MatrixXd& m, int col) {
  double nrm = m.col(col).norm();
  if (nrm > config_.norm_cap) m.col(col) *= config_.norm_cap / nrm;
}

WarpStepReport WsabieModel::warp_step(const FeatureVector& x,
                                      const std::vector<int>& allowed,
                                      std::mt19937_64& rng) {
  WarpStepReport report;
  const int l = num_tags();
  if (allowed.empty()) throw DataError("warp_step: empty allowed set");
  const int n_neg = l - static_cast<int>(allowed.size());
  if (n_neg <= 0) return report;  // full inventory: no ranking signal

  Eigen::VectorXd z = input_map(x);
  Eigen::VectorXd f = w_.transpose() * z;

  int y = allowed[bounded(rng, allowed.size())];
  report.positive = y;

  // `allowed` is sorted; maps a complement rank to a tag index.
  auto complement_tag = [&](int r) {
    int tag = r;
    for (int a : allowed) {
      if (a <= tag)
        tag++;
      else
        break;
    }
    return tag;
  };

  int violator = -1;
  for (int draw = 1; draw <= n_neg; ++draw) {
    int neg = complement_tag(static_cast<int>(bounded(rng, n_neg)));
    report.draws = draw;
    if (f[neg] > f[y] - config_.margin) {
      violator = neg;
      break;
    }
  }
  if (violator < 0) return report;

  report.updated = true;
  report.negative = violator;
  report.rank_weight = config_.uniform_rank_weight
                           ? 1.0
                           : warp_rank_weight(n_neg, report.draws);
  double step = config_.learning_rate * report.rank_weight;

  Eigen::VectorXd u = w_.col(y) - w_.col(violator);  // pre-update values
  w_.col(y) += step * z;
  w_.col(violator) -= step * z;
  project_column(w_, y);
  project_column(w_, violator);

  if (x.dense_nonzero) {
    Eigen::Map<const Eigen::VectorXd> xd(x.dense.data(), dense_dim_);
    v_.leftCols(dense_dim_).noalias() += step * u * xd.transpose();
    for (int c = 0; c < dense_dim_; ++c) project_column(v_, c);
  }
  for (int s : x.sparse) {
    v_.col(dense_dim_ + s) += step * u;
    project_column(v_, dense_dim_ + s);
  }
  return report;
}

FeatureVector WsabieModel::features_for(const Sentence& sentence, int i,
                                        const EmbeddingTable& embeddings,
                                        const ClusterMap& clusters) const {
  if (embeddings.dim() != config_.embedding_dim)
    throw DataError("embedding dimensionality " +
                    std::to_string(embeddings.dim()) +
                    " does not match the model (" +
                    std::to_string(config_.embedding_dim) + ")");
  return wsabie_features(sentence, i, embeddings, clusters,
                         static_cast<const FeatureVocabulary&>(vocab_),
                         config_.features);
}

std::vector<int> WsabieModel::predict_indices(
    const Sentence& sentence, const EmbeddingTable& embeddings,
    const ClusterMap& clusters) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(sentence.tokens.size()); ++i) {
    Eigen::VectorXd f =
        score_tags(features_for(sentence, i, embeddings, clusters));
    int best = 0;
    for (int t = 1; t < num_tags(); ++t)
      if (f[t] > f[best]) best = t;
    out.push_back(best);
  }
  return out;
}

std::vector<MorphTag> WsabieModel::predict(const Sentence& sentence,
                                           const EmbeddingTable& embeddings,
                                           const ClusterMap& clusters) const {
  std::vector<MorphTag> out;
  for (int t : predict_indices(sentence, embeddings, clusters))
    out.push_back(inventory_.tag_at(t));
  return out;
}

double WsabieModel::max_column_norm() const {
  double m = 0.0;
  for (Eigen::Index c = 0; c < v_.cols(); ++c)
    m = std::max(m, v_.col(c).norm());
  for (Eigen::Index c = 0; c < w_.cols(); ++c)
    m = std::max(m, w_.col(c).norm());
  return m;
}

void WsabieModel::save(std::ostream& out) const {
  write_u32(out, kWsabieMagic);
  write_u32(out, kWsabieVersion);
  write_u32(out, config_.joint_dim);
  write_f64(out, config_.learning_rate);
  write_f64(out, config_.margin);
  write_u32(out, config_.epochs);
  write_f64(out, config_.norm_cap);
  write_u64(out, config_.seed);
  write_u32(out, config_.uniform_rank_weight ? 1 : 0);
  write_u32(out, config_.embedding_dim);
  write_u32(out, config_.features.context);
  write_u32(out, config_.features.cluster_window);

  write_u64(out, inventory_.size());
  for (const auto& tag : inventory_.tags()) write_str(out, tag.canonical());
  write_u64(out, vocab_.names().size());
  for (const auto& name : vocab_.names()) write_str(out, name);

  write_u64(out, v_.rows());
  write_u64(out, v_.cols());
  for (Eigen::Index c = 0; c < v_.cols(); ++c)
    for (Eigen::Index r = 0; r < v_.rows(); ++r) write_f64(out, v_(r, c));
  write_u64(out, w_.rows());
  write_u64(out, w_.cols());
  for (Eigen::Index c = 0; c < w_.cols(); ++c)
    for (Eigen::Index r = 0; r < w_.rows(); ++r) write_f64(out, w_(r, c));
}

void WsabieModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path);
  save(out);
}

WsabieModel WsabieModel::load(std::istream& in) {
  if (read_u32(in) != kWsabieMagic)
    throw DataError("not a Wsabie model file (bad magic)");
  if (read_u32(in) != kWsabieVersion)
    throw DataError("unsupported Wsabie model version");
  WsabieModel model;
  model.config_.joint_dim = static_cast<int>(read_u32(in));
  model.config_.learning_rate = read_f64(in);
  model.config_.margin = read_f64(in);
  model.config_.epochs = static_cast<int>(read_u32(in));
  model.config_.norm_cap = read_f64(in);
  model.config_.seed = read_u64(in);
  model.config_.uniform_rank_weight = read_u32(in) != 0;
  model.config_.embedding_dim = static_cast<int>(read_u32(in));
  model.config_.features.context = static_cast<int>(read_u32(in));
  model.config_.features.cluster_window = static_cast<int>(read_u32(in));

  uint64_t l = read_u64(in);
  for (uint64_t i = 0; i < l; ++i)
    model.inventory_.add(MorphTag::from_canonical(read_str(in)));
  uint64_t nf = read_u64(in);
  for (uint64_t i = 0; i < nf; ++i) model.vocab_.add(read_str(in));
  model.vocab_.freeze();
  model.dense_dim_ = (2 * model.config_.features.context + 1) *
                     model.config_.embedding_dim;

  uint64_t rows = read_u64(in);
  uint64_t cols = read_u64(in);
  model.v_.resize(static_cast<Eigen::Index>(rows),
                  static_cast<Eigen::Index>(cols));
  for (uint64_t c = 0; c < cols; ++c)
    for (uint64_t r = 0; r < rows; ++r) model.v_(r, c) = read_f64(in);
  rows = read_u64(in);
  cols = read_u64(in);
  model.w_.resize(static_cast<Eigen::Index>(rows),
                  static_cast<Eigen::Index>(cols));
  for (uint64_t c = 0; c < cols; ++c)
    for (uint64_t r = 0; r < rows; ++r) model.w_(r, c) = read_f64(in);
  if (model.v_.cols() != model.input_dim() ||
      model.w_.cols() != model.num_tags())
    throw DataError("Wsabie model file: matrix shape mismatch");
  return model;
}

WsabieModel WsabieModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  return load(in);
}

WsabieModel wsabie_train(const std::vector<ConstraintLattice>& lattices,
                         const TagInventory& inventory,
                         const EmbeddingTable& embeddings,
                         const ClusterMap& clusters,
                         const WsabieConfig& config,
                         WsabieTrainReport* report) {
  const int l = inventory.size();
  FeatureVocabulary vocab;
  std::vector<FeatureVector> inputs;
  std::vector<std::vector<int>> targets;
  size_t skipped = 0;
  for (const auto& lat : lattices) {
    for (int i = 0; i < static_cast<int>(lat.sentence.tokens.size()); ++i) {
      bool trainable = lat.is_example[i] && !lat.allowed[i].empty() &&
                       static_cast<int>(lat.allowed[i].size()) < l;
      if (!trainable) {
        skipped++;
        continue;
      }
      inputs.push_back(wsabie_features(lat.sentence, i, embeddings, clusters,
                                       vocab, config.features));
      targets.push_back(lat.allowed[i]);
    }
  }
  if (inputs.empty()) throw DataError("Wsabie training: no trainable tokens");
  if (report) {
    report->trainable_tokens = inputs.size();
    report->skipped_tokens = skipped;
  }

  WsabieModel model = WsabieModel::init(inventory, std::move(vocab), config);
  std::mt19937_64 rng(config.seed);
  std::vector<size_t> order(inputs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[rng() % (i + 1)]);
    for (size_t i : order) {
      WarpStepReport step = model.warp_step(inputs[i], targets[i], rng);
      if (report && step.updated) report->updates++;
    }
  }
  return model;
}

}  // namespace mt
