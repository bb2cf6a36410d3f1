#include "features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace mt {

const std::vector<double>* EmbeddingTable::lookup(
    const std::string& word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? nullptr : &it->second;
}

void EmbeddingTable::insert(const std::string& word,
                            std::vector<double> vec) {
  if (static_cast<int>(vec.size()) != dim_)
    throw DataError("embedding for '" + word + "' has dimension " +
                    std::to_string(vec.size()) + ", expected " +
                    std::to_string(dim_));
  auto [it, inserted] = vectors_.insert_or_assign(word, std::move(vec));
  if (!inserted) duplicates_++;
}

EmbeddingTable EmbeddingTable::parse(std::istream& in) {
  std::string line;
  size_t lineno = 0;
  int dim = -1;
  EmbeddingTable table(0);
  bool first = true;
  while (std::getline(in, line)) {
    lineno++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream toks(line);
    std::vector<std::string> parts;
    std::string t;
    while (toks >> t) parts.push_back(t);
    if (first) {
      first = false;
      // Optional "count dim" header.
      if (parts.size() == 2) {
        char* end = nullptr;
        long d = std::strtol(parts[1].c_str(), &end, 10);
        if (end && *end == '\0' && d > 0) {
          dim = static_cast<int>(d);
          table = EmbeddingTable(dim);
          continue;
        }
      }
    }
    if (parts.size() < 2)
      throw ParseError("embedding line " + std::to_string(lineno) +
                       ": expected word and values");
    if (dim < 0) {
      dim = static_cast<int>(parts.size()) - 1;
      table = EmbeddingTable(dim);
    }
    if (static_cast<int>(parts.size()) - 1 != dim)
      throw ParseError("embedding line " + std::to_string(lineno) + ": " +
                       std::to_string(parts.size() - 1) +
                       " values, expected " + std::to_string(dim));
    std::vector<double> vec(dim);
    for (int i = 0; i < dim; ++i) {
      char* end = nullptr;
      vec[i] = std::strtod(parts[i + 1].c_str(), &end);
      if (!end || *end != '\0')
        throw ParseError("embedding line " + std::to_string(lineno) +
                         ": bad value '" + parts[i + 1] + "'");
    }
    table.insert(parts[0], std::move(vec));
  }
  if (dim < 0) throw DataError("empty embedding file");
  return table;
}

EmbeddingTable EmbeddingTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file: " + path);
  return parse(in);
}

int ClusterMap::cluster_of(const std::string& word) const {
  auto it = assignment_.find(word);
  return it == assignment_.end() ? k_ : it->second;
}

void ClusterMap::assign(const std::string& word, int cluster) {
  if (cluster < 0 || cluster >= k_)
    throw DataError("cluster id " + std::to_string(cluster) +
                    " out of range for K=" + std::to_string(k_));
  assignment_[word] = cluster;
}

void ClusterMap::write(std::ostream& out) const {
  std::vector<const std::string*> words;
  words.reserve(assignment_.size());
  for (const auto& [w, c] : assignment_) words.push_back(&w);
  std::sort(words.begin(), words.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  out << "#K\t" << k_ << '\n';
  for (const std::string* w : words)
    out << *w << '\t' << assignment_.at(*w) << '\n';
}

void ClusterMap::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write cluster file: " + path);
  write(out);
}

ClusterMap ClusterMap::parse(std::istream& in) {
  ClusterMap map(256);
  std::string line;
  size_t lineno = 0;
  int max_id = -1;
  bool have_k = false;
  while (std::getline(in, line)) {
    lineno++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("#K\t", 0) == 0) {
      map = ClusterMap(std::stoi(line.substr(3)));
      have_k = true;
      continue;
    }
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("cluster line " + std::to_string(lineno) +
                       ": expected word<TAB>id");
    int id = std::stoi(line.substr(tab + 1));
    max_id = std::max(max_id, id);
    map.assignment_[line.substr(0, tab)] = id;
  }
  if (!have_k) map.k_ = max_id + 1;
  for (const auto& [w, c] : map.assignment_)
    if (c < 0 || c >= map.k_)
      throw ParseError("cluster id out of range for '" + w + "'");
  return map;
}

ClusterMap ClusterMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open cluster file: " + path);
  return parse(in);
}

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

struct ExchangeState {
  int k;                        // movable classes 0..k-1; UNK = k; boundary = k+1
  std::vector<std::string> words;          // by id
  std::vector<long long> word_count;
  std::vector<int> word_class;             // class per word id
  std::vector<std::unordered_map<int, long long>> pred;  // word id -> {word id or kBoundary: count}
  std::vector<std::unordered_map<int, long long>> succ;
  std::vector<long long> class_count;
  std::unordered_map<long long, long long> class_bigram;
  long long sentences = 0;

  static constexpr int kBoundaryWord = -1;

  int boundary_class() const { return k + 1; }

  int class_of_word(int w) const {
    return w == kBoundaryWord ? boundary_class() : word_class[w];
  }

  long long cell_key(int c1, int c2) const {
    return static_cast<long long>(c1) * (k + 2) + c2;
  }

  long long bigram(int c1, int c2) const {
    auto it = class_bigram.find(cell_key(c1, c2));
    return it == class_bigram.end() ? 0 : it->second;
  }

  void add_bigram(int c1, int c2, long long n) {
    long long& cell = class_bigram[cell_key(c1, c2)];
    cell += n;
    if (cell == 0) class_bigram.erase(cell_key(c1, c2));
  }

  // F = sum f(N(c1,c2)) - 2 sum f(N(c)) + sum f(N(w)), f(x) = x log x.
  double objective() const {
    double obj = 0.0;
    for (const auto& [key, n] : class_bigram) obj += xlogx(double(n));
    for (long long n : class_count) obj -= 2.0 * xlogx(double(n));
    for (long long n : word_count) obj += xlogx(double(n));
    obj += xlogx(double(sentences));  // boundary pseudo-word
    return obj;
  }

  // Objective change from moving word w (current class a) to class b.
  double move_delta(int w, int b) const {
    int a = word_class[w];
    long long nw = word_count[w];
    std::map<std::pair<int, int>, long long> touched;
    long long self = 0;
    auto self_it = pred[w].find(w);
    if (self_it != pred[w].end()) self = self_it->second;
    for (const auto& [u, n] : pred[w]) {
      if (u == w) continue;
      int cu = class_of_word(u);
      touched[{cu, a}] -= n;
      touched[{cu, b}] += n;
    }
    for (const auto& [u, n] : succ[w]) {
      if (u == w) continue;
      int cu = class_of_word(u);
      touched[{a, cu}] -= n;
      touched[{b, cu}] += n;
    }
    if (self) {
      touched[{a, a}] -= self;
      touched[{b, b}] += self;
    }
    double delta = 0.0;
    for (const auto& [cell, d] : touched) {
      if (d == 0) continue;
      long long n = bigram(cell.first, cell.second);
      delta += xlogx(double(n + d)) - xlogx(double(n));
    }
    delta -= 2.0 * (xlogx(double(class_count[a] - nw)) -
                    xlogx(double(class_count[a])) +
                    xlogx(double(class_count[b] + nw)) -
                    xlogx(double(class_count[b])));
    return delta;
  }

  void apply_move(int w, int b) {
    int a = word_class[w];
    long long nw = word_count[w];
    long long self = 0;
    auto self_it = pred[w].find(w);
    if (self_it != pred[w].end()) self = self_it->second;
    for (const auto& [u, n] : pred[w]) {
      if (u == w) continue;
      int cu = class_of_word(u);
      add_bigram(cu, a, -n);
      add_bigram(cu, b, n);
    }
    for (const auto& [u, n] : succ[w]) {
      if (u == w) continue;
      int cu = class_of_word(u);
      add_bigram(a, cu, -n);
      add_bigram(b, cu, n);
    }
    if (self) {
      add_bigram(a, a, -self);
      add_bigram(b, b, self);
    }
    class_count[a] -= nw;
    class_count[b] += nw;
    word_class[w] = b;
  }
};

}  // namespace

ClusterMap induce_clusters(const Corpus& raw_corpus, int k, int max_words,
                           int max_iterations,
                           std::vector<double>* objective_history) {
  if (raw_corpus.empty()) throw DataError("clustering: empty corpus");
  if (k < 1) throw DataError("clustering: K must be >= 1");

  ExchangeState st;
  st.k = k;
  std::unordered_map<std::string, int> ids;
  std::vector<std::vector<int>> streams;
  for (const auto& sent : raw_corpus) {
    std::vector<int> stream;
    for (const auto& tok : sent.tokens) {
      auto [it, fresh] = ids.emplace(tok.surface,
                                     static_cast<int>(st.words.size()));
      if (fresh) {
        st.words.push_back(tok.surface);
        st.word_count.push_back(0);
      }
      st.word_count[it->second]++;
      stream.push_back(it->second);
    }
    streams.push_back(std::move(stream));
  }
  st.sentences = static_cast<long long>(streams.size());

  int vocab = static_cast<int>(st.words.size());
  st.pred.resize(vocab);
  st.succ.resize(vocab);
  for (const auto& stream : streams) {
    int prev = ExchangeState::kBoundaryWord;
    for (int w : stream) {
      if (prev != ExchangeState::kBoundaryWord) st.succ[prev][w]++;
      st.pred[w][prev]++;
      prev = w;
    }
    st.succ[prev][ExchangeState::kBoundaryWord]++;
  }

  // Frequency-ranked init: word r -> class r mod K; infrequent words -> UNK.
  std::vector<int> order(vocab);
  for (int i = 0; i < vocab; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (st.word_count[a] != st.word_count[b])
      return st.word_count[a] > st.word_count[b];
    return st.words[a] < st.words[b];
  });
  int assigned = std::min(vocab, max_words);
  st.word_class.assign(vocab, k);  // UNK by default
  for (int r = 0; r < assigned; ++r) st.word_class[order[r]] = r % k;

  st.class_count.assign(k + 2, 0);
  for (int w = 0; w < vocab; ++w)
    st.class_count[st.word_class[w]] += st.word_count[w];
  st.class_count[st.boundary_class()] = st.sentences;
  for (const auto& stream : streams) {
    int prev_c = st.boundary_class();
    for (int w : stream) {
      st.add_bigram(prev_c, st.word_class[w], 1);
      prev_c = st.word_class[w];
    }
    st.add_bigram(prev_c, st.boundary_class(), 1);
  }

  if (objective_history) objective_history->push_back(st.objective());

  constexpr double kMinGain = 1e-9;
  for (int pass = 0; pass < max_iterations; ++pass) {
    bool moved = false;
    for (int r = 0; r < assigned; ++r) {
      int w = order[r];
      int a = st.word_class[w];
      int best_class = a;
      double best_delta = kMinGain;
      for (int b = 0; b < k; ++b) {
        if (b == a) continue;
        double d = st.move_delta(w, b);
        if (d > best_delta) {
          best_delta = d;
          best_class = b;
        }
      }
      if (best_class != a) {
        st.apply_move(w, best_class);
        moved = true;
        if (objective_history) objective_history->push_back(st.objective());
      }
    }
    if (!moved) break;
  }

  ClusterMap map(k);
  for (int r = 0; r < assigned; ++r)
    map.assign(st.words[order[r]], st.word_class[order[r]]);
  return map;
}

double clustering_objective(const Corpus& raw_corpus,
                            const ClusterMap& clusters) {
  // Direct recomputation from the definition, independent of the exchange
  // bookkeeping.
  int k = clusters.k();
  int boundary = k + 1;
  std::map<std::pair<int, int>, long long> bigram;
  std::map<int, long long> class_count;
  std::map<std::string, long long> word_count;
  long long sentences = 0;
  for (const auto& sent : raw_corpus) {
    sentences++;
    int prev = boundary;
    for (const auto& tok : sent.tokens) {
      int c = clusters.cluster_of(tok.surface);
      bigram[{prev, c}]++;
      class_count[c] += 1;
      word_count[tok.surface]++;
      prev = c;
    }
    bigram[{prev, boundary}]++;
  }
  class_count[boundary] = sentences;

  double obj = 0.0;
  for (const auto& [cell, n] : bigram) {
    double denom = double(class_count[cell.first]);
    obj += double(n) * std::log(double(n) / denom);
  }
  for (const auto& [w, n] : word_count) {
    int c = clusters.cluster_of(w);
    obj += double(n) * std::log(double(n) / double(class_count[c]));
  }
  return obj;
}

int FeatureVocabulary::add(const std::string& feature) {
  auto it = index_.find(feature);
  if (it != index_.end()) return it->second;
  if (frozen_) return -1;
  int id = static_cast<int>(names_.size());
  names_.push_back(feature);
  index_.emplace(feature, id);
  return id;
}

int FeatureVocabulary::lookup(const std::string& feature) const {
  auto it = index_.find(feature);
  return it == index_.end() ? -1 : it->second;
}

std::vector<std::string> wsabie_sparse_features(
    const Sentence& sentence, int i, const ClusterMap& clusters,
    const WsabieFeatureConfig& config) {
  std::vector<std::string> feats;
  const std::string& w = sentence.tokens.at(i).surface;
  int len = static_cast<int>(w.size());
  int max_affix = std::min(3, len);
  for (int n = 1; n <= max_affix; ++n) {
    feats.push_back("p" + std::to_string(n) + "=" + w.substr(0, n));
    feats.push_back("s" + std::to_string(n) + "=" + w.substr(len - n));
  }
  int n_tokens = static_cast<int>(sentence.tokens.size());
  for (int off = -config.cluster_window; off <= config.cluster_window; ++off) {
    int pos = i + off;
    std::string at = "@" + std::string(off >= 0 ? "+" : "") +
                     std::to_string(off);
    if (pos < 0)
      feats.push_back("BOS" + at);
    else if (pos >= n_tokens)
      feats.push_back("EOS" + at);
    else
      feats.push_back(
          "c" + at + "=" +
          std::to_string(clusters.cluster_of(sentence.tokens[pos].surface)));
  }
  return feats;
}

namespace {

FeatureVector wsabie_dense_part(const Sentence& sentence, int i,
                                const EmbeddingTable& embeddings,
                                const WsabieFeatureConfig& config) {
  FeatureVector out;
  int dim = embeddings.dim();
  int blocks = 2 * config.context + 1;
  out.dense.assign(static_cast<size_t>(blocks) * dim, 0.0);
  int n_tokens = static_cast<int>(sentence.tokens.size());
  for (int b = 0; b < blocks; ++b) {
    int pos = i + b - config.context;
    if (pos < 0 || pos >= n_tokens) continue;  // boundary: zero block
    const std::vector<double>* vec =
        embeddings.lookup(sentence.tokens[pos].surface);
    if (!vec) continue;  // OOV: zero block
    std::copy(vec->begin(), vec->end(),
              out.dense.begin() + static_cast<size_t>(b) * dim);
    out.dense_nonzero = true;
  }
  return out;
}

void finish_sparse(FeatureVector& out) {
  std::sort(out.sparse.begin(), out.sparse.end());
  out.sparse.erase(std::unique(out.sparse.begin(), out.sparse.end()),
                   out.sparse.end());
}

}  // namespace

FeatureVector wsabie_features(const Sentence& sentence, int i,
                              const EmbeddingTable& embeddings,
                              const ClusterMap& clusters,
                              FeatureVocabulary& vocab,
                              const WsabieFeatureConfig& config) {
  FeatureVector out = wsabie_dense_part(sentence, i, embeddings, config);
  for (const std::string& f :
       wsabie_sparse_features(sentence, i, clusters, config)) {
    int id = vocab.add(f);
    if (id >= 0) out.sparse.push_back(id);
  }
  finish_sparse(out);
  return out;
}

FeatureVector wsabie_features(const Sentence& sentence, int i,
                              const EmbeddingTable& embeddings,
                              const ClusterMap& clusters,
                              const FeatureVocabulary& vocab,
                              const WsabieFeatureConfig& config) {
  FeatureVector out = wsabie_dense_part(sentence, i, embeddings, config);
  for (const std::string& f :
       wsabie_sparse_features(sentence, i, clusters, config)) {
    int id = vocab.lookup(f);
    if (id >= 0) out.sparse.push_back(id);
  }
  finish_sparse(out);
  return out;
}

bool is_punctuation(const std::string& word) {
  if (word.empty()) return false;
  for (unsigned char c : word)
    if (!std::ispunct(c)) return false;
  return true;
}

bool has_digit(const std::string& word) {
  for (unsigned char c : word)
    if (std::isdigit(c)) return true;
  return false;
}

bool is_capitalized(const std::string& word) {
  return !word.empty() && std::isupper(static_cast<unsigned char>(word[0]));
}

std::vector<std::string> hmm_word_predicates(const std::string& word,
                                             const ClusterMap& clusters,
                                             bool shape_flags) {
  std::vector<std::string> preds;
  preds.push_back("w=" + word);
  int len = static_cast<int>(word.size());
  for (int n = 1; n <= std::min(3, len); ++n)
    preds.push_back("s" + std::to_string(n) + "=" + word.substr(len - n));
  if (is_punctuation(word)) preds.push_back("punct");
  if (shape_flags) {
    if (has_digit(word)) preds.push_back("digit");
    if (is_capitalized(word)) preds.push_back("cap");
  }
  preds.push_back("c=" + std::to_string(clusters.cluster_of(word)));
  return preds;
}

std::set<std::string> hmm_emission_features(const std::string& word,
                                            const MorphTag& tag,
                                            const ClusterMap& clusters,
                                            bool shape_flags) {
  std::set<std::string> out;
  std::string prefix = tag.canonical() + "&&";
  for (const auto& p : hmm_word_predicates(word, clusters, shape_flags))
    out.insert(prefix + p);
  return out;
}

}  // namespace mt
