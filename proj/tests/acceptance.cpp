// End-to-end acceptance checks for the tagging toolkit. Each criterion
// prints one PASS/FAIL line; the process exits nonzero when any asserted
// criterion fails. The final full-data check needs external corpora and is
// reported as SKIP when they are not configured.
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eval.hpp"
#include "features.hpp"
#include "hmm.hpp"
#include "model1.hpp"
#include "projection.hpp"
#include "wsabie.hpp"

using namespace mt;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool ok) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion-" << number << ": "
            << name << "\n";
  if (!ok) g_failures++;
}

Sentence words(const std::vector<std::string>& ws) {
  Sentence s;
  for (const auto& w : ws) {
    Token t;
    t.surface = w;
    s.tokens.push_back(std::move(t));
  }
  return s;
}

ConstraintLattice lattice(const std::vector<std::string>& ws,
                          std::vector<std::vector<int>> allowed) {
  ConstraintLattice lat;
  lat.sentence = words(ws);
  lat.allowed = std::move(allowed);
  lat.is_example.assign(ws.size(), 1);
  return lat;
}

// ---- criterion 1: constraint combination ------------------------------

bool check_combination() {
  TagInventory inv;
  inv.add(MorphTag("A"));
  inv.add(MorphTag("B"));
  inv.add(MorphTag("C"));
  std::optional<MorphTag> none;
  std::optional<MorphTag> c = MorphTag("C");
  std::vector<int> empty, ab = {0, 1}, ac = {0, 2}, full = {0, 1, 2};
  const std::vector<int> all = {0, 1, 2};

  bool ok = true;
  // unaligned x {absent, empty, contains, excludes}
  ok &= combine_constraints(none, nullptr, inv) == all;
  ok &= combine_constraints(none, &empty, inv) == all;
  ok &= combine_constraints(none, &ac, inv) == ac;
  ok &= combine_constraints(none, &ab, inv) == ab;
  // aligned (token tag C) x {absent, empty, contains, excludes}
  ok &= combine_constraints(c, nullptr, inv) == std::vector<int>{2};
  ok &= combine_constraints(c, &empty, inv) == std::vector<int>{2};
  ok &= combine_constraints(c, &ac, inv) == std::vector<int>{2};
  ok &= combine_constraints(c, &ab, inv) == ab;
  // aligned with a full-inventory entry behaves like an empty entry
  ok &= combine_constraints(c, &full, inv) == std::vector<int>{2};
  return ok;
}

// ---- criteria 2-4: inference oracles ----------------------------------

struct RandomInstance {
  FeatureHmm model;
  std::vector<ConstraintLattice> lattices;
};

RandomInstance random_instance(std::mt19937_64& rng, int max_tags = 6,
                               int max_len = 5, int n_sentences = 1) {
  std::uniform_int_distribution<int> tag_count(2, max_tags);
  std::uniform_int_distribution<int> len_dist(1, max_len);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::vector<std::string> vocab = {"aa", "bb", "cc", "Dd", "9", ","};

  RandomInstance inst;
  int l = tag_count(rng);
  TagInventory inv;
  for (int t = 0; t < l; ++t)
    inv.add(MorphTag("P" + std::to_string(t % 3),
                     t >= 3 ? std::set<AttributeValue>{{"N", std::to_string(t)}}
                            : std::set<AttributeValue>{}));

  std::vector<ConstraintLattice> lats;
  std::uniform_int_distribution<int> word_dist(
      0, static_cast<int>(vocab.size()) - 1);
  for (int s = 0; s < n_sentences; ++s) {
    int n = len_dist(rng);
    std::vector<std::string> ws;
    std::vector<std::vector<int>> allowed;
    for (int i = 0; i < n; ++i) {
      ws.push_back(vocab[word_dist(rng)]);
      std::vector<int> a;
      for (int t = 0; t < l; ++t)
        if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.5)
          a.push_back(t);
      if (a.empty() || static_cast<int>(a.size()) == l) a.clear();
      allowed.push_back(std::move(a));
    }
    lats.push_back(lattice(ws, std::move(allowed)));
  }
  HmmConfig config;
  config.rare_threshold = 0;
  inst.model = FeatureHmm::build(lats, inv, ClusterMap(), config);
  for (int k = 0; k < inst.model.num_parameters(); ++k)
    inst.model.weights()[k] = noise(rng);
  inst.lattices = std::move(lats);
  return inst;
}

double brute_marginal(const FeatureHmm& model, const ConstraintLattice& lat) {
  auto tables = model.compute_distributions();
  int l = model.num_tags();
  int n = static_cast<int>(lat.sentence.tokens.size());
  std::vector<std::vector<int>> allowed(n);
  std::vector<int> word(n);
  for (int i = 0; i < n; ++i) {
    allowed[i] = lat.allowed[i];
    if (allowed[i].empty())
      for (int t = 0; t < l; ++t) allowed[i].push_back(t);
    word[i] = model.support_index(lat.sentence.tokens[i].surface);
  }
  std::vector<int> path(n, 0);
  double total = 0.0;
  std::function<void(int, double)> rec = [&](int i, double logp) {
    if (i == n) {
      total += std::exp(logp);
      return;
    }
    for (int t : allowed[i]) {
      int prev = i == 0 ? l : path[i - 1];
      path[i] = t;
      rec(i + 1, logp + tables.trans(prev, t) + tables.emit(t, word[i]));
    }
  };
  rec(0, 0.0);
  return std::log(total);
}

bool check_marginal_oracle() {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    RandomInstance inst = random_instance(rng);
    auto tables = inst.model.compute_distributions();
    for (const auto& lat : inst.lattices) {
      double fast = inst.model.constrained_log_marginal(tables, lat);
      double slow = brute_marginal(inst.model, lat);
      if (std::abs(fast - slow) > 1e-8) return false;
    }
  }
  return true;
}

bool check_gradient_oracle() {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 50; ++trial) {
    RandomInstance inst = random_instance(rng, 4, 4, 2);
    Eigen::VectorXd grad;
    inst.model.objective_and_gradient(inst.lattices, &grad);
    const double eps = 1e-5;
    for (int k = 0; k < inst.model.num_parameters(); ++k) {
      double orig = inst.model.weights()[k];
      inst.model.weights()[k] = orig + eps;
      double hi = inst.model.objective_and_gradient(inst.lattices, nullptr);
      inst.model.weights()[k] = orig - eps;
      double lo = inst.model.objective_and_gradient(inst.lattices, nullptr);
      inst.model.weights()[k] = orig;
      double fd = (hi - lo) / (2 * eps);
      double rel = std::abs(fd - grad[k]) /
                   std::max(1.0, std::max(std::abs(fd), std::abs(grad[k])));
      if (rel > 1e-4) return false;
    }
  }
  return true;
}

// Right-to-left accumulation matches the decoder's floating-point order;
// ties break toward the lexicographically smallest index sequence.
std::vector<int> brute_viterbi(const FeatureHmm& model, const Sentence& sent) {
  auto tables = model.compute_distributions();
  int l = model.num_tags();
  int n = static_cast<int>(sent.tokens.size());
  std::vector<int> word(n);
  for (int i = 0; i < n; ++i)
    word[i] = model.support_index(sent.tokens[i].surface);

  std::vector<int> best, path(n, 0);
  double best_score = -std::numeric_limits<double>::infinity();
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      double score = 0.0;
      for (int k = n - 1; k >= 0; --k) {
        int prev = k == 0 ? l : path[k - 1];
        score =
            tables.trans(prev, path[k]) + tables.emit(path[k], word[k]) + score;
      }
      if (score > best_score) {
        best_score = score;
        best = path;
      }
      return;
    }
    for (int t = 0; t < l; ++t) {
      path[i] = t;
      rec(i + 1);
    }
  };
  rec(0);
  return best;
}

bool check_viterbi_oracle() {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 200; ++trial) {
    RandomInstance inst = random_instance(rng, 5, 5);
    if (trial % 3 == 0) inst.model.weights().setZero();  // exact ties
    for (const auto& lat : inst.lattices)
      if (inst.model.viterbi_indices(lat.sentence) !=
          brute_viterbi(inst.model, lat.sentence))
        return false;
  }
  return true;
}

// ---- criteria 5-6: ranking model properties ---------------------------

bool check_warp_properties(const WsabieModel& trained) {
  if (trained.max_column_norm() > trained.config().norm_cap + 1e-6)
    return false;

  TagInventory inv;
  for (int t = 0; t < 5; ++t) inv.add(MorphTag("T" + std::to_string(t)));
  FeatureVocabulary vocab;
  for (int f = 0; f < 8; ++f) vocab.add("f" + std::to_string(f));

  std::mt19937_64 rng(211);
  int improved_checks = 0, attempts = 0;
  while (improved_checks < 100 && attempts < 10000) {
    attempts++;
    WsabieConfig config;
    config.joint_dim = 6;
    config.embedding_dim = 1;
    config.features.context = 0;
    config.learning_rate = 1e-3;
    config.seed = rng();
    WsabieModel model = WsabieModel::init(inv, vocab, config);
    FeatureVector x;
    x.sparse = {static_cast<int>(rng() % 8)};
    int y = static_cast<int>(rng() % 5);
    Eigen::VectorXd before = model.score_tags(x);
    auto step = model.warp_step(x, {y}, rng);
    if (!step.updated) continue;
    if (model.max_column_norm() > config.norm_cap) continue;  // projected
    Eigen::VectorXd after = model.score_tags(x);
    if (after[step.positive] - after[step.negative] <=
        before[step.positive] - before[step.negative])
      return false;
    improved_checks++;
  }
  return improved_checks == 100;
}

bool check_warp_weight_fixture() {
  // L=11, one positive, violator found on draw 2.
  return std::abs(warp_rank_weight(10, 2) - 2.283333) <= 1e-6;
}

// ---- criterion 7: synthetic end-to-end --------------------------------

struct Synthetic {
  TagInventory inventory;
  std::vector<SentencePair> pairs;
  std::vector<Sentence> held_out;       // target side
  std::vector<std::vector<int>> truth;  // tag indices for held_out
  std::unordered_map<std::string, int> lexicon;  // target type -> tag
};

// A deterministic suffix language: the last two characters of a target
// word decide its tag.
Synthetic make_synthetic() {
  Synthetic data;
  const std::vector<std::pair<std::string, MorphTag>> classes = {
      {"ka", MorphTag("NOUN", {{"Number", "Sing"}})},
      {"ko", MorphTag("NOUN", {{"Number", "Plur"}})},
      {"to", MorphTag("VERB")},
      {"de", MorphTag("DET")},
      {"li", MorphTag("ADJ")},
      {".", MorphTag("PUNCT")},
  };
  for (const auto& [suffix, tag] : classes) data.inventory.add(tag);

  const std::string letters = "bdfgmnprsv";
  std::mt19937_64 rng(401);
  std::uniform_int_distribution<int> letter(0, 9);
  std::uniform_int_distribution<int> cls(0, 4);  // non-punct classes
  std::uniform_int_distribution<int> len_dist(3, 7);

  // A fixed vocabulary of 40 stems per class keeps every held-out word
  // attested in training.
  std::vector<std::vector<std::string>> vocab(classes.size());
  for (size_t c = 0; c + 1 < classes.size(); ++c)
    for (int s = 0; s < 40; ++s) {
      std::string stem;
      for (int j = 0; j < 2; ++j) stem += letters[letter(rng)];
      vocab[c].push_back(stem + classes[c].first);
    }
  vocab.back().push_back(".");

  auto sample_sentence = [&](std::vector<int>* tags) {
    int n = len_dist(rng);
    std::vector<std::string> ws;
    for (int i = 0; i < n; ++i) {
      int c = cls(rng);
      ws.push_back(vocab[c][rng() % vocab[c].size()]);
      tags->push_back(c);
    }
    ws.push_back(".");
    tags->push_back(static_cast<int>(classes.size()) - 1);
    return ws;
  };

  for (int s = 0; s < 5000; ++s) {
    std::vector<int> tags;
    std::vector<std::string> tgt = sample_sentence(&tags);
    SentencePair pair;
    pair.target = words(tgt);
    for (size_t i = 0; i < tgt.size(); ++i) {
      Token src;
      src.surface = "s_" + tgt[i];
      src.gold = classes[tags[i]].second;
      pair.source.tokens.push_back(std::move(src));
      pair.links.push_back(AlignmentLink{static_cast<int>(i),
                                         static_cast<int>(i), 1.0, 1.0});
      data.lexicon.emplace(tgt[i], tags[i]);
    }
    data.pairs.push_back(std::move(pair));
  }
  for (int s = 0; s < 500; ++s) {
    std::vector<int> tags;
    std::vector<std::string> tgt = sample_sentence(&tags);
    data.held_out.push_back(words(tgt));
    data.truth.push_back(std::move(tags));
  }
  return data;
}

double tag_accuracy(const Synthetic& data,
                    const std::function<std::vector<int>(const Sentence&)>& f) {
  long long correct = 0, total = 0;
  for (size_t s = 0; s < data.held_out.size(); ++s) {
    std::vector<int> pred = f(data.held_out[s]);
    for (size_t i = 0; i < pred.size(); ++i) {
      total++;
      if (pred[i] == data.truth[s][i]) correct++;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace

int main() {
  report(1, "constraint combination matches the projection rules",
         check_combination());
  report(2, "constrained marginal agrees with brute force (200 instances)",
         check_marginal_oracle());
  report(3, "analytic gradient agrees with finite differences (50 instances)",
         check_gradient_oracle());
  report(4, "viterbi agrees with brute force including ties (200 instances)",
         check_viterbi_oracle());

  // Shared synthetic pipeline for criteria 5, 7 and 10.
  Synthetic data = make_synthetic();
  auto distributions = accumulate_type_distributions(data.pairs);
  ProjectionConfig pconfig;
  TypeDictionary dict =
      build_type_dictionary(distributions, pconfig.beta, data.inventory);

  bool lexicon_ok = dict.entries.size() == data.lexicon.size();
  for (const auto& [word, tag] : data.lexicon) {
    const std::vector<int>* entry = dict.entry(word);
    lexicon_ok &= entry && *entry == std::vector<int>{tag};
  }

  std::vector<ConstraintLattice> lattices =
      build_lattice_corpus(data.pairs, dict, pconfig);

  EmbeddingTable embeddings(4);
  ClusterMap clusters;
  WsabieConfig wconfig;
  wconfig.embedding_dim = 4;
  wconfig.features.context = 1;
  WsabieModel wsabie =
      wsabie_train(lattices, data.inventory, embeddings, clusters, wconfig);
  double wsabie_acc = tag_accuracy(data, [&](const Sentence& s) {
    return wsabie.predict_indices(s, embeddings, clusters);
  });

  HmmConfig hconfig;
  FeatureHmm hmm = FeatureHmm::build(lattices, data.inventory, clusters,
                                     hconfig);
  hmm.train(lattices);
  double hmm_acc = tag_accuracy(data, [&](const Sentence& s) {
    return hmm.viterbi_indices(s);
  });

  report(5, "norm cap invariant and single-step improvement",
         check_warp_properties(wsabie));
  report(6, "warp rank weight fixture Phi(5)", check_warp_weight_fixture());
  report(7,
         "synthetic end-to-end: lexicon exact, wsabie >= 95%, hmm >= 90% "
         "(wsabie " +
             std::to_string(wsabie_acc) + ", hmm " + std::to_string(hmm_acc) +
             ")",
         lexicon_ok && wsabie_acc >= 0.95 && hmm_acc >= 0.90);

  // Criterion 8: evaluation fixture and byte-stable report.
  {
    Sentence gold_sent, pred_sent;
    auto tok = [](const std::string& w, const std::string& canonical) {
      Token t;
      t.surface = w;
      t.gold = MorphTag::from_canonical(canonical);
      return t;
    };
    gold_sent.tokens = {tok("w0", "NOUN|Case=Nom"), tok("w1", "VERB|Case=Dat")};
    pred_sent.tokens = {tok("w0", "NOUN|Case=Nom"), tok("w1", "VERB|Case=Gen")};
    EvalConfig config;
    config.mode = EvalMode::kStandard;
    config.shared_attribute_types = {"Case"};
    config.target_pos_inventory = {"NOUN", "VERB", "PUNCT"};
    EvalReport rep = score({gold_sent}, {pred_sent}, config);
    bool ok = std::abs(rep.per_attribute.at("POS").f1 - 1.0) < 1e-12 &&
              std::abs(rep.per_attribute.at("Case").f1 - 0.5) < 1e-12 &&
              std::abs(rep.macro_f1 - 0.75) < 1e-12;
    ok &= standard_remap_pos("PROPN", config.target_pos_inventory) == "NOUN";
    ok &= standard_remap_pos("SYM", config.target_pos_inventory) == "PUNCT";
    ok &= standard_remap_pos("X", config.target_pos_inventory) == "PUNCT";
    ok &= format_report(rep, EvalMode::kStandard) ==
          "Case\t1\t1\t1\t0.500000\t0.500000\t0.500000\n"
          "POS\t2\t0\t0\t1.000000\t1.000000\t1.000000\n"
          "MACRO_F1\t0.750000\n"
          "POS_ACC\t1.000000\n";
    report(8, "evaluation fixture and report format", ok);
  }

  // Criterion 9: exchange clustering.
  {
    // 10k-token synthetic text with two alternating sublanguages.
    std::mt19937_64 rng(503);
    const std::vector<std::string> a = {"a1", "a2", "a3"};
    const std::vector<std::string> b = {"b1", "b2", "b3"};
    Corpus corpus;
    for (int s = 0; s < 1000; ++s) {
      Sentence sent;
      for (int i = 0; i < 10; ++i) {
        Token t;
        const auto& side = (i % 2 == 0) ? a : b;
        t.surface = side[rng() % side.size()];
        sent.tokens.push_back(std::move(t));
      }
      corpus.push_back(std::move(sent));
    }
    std::vector<double> history;
    ClusterMap two = induce_clusters(corpus, 2, 100000, 20, &history);
    bool monotone = true;
    for (size_t i = 1; i < history.size(); ++i)
      monotone &= history[i] >= history[i - 1] - 1e-9;

    // Brute force over every assignment of the 6-word vocabulary.
    std::vector<std::string> vocab_all;
    vocab_all.insert(vocab_all.end(), a.begin(), a.end());
    vocab_all.insert(vocab_all.end(), b.begin(), b.end());
    double best = -std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < (1 << 6); ++mask) {
      ClusterMap cand(2);
      for (int i = 0; i < 6; ++i) cand.assign(vocab_all[i], (mask >> i) & 1);
      best = std::max(best, clustering_objective(corpus, cand));
    }
    double induced = clustering_objective(corpus, two);
    report(9, "exchange clustering monotone and optimal at K=2",
           monotone && std::abs(induced - best) <= 1e-9);
  }

  // Criterion 10: determinism of training and output artifacts.
  {
    WsabieModel again =
        wsabie_train(lattices, data.inventory, embeddings, clusters, wconfig);
    std::ostringstream m1, m2;
    wsabie.save(m1);
    again.save(m2);

    std::ostringstream d1, d2;
    write_dictionary(d1, dict);
    write_dictionary(
        d2, build_type_dictionary(distributions, pconfig.beta, data.inventory));

    std::ostringstream l1, l2;
    write_lattices(l1, dict.inventory, lattices);
    write_lattices(l2, dict.inventory,
                   build_lattice_corpus(data.pairs, dict, pconfig));

    std::string tags1, tags2;
    for (const auto& sent : data.held_out) {
      for (int t : hmm.viterbi_indices(sent)) tags1 += std::to_string(t) + " ";
      for (int t : hmm.viterbi_indices(sent)) tags2 += std::to_string(t) + " ";
    }
    report(10, "repeated runs are bit-identical",
           m1.str() == m2.str() && d1.str() == d2.str() &&
               l1.str() == l2.str() && tags1 == tags2);
  }

  // Criterion 11: full-data harness, reported only. Set MORPHTAG_FULL_DATA
  // to a directory with bitext/ and treebank files and run
  // scripts/full_data_harness.sh to produce the numbers.
  if (const char* dir = std::getenv("MORPHTAG_FULL_DATA")) {
    std::cout << "INFO criterion-11: full-data harness configured at " << dir
              << "; run scripts/full_data_harness.sh (reported, not asserted)\n";
  } else {
    std::cout << "SKIP criterion-11: full-data harness (no corpora "
                 "configured; reported, not asserted)\n";
  }

  return g_failures == 0 ? 0 : 1;
}
