#include "pipeline.hpp"

#include <fstream>
#include <iostream>
#include <limits>

#include "io_util.hpp"
#include "manifest.hpp"
#include "model1.hpp"

namespace mt {

namespace {

constexpr uint32_t kWsabieMagic = 0x5357544d;  // "MTWS"
constexpr uint32_t kHmmMagic = 0x4d48544d;     // "MTHM"

// Projection inputs are loaded without the sentence-length cap: bitext lines,
// the tagged source corpus and the alignment files must stay line-parallel.
constexpr int kNoLengthCap = std::numeric_limits<int>::max();

const char* mode_name(ConstraintMode mode) {
  switch (mode) {
    case ConstraintMode::kType: return "type";
    case ConstraintMode::kTypeAndToken: return "type+token";
    case ConstraintMode::kUnambiguousType: return "unambiguous";
  }
  return "?";
}

const char* model_name(ModelKind kind) {
  return kind == ModelKind::kWsabie ? "wsabie" : "hmm";
}

EmbeddingTable load_embeddings_or_empty(const std::string& path, int dim) {
  if (path.empty()) return EmbeddingTable(dim);
  EmbeddingTable table = EmbeddingTable::load(path);
  if (table.dim() != dim)
    throw DataError("embedding file dimension " + std::to_string(table.dim()) +
                    " does not match the configured dimension " +
                    std::to_string(dim));
  return table;
}

ClusterMap load_clusters_or_empty(const std::string& path) {
  if (path.empty()) return ClusterMap();
  return ClusterMap::load(path);
}

void add_wsabie_options(RunManifest& manifest, const WsabieConfig& c) {
  manifest.set_option("joint_dim", c.joint_dim);
  manifest.set_option("learning_rate", c.learning_rate);
  manifest.set_option("margin", c.margin);
  manifest.set_option("epochs", c.epochs);
  manifest.set_option("norm_cap", c.norm_cap);
  manifest.set_option("seed", c.seed);
  manifest.set_option("uniform_rank_weight", c.uniform_rank_weight);
  manifest.set_option("embedding_dim", c.embedding_dim);
  manifest.set_option("context", c.features.context);
  manifest.set_option("cluster_window", c.features.cluster_window);
}

void add_hmm_options(RunManifest& manifest, const HmmConfig& c) {
  manifest.set_option("l2_strength", c.l2_strength);
  manifest.set_option("lbfgs_memory", c.lbfgs_memory);
  manifest.set_option("max_iterations", c.max_iterations);
  manifest.set_option("convergence_tol", c.convergence_tol);
  manifest.set_option("rare_threshold", c.rare_threshold);
  manifest.set_option("shape_flags", c.shape_flags);
  manifest.set_option("pos_pair_feature", c.pos_pair_feature);
}

}  // namespace

AlignCounters run_align(const AlignOptions& options) {
  std::vector<RawPair> bitext = load_bitext(options.bitext_path);
  std::vector<DirAlignment> fwd, rev;
  model1_align(bitext, options.iterations, fwd, rev);
  save_alignments(options.forward_out, fwd);
  save_alignments(options.reverse_out, rev);

  AlignCounters counters;
  counters.pairs = static_cast<std::int64_t>(bitext.size());

  RunManifest manifest("align");
  manifest.set_option("iterations", options.iterations);
  manifest.add_input("bitext", options.bitext_path);
  manifest.add_output("forward", options.forward_out);
  manifest.add_output("reverse", options.reverse_out);
  manifest.set_counter("pairs", counters.pairs);
  manifest.write(manifest_path_for(options.forward_out));
  return counters;
}

ProjectCounters run_project(const ProjectOptions& options) {
  std::vector<RawPair> bitext = load_bitext(options.bitext_path);
  Corpus source = load_corpus(options.source_corpus_path, kNoLengthCap);
  std::vector<DirAlignment> fwd =
      load_alignments(options.forward_alignments_path);
  std::vector<DirAlignment> rev =
      load_alignments(options.reverse_alignments_path);
  if (source.size() != bitext.size() || fwd.size() != bitext.size() ||
      rev.size() != bitext.size())
    throw DataError(
        "projection inputs are not line-parallel: " +
        std::to_string(bitext.size()) + " bitext pairs, " +
        std::to_string(source.size()) + " source sentences, " +
        std::to_string(fwd.size()) + "/" + std::to_string(rev.size()) +
        " alignment lines");

  TagInventory inventory;
  std::vector<SentencePair> pairs;
  pairs.reserve(bitext.size());
  ProjectCounters counters;
  for (size_t i = 0; i < bitext.size(); ++i) {
    if (source[i].size() != bitext[i].source.size())
      throw DataError("source corpus sentence " + std::to_string(i + 1) +
                      " has " + std::to_string(source[i].size()) +
                      " tokens but the bitext line has " +
                      std::to_string(bitext[i].source.size()));
    SentencePair pair;
    pair.source = source[i];
    for (const auto& tok : pair.source.tokens) {
      const MorphTag* tag = source_tag(tok);
      if (!tag)
        throw DataError("untagged source token '" + tok.surface + "'");
      inventory.add(*tag);
    }
    for (const auto& word : bitext[i].target) {
      Token t;
      t.surface = word;
      pair.target.tokens.push_back(std::move(t));
    }
    pair.links = select_links(intersect_and_filter(
        fwd[i], rev[i], options.config.alpha,
        static_cast<int>(bitext[i].source.size()),
        static_cast<int>(bitext[i].target.size())));
    counters.links_kept += static_cast<std::int64_t>(pair.links.size());
    pairs.push_back(std::move(pair));
  }
  counters.pairs = static_cast<std::int64_t>(pairs.size());

  TypeDictionary dictionary = build_type_dictionary(
      accumulate_type_distributions(pairs), options.config.beta, inventory);
  counters.dictionary_entries =
      static_cast<std::int64_t>(dictionary.entries.size());

  std::vector<ConstraintLattice> lattices =
      build_lattice_corpus(pairs, dictionary, options.config);
  counters.lattice_sentences = static_cast<std::int64_t>(lattices.size());
  for (const auto& lat : lattices)
    for (char ex : lat.is_example)
      if (ex) counters.example_tokens++;

  save_dictionary(options.dictionary_out, dictionary);
  save_lattices(options.lattices_out, dictionary.inventory, lattices);

  RunManifest manifest("project");
  manifest.set_option("alpha", options.config.alpha);
  manifest.set_option("beta", options.config.beta);
  manifest.set_option("max_train_tokens", options.config.max_train_tokens);
  manifest.set_option("constraints", mode_name(options.config.constraint_mode));
  manifest.add_input("bitext", options.bitext_path);
  manifest.add_input("source_corpus", options.source_corpus_path);
  manifest.add_input("forward_alignments", options.forward_alignments_path);
  manifest.add_input("reverse_alignments", options.reverse_alignments_path);
  manifest.add_output("dictionary", options.dictionary_out);
  manifest.add_output("lattices", options.lattices_out);
  manifest.set_counter("pairs", counters.pairs);
  manifest.set_counter("links_kept", counters.links_kept);
  manifest.set_counter("dictionary_entries", counters.dictionary_entries);
  manifest.set_counter("lattice_sentences", counters.lattice_sentences);
  manifest.set_counter("example_tokens", counters.example_tokens);
  manifest.write(manifest_path_for(options.dictionary_out));
  return counters;
}

ClusterCounters run_cluster(const ClusterOptions& options) {
  Corpus corpus = load_raw(options.corpus_path, kNoLengthCap);
  ClusterMap clusters =
      induce_clusters(corpus, options.num_clusters, options.max_words,
                      options.max_iterations);
  clusters.save(options.clusters_out);

  ClusterCounters counters;
  counters.words_assigned = static_cast<std::int64_t>(clusters.size());
  counters.objective = clustering_objective(corpus, clusters);

  RunManifest manifest("cluster");
  manifest.set_option("num_clusters", options.num_clusters);
  manifest.set_option("max_words", options.max_words);
  manifest.set_option("max_iterations", options.max_iterations);
  manifest.add_input("corpus", options.corpus_path);
  manifest.add_output("clusters", options.clusters_out);
  manifest.set_counter("words_assigned", counters.words_assigned);
  manifest.write(manifest_path_for(options.clusters_out));
  return counters;
}

namespace {

// Whole-sentence token budget, the same rule the projection step applies.
void truncate_lattices(std::vector<ConstraintLattice>& lattices,
                       long long max_tokens) {
  if (max_tokens <= 0) return;
  long long tokens = 0;
  size_t keep = 0;
  for (; keep < lattices.size(); ++keep) {
    long long n =
        static_cast<long long>(lattices[keep].sentence.tokens.size());
    if (tokens + n > max_tokens) break;
    tokens += n;
  }
  lattices.resize(keep);
}

TrainCounters train_on_lattices(const std::vector<ConstraintLattice>& lattices,
                                const TagInventory& inventory,
                                const TrainOptions& options,
                                RunManifest& manifest) {
  TrainCounters counters;
  counters.sentences = static_cast<std::int64_t>(lattices.size());
  ClusterMap clusters = load_clusters_or_empty(options.clusters_path);
  if (options.model == ModelKind::kWsabie) {
    EmbeddingTable embeddings = load_embeddings_or_empty(
        options.embeddings_path, options.wsabie.embedding_dim);
    WsabieTrainReport report;
    WsabieModel model = wsabie_train(lattices, inventory, embeddings, clusters,
                                     options.wsabie, &report);
    model.save_file(options.model_out);
    counters.trainable_tokens =
        static_cast<std::int64_t>(report.trainable_tokens);
    counters.updates_or_iterations = static_cast<std::int64_t>(report.updates);
    add_wsabie_options(manifest, options.wsabie);
  } else {
    FeatureHmm model =
        FeatureHmm::build(lattices, inventory, clusters, options.hmm);
    FeatureHmm::TrainReport report = model.train(lattices);
    model.save_file(options.model_out);
    for (const auto& lat : lattices)
      for (char ex : lat.is_example)
        if (ex) counters.trainable_tokens++;
    counters.updates_or_iterations = report.iterations;
    counters.objective = report.objective;
    manifest.set_counter("skipped_sentences",
                         static_cast<std::int64_t>(report.skipped_sentences));
    add_hmm_options(manifest, options.hmm);
  }
  manifest.set_option("model", model_name(options.model));
  manifest.add_output("model", options.model_out);
  manifest.set_counter("sentences", counters.sentences);
  manifest.set_counter("trainable_tokens", counters.trainable_tokens);
  manifest.set_counter("updates_or_iterations",
                       counters.updates_or_iterations);
  manifest.write(manifest_path_for(options.model_out));
  return counters;
}

}  // namespace

TrainCounters run_train(const TrainOptions& options) {
  RunManifest manifest("train");
  manifest.set_option("max_train_tokens", options.max_train_tokens);

  TagInventory inventory;
  std::vector<ConstraintLattice> lattices;
  CorpusReadStats stats;
  switch (options.source) {
    case TrainSource::kLattices: {
      manifest.set_option("constraints", "lattices");
      manifest.add_input("lattices", options.lattices_path);
      auto loaded = load_lattices(options.lattices_path);
      inventory = std::move(loaded.first);
      lattices = std::move(loaded.second);
      truncate_lattices(lattices, options.max_train_tokens);
      break;
    }
    case TrainSource::kOracle: {
      manifest.set_option("constraints", "oracle");
      manifest.add_input("gold_corpus", options.gold_corpus_path);
      Corpus corpus = load_corpus(options.gold_corpus_path,
                                  options.max_sentence_length, &stats);
      TypeDictionary dictionary = build_oracle_dictionary(corpus);
      inventory = dictionary.inventory;
      lattices =
          lattices_from_dictionary(corpus, dictionary, options.max_train_tokens);
      break;
    }
    case TrainSource::kGold: {
      manifest.set_option("constraints", "gold");
      manifest.add_input("gold_corpus", options.gold_corpus_path);
      Corpus corpus = load_corpus(options.gold_corpus_path,
                                  options.max_sentence_length, &stats);
      inventory = build_tag_inventory(corpus);
      lattices =
          lattices_from_gold(corpus, inventory, options.max_train_tokens);
      break;
    }
  }
  if (!options.embeddings_path.empty())
    manifest.add_input("embeddings", options.embeddings_path);
  if (!options.clusters_path.empty())
    manifest.add_input("clusters", options.clusters_path);
  manifest.set_counter("sentences_excluded",
                       static_cast<std::int64_t>(stats.sentences_excluded));

  TrainCounters counters =
      train_on_lattices(lattices, inventory, options, manifest);
  counters.sentences_excluded =
      static_cast<std::int64_t>(stats.sentences_excluded);
  return counters;
}

TrainCounters run_supervised_train(const SupervisedTrainOptions& options) {
  RunManifest manifest("supervised-train");
  manifest.add_input("gold_corpus", options.gold_corpus_path);
  CorpusReadStats stats;
  Corpus corpus = load_corpus(options.gold_corpus_path,
                              options.max_sentence_length, &stats);
  if (options.restrict) {
    std::set<std::string> keep(options.restrict_attributes.begin(),
                               options.restrict_attributes.end());
    corpus = restrict_to_attribute_types(std::move(corpus), keep);
    nlohmann::ordered_json attrs = nlohmann::ordered_json::array();
    for (const auto& a : keep) attrs.push_back(a);
    manifest.set_option("restrict_attributes", attrs);
  }
  manifest.set_option("first_n_tokens", options.first_n_tokens);

  TagInventory inventory = build_tag_inventory(corpus);
  std::vector<ConstraintLattice> lattices =
      lattices_from_gold(corpus, inventory, options.first_n_tokens);

  TrainOptions train;
  train.model = options.model;
  train.embeddings_path = options.embeddings_path;
  train.clusters_path = options.clusters_path;
  train.wsabie = options.wsabie;
  train.hmm = options.hmm;
  train.model_out = options.model_out;
  if (!options.embeddings_path.empty())
    manifest.add_input("embeddings", options.embeddings_path);
  if (!options.clusters_path.empty())
    manifest.add_input("clusters", options.clusters_path);
  manifest.set_counter("sentences_excluded",
                       static_cast<std::int64_t>(stats.sentences_excluded));
  TrainCounters counters =
      train_on_lattices(lattices, inventory, train, manifest);
  counters.sentences_excluded =
      static_cast<std::int64_t>(stats.sentences_excluded);
  return counters;
}

ModelKind sniff_model_kind(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  uint32_t magic = read_u32(in);
  if (magic == kWsabieMagic) return ModelKind::kWsabie;
  if (magic == kHmmMagic) return ModelKind::kHmm;
  throw DataError("unrecognized model file: " + path);
}

TagCounters run_tag(const TagOptions& options) {
  Corpus corpus = options.input_is_raw ? load_raw(options.input_path,
                                                  kNoLengthCap)
                                       : load_corpus(options.input_path,
                                                     kNoLengthCap);
  ModelKind kind = sniff_model_kind(options.model_path);

  RunManifest manifest("tag");
  manifest.set_option("model", model_name(kind));
  manifest.add_input("model", options.model_path);
  manifest.add_input("input", options.input_path);

  TagCounters counters;
  counters.sentences = static_cast<std::int64_t>(corpus.size());
  if (kind == ModelKind::kWsabie) {
    WsabieModel model = WsabieModel::load_file(options.model_path);
    EmbeddingTable embeddings = load_embeddings_or_empty(
        options.embeddings_path, model.config().embedding_dim);
    ClusterMap clusters = load_clusters_or_empty(options.clusters_path);
    if (!options.embeddings_path.empty())
      manifest.add_input("embeddings", options.embeddings_path);
    if (!options.clusters_path.empty())
      manifest.add_input("clusters", options.clusters_path);
    for (auto& sent : corpus) {
      std::vector<MorphTag> tags = model.predict(sent, embeddings, clusters);
      for (size_t i = 0; i < sent.tokens.size(); ++i)
        sent.tokens[i].predicted = tags[i];
      counters.tokens += static_cast<std::int64_t>(sent.size());
    }
  } else {
    FeatureHmm model = FeatureHmm::load_file(options.model_path);
    const TypeDictionary* dict = nullptr;
    TypeDictionary loaded_dict;
    if (!options.dictionary_path.empty()) {
      loaded_dict = load_dictionary(options.dictionary_path);
      dict = &loaded_dict;
      manifest.add_input("dictionary", options.dictionary_path);
    }
    for (auto& sent : corpus) {
      std::vector<MorphTag> tags;
      if (dict) {
        // Decode-time constraints: the dictionary is applied as a lattice.
        std::vector<ConstraintLattice> lats = lattices_from_dictionary(
            Corpus{sent}, *dict, 0);
        std::vector<int> ids = model.viterbi_indices_constrained(lats[0]);
        for (int id : ids) tags.push_back(model.inventory().tag_at(id));
      } else {
        tags = model.viterbi(sent);
      }
      for (size_t i = 0; i < sent.tokens.size(); ++i)
        sent.tokens[i].predicted = tags[i];
      counters.tokens += static_cast<std::int64_t>(sent.size());
    }
  }
  save_corpus(options.output_path, corpus, /*use_predicted=*/true);
  manifest.add_output("tagged", options.output_path);
  manifest.set_counter("sentences", counters.sentences);
  manifest.set_counter("tokens", counters.tokens);
  manifest.write(manifest_path_for(options.output_path));
  return counters;
}

EvalReport run_evaluate(const EvaluateOptions& options) {
  Corpus gold = load_corpus(options.gold_path, kNoLengthCap);
  Corpus pred = load_corpus(options.predicted_path, kNoLengthCap);

  EvalConfig config;
  if (options.mode == EvalMode::kPos && options.source_train_path.empty() &&
      options.target_train_path.empty()) {
    // POS accuracy needs no shared sets; fall back to the gold inventory.
    config.mode = EvalMode::kPos;
    for (const auto& sent : gold)
      for (const auto& tok : sent.tokens)
        if (tok.gold) config.target_pos_inventory.insert(tok.gold->pos());
  } else {
    Corpus source_train = load_corpus(options.source_train_path, kNoLengthCap);
    Corpus target_train = load_corpus(options.target_train_path, kNoLengthCap);
    config = derive_eval_config(options.mode, source_train, target_train);
  }
  config.include_unobserved_shared = options.include_unobserved_shared;

  EvalReport report = score(gold, pred, config);
  write_report(std::cout, report, options.mode);
  if (!options.report_out.empty()) {
    std::ofstream out(options.report_out, std::ios::binary);
    if (!out) throw DataError("cannot write report: " + options.report_out);
    write_report(out, report, options.mode);

    RunManifest manifest("evaluate");
    manifest.set_option("mode", options.mode == EvalMode::kStandard
                                    ? "standard"
                                    : options.mode == EvalMode::kIntersected
                                          ? "intersected"
                                          : "pos");
    manifest.add_input("gold", options.gold_path);
    manifest.add_input("predicted", options.predicted_path);
    if (!options.source_train_path.empty())
      manifest.add_input("source_train", options.source_train_path);
    if (!options.target_train_path.empty())
      manifest.add_input("target_train", options.target_train_path);
    manifest.add_output("report", options.report_out);
    manifest.set_counter("tokens", report.token_count);
    manifest.write(manifest_path_for(options.report_out));
  }
  return report;
}

}  // namespace mt
