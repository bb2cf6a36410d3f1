#ifndef MORPHTAG_PIPELINE_HPP
#define MORPHTAG_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "eval.hpp"
#include "hmm.hpp"
#include "projection.hpp"
#include "wsabie.hpp"

namespace mt {

// File-level operations backing the command-line subcommands. Each call
// reads its inputs, writes its primary outputs plus a run manifest
// ("<output>.manifest.json" beside the first output) and returns basic
// counters. All operations are deterministic given their inputs and seeds.

struct AlignOptions {
  std::string bitext_path;
  int iterations = 10;
  std::string forward_out;   // one link per target token
  std::string reverse_out;   // one link per source token
};

struct AlignCounters {
  std::int64_t pairs = 0;
};

AlignCounters run_align(const AlignOptions& options);

struct ProjectOptions {
  std::string bitext_path;
  std::string source_corpus_path;  // tagged, line-parallel with the bitext
  std::string forward_alignments_path;
  std::string reverse_alignments_path;
  ProjectionConfig config;
  std::string dictionary_out;
  std::string lattices_out;
};

struct ProjectCounters {
  std::int64_t pairs = 0;
  std::int64_t links_kept = 0;
  std::int64_t dictionary_entries = 0;
  std::int64_t lattice_sentences = 0;
  std::int64_t example_tokens = 0;
};

ProjectCounters run_project(const ProjectOptions& options);

struct ClusterOptions {
  std::string corpus_path;  // raw text, one tokenized sentence per line
  int num_clusters = 256;
  int max_words = 100000;
  int max_iterations = 20;
  std::string clusters_out;
};

struct ClusterCounters {
  std::int64_t words_assigned = 0;
  double objective = 0.0;
};

ClusterCounters run_cluster(const ClusterOptions& options);

enum class ModelKind { kWsabie, kHmm };

// Where the training constraints come from: a projected lattice file, an
// oracle dictionary built from a gold corpus, or the gold tags themselves.
enum class TrainSource { kLattices, kOracle, kGold };

struct TrainOptions {
  ModelKind model = ModelKind::kWsabie;
  TrainSource source = TrainSource::kLattices;
  std::string lattices_path;     // kLattices
  std::string gold_corpus_path;  // kOracle / kGold
  std::string embeddings_path;   // wsabie only; empty = zero embeddings
  std::string clusters_path;     // optional for both models
  long long max_train_tokens = 2000000;
  int max_sentence_length = kDefaultMaxSentenceLength;
  WsabieConfig wsabie;
  HmmConfig hmm;
  std::string model_out;
};

struct TrainCounters {
  std::int64_t sentences = 0;
  std::int64_t sentences_excluded = 0;
  std::int64_t trainable_tokens = 0;
  std::int64_t updates_or_iterations = 0;
  double objective = 0.0;  // hmm only
};

TrainCounters run_train(const TrainOptions& options);

struct SupervisedTrainOptions {
  ModelKind model = ModelKind::kHmm;
  std::string gold_corpus_path;
  long long first_n_tokens = -1;  // <0: use everything
  std::vector<std::string> restrict_attributes;  // empty: keep all
  bool restrict = false;                         // restrict_attributes given
  std::string embeddings_path;
  std::string clusters_path;
  int max_sentence_length = kDefaultMaxSentenceLength;
  WsabieConfig wsabie;
  HmmConfig hmm;
  std::string model_out;
};

TrainCounters run_supervised_train(const SupervisedTrainOptions& options);

struct TagOptions {
  std::string model_path;
  std::string input_path;
  bool input_is_raw = true;  // raw text vs annotated corpus
  std::string embeddings_path;  // wsabie
  std::string clusters_path;    // wsabie
  std::string dictionary_path;  // optional decode-time constraints (hmm)
  std::string output_path;      // annotated corpus
};

struct TagCounters {
  std::int64_t sentences = 0;
  std::int64_t tokens = 0;
};

TagCounters run_tag(const TagOptions& options);

struct EvaluateOptions {
  EvalMode mode = EvalMode::kStandard;
  std::string gold_path;
  std::string predicted_path;
  std::string source_train_path;
  std::string target_train_path;
  bool include_unobserved_shared = false;
  std::string report_out;  // empty: stdout only
};

EvalReport run_evaluate(const EvaluateOptions& options);

// Identifies a model file as wsabie or hmm by its magic number.
ModelKind sniff_model_kind(const std::string& path);

}  // namespace mt

#endif
