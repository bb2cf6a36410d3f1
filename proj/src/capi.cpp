#include "morphtag.h"

#include <cstring>
#include <sstream>
#include <string>

#include "pipeline.hpp"
#include "tag.hpp"

namespace {

thread_local std::string g_last_error;

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

std::string required(const char* value, const char* what) {
  if (!value || !*value)
    throw UsageError(std::string("missing required option: ") + what);
  return value;
}

std::string optional_str(const char* value) { return value ? value : ""; }

mt::ConstraintMode parse_constraint_mode(const char* s) {
  std::string mode = required(s, "constraints");
  if (mode == "type") return mt::ConstraintMode::kType;
  if (mode == "type+token") return mt::ConstraintMode::kTypeAndToken;
  if (mode == "unambiguous") return mt::ConstraintMode::kUnambiguousType;
  throw UsageError("unknown constraint mode: " + mode);
}

mt::ModelKind parse_model_kind(const char* s) {
  std::string model = required(s, "model");
  if (model == "wsabie") return mt::ModelKind::kWsabie;
  if (model == "hmm") return mt::ModelKind::kHmm;
  throw UsageError("unknown model kind: " + model);
}

mt::EvalMode parse_eval_mode(const char* s) {
  std::string mode = required(s, "mode");
  if (mode == "standard") return mt::EvalMode::kStandard;
  if (mode == "intersected") return mt::EvalMode::kIntersected;
  if (mode == "pos") return mt::EvalMode::kPos;
  throw UsageError("unknown evaluation mode: " + mode);
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MT_OK;
  } catch (const UsageError& e) {
    g_last_error = e.what();
    return MT_USAGE_ERROR;
  } catch (const mt::ParseError& e) {
    g_last_error = e.what();
    return MT_DATA_ERROR;
  } catch (const mt::DataError& e) {
    g_last_error = e.what();
    return MT_DATA_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MT_DATA_ERROR;
  }
}

void fill_train_config(const mt_train_options& in, mt::TrainOptions& out) {
  out.model = parse_model_kind(in.model);
  out.embeddings_path = optional_str(in.embeddings);
  out.clusters_path = optional_str(in.clusters);
  out.max_train_tokens = in.max_train_tokens;
  out.max_sentence_length = in.max_sentence_length;
  out.model_out = required(in.model_out, "model_out");

  out.wsabie.joint_dim = in.joint_dim;
  out.wsabie.learning_rate = in.learning_rate;
  out.wsabie.margin = in.margin;
  out.wsabie.epochs = in.epochs;
  out.wsabie.norm_cap = in.norm_cap;
  out.wsabie.seed = in.seed;
  out.wsabie.uniform_rank_weight = in.uniform_rank_weight != 0;
  out.wsabie.embedding_dim = in.embedding_dim;
  out.wsabie.features.context = in.context;
  out.wsabie.features.cluster_window = in.cluster_window;

  out.hmm.l2_strength = in.l2_strength;
  out.hmm.lbfgs_memory = in.lbfgs_memory;
  out.hmm.max_iterations = in.max_iterations;
  out.hmm.convergence_tol = in.convergence_tol;
  out.hmm.rare_threshold = in.rare_threshold;
  out.hmm.shape_flags = in.shape_flags != 0;
  out.hmm.pos_pair_feature = in.pos_pair_feature != 0;
}

}  // namespace

extern "C" {

const char* mt_version(void) { return "morphtag 1.0.0"; }

const char* mt_last_error(void) { return g_last_error.c_str(); }

void mt_align_options_init(mt_align_options* options) {
  std::memset(options, 0, sizeof *options);
  options->iterations = 10;
}

int mt_align(const mt_align_options* options) {
  return guarded([&] {
    if (!options) throw UsageError("null options");
    mt::AlignOptions o;
    o.bitext_path = required(options->bitext, "bitext");
    if (options->iterations < 1) throw UsageError("iterations must be >= 1");
    o.iterations = options->iterations;
    o.forward_out = required(options->forward_out, "forward_out");
    o.reverse_out = required(options->reverse_out, "reverse_out");
    mt::run_align(o);
  });
}

void mt_project_options_init(mt_project_options* options) {
  std::memset(options, 0, sizeof *options);
  mt::ProjectionConfig defaults;
  options->alpha = defaults.alpha;
  options->beta = defaults.beta;
  options->max_train_tokens = defaults.max_train_tokens;
  options->constraints = "type";
}

int mt_project(const mt_project_options* options) {
  return guarded([&] {
    if (!options) throw UsageError("null options");
    mt::ProjectOptions o;
    o.bitext_path = required(options->bitext, "bitext");
    o.source_corpus_path = required(options->source_corpus, "source_corpus");
    o.forward_alignments_path =
        required(options->forward_alignments, "forward_alignments");
    o.reverse_alignments_path =
        required(options->reverse_alignments, "reverse_alignments");
    o.config.alpha = options->alpha;
    o.config.beta = options->beta;
    o.config.max_train_tokens = options->max_train_tokens;
    o.config.constraint_mode = parse_constraint_mode(options->constraints);
    o.dictionary_out = required(options->dictionary_out, "dictionary_out");
    o.lattices_out = required(options->lattices_out, "lattices_out");
    mt::run_project(o);
  });
}

void mt_cluster_options_init(mt_cluster_options* options) {
  std::memset(options, 0, sizeof *options);
  options->num_clusters = 256;
  options->max_words = 100000;
  options->max_iterations = 20;
}

int mt_cluster(const mt_cluster_options* options) {
  return guarded([&] {
    if (!options) throw UsageError("null options");
    mt::ClusterOptions o;
    o.corpus_path = required(options->corpus, "corpus");
    if (options->num_clusters < 1)
      throw UsageError("num_clusters must be >= 1");
    o.num_clusters = options->num_clusters;
    o.max_words = options->max_words;
    o.max_iterations = options->max_iterations;
    o.clusters_out = required(options->clusters_out, "clusters_out");
    mt::run_cluster(o);
  });
}

void mt_train_options_init(mt_train_options* options) {
  std::memset(options, 0, sizeof *options);
  options->model = "wsabie";
  options->constraints = "lattices";
  options->max_train_tokens = 2000000;
  options->max_sentence_length = mt::kDefaultMaxSentenceLength;

  mt::WsabieConfig w;
  options->joint_dim = w.joint_dim;
  options->learning_rate = w.learning_rate;
  options->margin = w.margin;
  options->epochs = w.epochs;
  options->norm_cap = w.norm_cap;
  options->seed = w.seed;
  options->uniform_rank_weight = 0;
  options->embedding_dim = w.embedding_dim;
  options->context = w.features.context;
  options->cluster_window = w.features.cluster_window;

  mt::HmmConfig h;
  options->l2_strength = h.l2_strength;
  options->lbfgs_memory = h.lbfgs_memory;
  options->max_iterations = h.max_iterations;
  options->convergence_tol = h.convergence_tol;
  options->rare_threshold = h.rare_threshold;
  options->shape_flags = h.shape_flags ? 1 : 0;
  options->pos_pair_feature = h.pos_pair_feature ? 1 : 0;
}

int mt_train(const mt_train_options* options) {
  return guarded([&] {
    if (!options) throw UsageError("null options");
    mt::TrainOptions o;
    fill_train_config(*options, o);
    std::string source = required(options->constraints, "constraints");
    if (source == "lattices") {
      o.source = mt::TrainSource::kLattices;
      o.lattices_path = required(options->lattices, "lattices");
    } else if (source == "oracle") {
      o.source = mt::TrainSource::kOracle;
      o.gold_corpus_path = required(options->gold_corpus, "gold_corpus");
    } else if (source == "gold") {
      o.source = mt::TrainSource::kGold;
      o.gold_corpus_path = required(options->gold_corpus, "gold_corpus");
    } else {
      throw UsageError("unknown training constraints: " + source);
    }
    mt::run_train(o);
  });
}

void mt_supervised_train_options_init(mt_supervised_train_options* options) {
  mt_train_options_init(&options->train);
  options->train.model = "hmm";
  options->first_n_tokens = -1;
  options->restrict_attributes = nullptr;
}

int mt_supervised_train(const mt_supervised_train_options* options) {
  return guarded([&] {
    if (!options) throw UsageError("null options");
    mt::SupervisedTrainOptions o;
    mt::TrainOptions base;
    fill_train_config(options->train, base);
    o.model = base.model;
    o.gold_corpus_path = required(options->train.gold_corpus, "gold_corpus");
    o.embeddings_path = base.embeddings_path;
    o.clusters_path = base.clusters_path;
    o.max_sentence_length = base.max_sentence_length;
    o.wsabie = base.wsabie;
    o.hmm = base.hmm;
    o.model_out = base.model_out;
    o.first_n_tokens = options->first_n_tokens;
    if (options->restrict_attributes) {
      o.restrict = true;
      std::stringstream ss(options->restrict_attributes);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) o.restrict_attributes.push_back(item);
    }
    mt::run_supervised_train(o);
  });
}

void mt_tag_options_init(mt_tag_options* options) {
  std::memset(options, 0, sizeof *options);
  options->input_is_raw = 1;
}

int mt_tag(const mt_tag_options* options) {
  return guarded([&] {
    if (!options) throw UsageError("null options");
    mt::TagOptions o;
    o.model_path = required(options->model, "model");
    o.input_path = required(options->input, "input");
    o.input_is_raw = options->input_is_raw != 0;
    o.embeddings_path = optional_str(options->embeddings);
    o.clusters_path = optional_str(options->clusters);
    o.dictionary_path = optional_str(options->dictionary);
    o.output_path = required(options->output, "output");
    mt::run_tag(o);
  });
}

void mt_evaluate_options_init(mt_evaluate_options* options) {
  std::memset(options, 0, sizeof *options);
  options->mode = "standard";
}

int mt_evaluate(const mt_evaluate_options* options, mt_eval_result* result) {
  return guarded([&] {
    if (!options) throw UsageError("null options");
    mt::EvaluateOptions o;
    o.mode = parse_eval_mode(options->mode);
    o.gold_path = required(options->gold, "gold");
    o.predicted_path = required(options->predicted, "predicted");
    o.source_train_path = optional_str(options->source_train);
    o.target_train_path = optional_str(options->target_train);
    if (o.mode != mt::EvalMode::kPos &&
        (o.source_train_path.empty() || o.target_train_path.empty()))
      throw UsageError(
          "standard/intersected evaluation needs source_train and "
          "target_train");
    o.include_unobserved_shared = options->include_unobserved_shared != 0;
    o.report_out = optional_str(options->report_out);
    mt::EvalReport report = mt::run_evaluate(o);
    if (result) {
      result->macro_f1 = report.macro_f1;
      result->pos_accuracy = report.pos_accuracy;
      result->tokens = report.token_count;
    }
  });
}

}  // extern "C"
