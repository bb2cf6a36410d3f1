/* C interface to the morphological tagging pipeline.
 *
 * Every operation works at the file level: it reads its input files, writes
 * its output files plus a JSON run manifest next to the first output, and
 * returns a status code. On a nonzero status mt_last_error() describes the
 * problem for the calling thread.
 *
 * Each options struct has an _init function that fills in the defaults;
 * call it before overriding individual fields. String fields are borrowed
 * (never freed by the library); optional paths may be NULL.
 */
#ifndef MORPHTAG_H
#define MORPHTAG_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define MT_OK 0
#define MT_USAGE_ERROR 1 /* bad options: missing path, unknown mode, ... */
#define MT_DATA_ERROR 2  /* malformed or inconsistent input files */

const char* mt_version(void);

/* Message for the last failing call on this thread; "" when none. */
const char* mt_last_error(void);

/* ---- word alignment ---------------------------------------------------- */

typedef struct mt_align_options {
  const char* bitext;      /* "source tokens ||| target tokens" per line */
  int iterations;          /* EM iterations, default 10 */
  const char* forward_out; /* one best link per target token */
  const char* reverse_out; /* one best link per source token */
} mt_align_options;

void mt_align_options_init(mt_align_options* options);
int mt_align(const mt_align_options* options);

/* ---- tag projection ---------------------------------------------------- */

typedef struct mt_project_options {
  const char* bitext;
  const char* source_corpus; /* tagged corpus, line-parallel to the bitext */
  const char* forward_alignments;
  const char* reverse_alignments;
  double alpha;              /* alignment posterior threshold, default 0.8 */
  double beta;               /* type distribution threshold, default 0.3 */
  long long max_train_tokens; /* whole-sentence budget, default 2000000 */
  const char* constraints;   /* "type" | "type+token" | "unambiguous" */
  const char* dictionary_out;
  const char* lattices_out;
} mt_project_options;

void mt_project_options_init(mt_project_options* options);
int mt_project(const mt_project_options* options);

/* ---- word clustering --------------------------------------------------- */

typedef struct mt_cluster_options {
  const char* corpus; /* raw text, one tokenized sentence per line */
  int num_clusters;   /* default 256 */
  int max_words;      /* most frequent types assigned, default 100000 */
  int max_iterations; /* default 20 */
  const char* clusters_out;
} mt_cluster_options;

void mt_cluster_options_init(mt_cluster_options* options);
int mt_cluster(const mt_cluster_options* options);

/* ---- training ---------------------------------------------------------- */

typedef struct mt_train_options {
  const char* model;       /* "wsabie" | "hmm" */
  const char* constraints; /* "lattices" | "oracle" | "gold" */
  const char* lattices;    /* constraints == "lattices" */
  const char* gold_corpus; /* constraints == "oracle" | "gold" */
  const char* embeddings;  /* wsabie; NULL = zero embeddings */
  const char* clusters;    /* optional for both models */
  long long max_train_tokens;
  int max_sentence_length; /* corpus length cap, default 80 */

  /* ranking tagger */
  int joint_dim;
  double learning_rate;
  double margin;
  int epochs;
  double norm_cap;
  uint64_t seed;
  int uniform_rank_weight;
  int embedding_dim;
  int context;
  int cluster_window;

  /* feature HMM */
  double l2_strength;
  int lbfgs_memory;
  int max_iterations;
  double convergence_tol;
  long long rare_threshold;
  int shape_flags;
  int pos_pair_feature;

  const char* model_out;
} mt_train_options;

void mt_train_options_init(mt_train_options* options);
int mt_train(const mt_train_options* options);

typedef struct mt_supervised_train_options {
  /* constraints/lattices fields of `train` are ignored; gold_corpus,
   * model, hyperparameters and model_out are used. */
  mt_train_options train;
  long long first_n_tokens;        /* < 0: use the whole corpus */
  const char* restrict_attributes; /* comma-separated list, NULL = keep all */
} mt_supervised_train_options;

void mt_supervised_train_options_init(mt_supervised_train_options* options);
int mt_supervised_train(const mt_supervised_train_options* options);

/* ---- tagging ----------------------------------------------------------- */

typedef struct mt_tag_options {
  const char* model;
  const char* input;
  int input_is_raw;       /* 1: one sentence per line; 0: annotated corpus */
  const char* embeddings; /* ranking models */
  const char* clusters;   /* ranking models */
  const char* dictionary; /* optional decode-time constraints (HMM) */
  const char* output;     /* annotated corpus */
} mt_tag_options;

void mt_tag_options_init(mt_tag_options* options);
int mt_tag(const mt_tag_options* options);

/* ---- evaluation -------------------------------------------------------- */

typedef struct mt_evaluate_options {
  const char* mode; /* "standard" | "intersected" | "pos" */
  const char* gold;
  const char* predicted;
  const char* source_train; /* shared-set derivation; optional for "pos" */
  const char* target_train;
  int include_unobserved_shared;
  const char* report_out; /* NULL: no report file */
} mt_evaluate_options;

typedef struct mt_eval_result {
  double macro_f1;
  double pos_accuracy;
  long long tokens;
} mt_eval_result;

void mt_evaluate_options_init(mt_evaluate_options* options);
int mt_evaluate(const mt_evaluate_options* options, mt_eval_result* result);

#ifdef __cplusplus
}
#endif

#endif /* MORPHTAG_H */
