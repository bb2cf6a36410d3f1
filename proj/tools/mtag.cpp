// Command-line front end for the morphological tagging pipeline. All the
// work happens behind the C API; this file only parses flags and prints
// results. Configuration can also come from a key=value file via --config
// (flags win over the file).
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "morphtag.h"

namespace {

int report_status(int status) {
  if (status != MT_OK) std::fprintf(stderr, "mtag: %s\n", mt_last_error());
  return status;
}

void add_config_file(CLI::App* cmd) {
  cmd->set_config("--config", "", "key=value configuration file");
  cmd->add_flag("--threads", "worker cap (accepted for compatibility; the "
                             "implementation is single-threaded)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"morphological tagging pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mt_version()));

  // align
  mt_align_options align;
  mt_align_options_init(&align);
  std::string align_bitext, align_fwd, align_rev;
  CLI::App* align_cmd =
      app.add_subcommand("align", "word-align a bitext in both directions");
  align_cmd->add_option("--bitext", align_bitext,
                        "one pair per line: source tokens ||| target tokens")
      ->required();
  align_cmd->add_option("--iterations", align.iterations, "EM iterations")
      ->capture_default_str();
  align_cmd->add_option("--forward-out", align_fwd,
                        "forward alignment output (one link per target token)")
      ->required();
  align_cmd->add_option("--reverse-out", align_rev,
                        "reverse alignment output (one link per source token)")
      ->required();
  add_config_file(align_cmd);

  // project
  mt_project_options project;
  mt_project_options_init(&project);
  std::string proj_bitext, proj_source, proj_fwd, proj_rev, proj_constraints =
      "type", proj_dict, proj_lattices;
  CLI::App* project_cmd = app.add_subcommand(
      "project", "project source tags into a dictionary and lattices");
  project_cmd->add_option("--bitext", proj_bitext)->required();
  project_cmd
      ->add_option("--source-corpus", proj_source,
                   "tagged source corpus, line-parallel to the bitext")
      ->required();
  project_cmd->add_option("--forward", proj_fwd, "forward alignment file")
      ->required();
  project_cmd->add_option("--reverse", proj_rev, "reverse alignment file")
      ->required();
  project_cmd
      ->add_option("--alpha", project.alpha, "alignment posterior threshold")
      ->capture_default_str();
  project_cmd
      ->add_option("--beta", project.beta, "type distribution threshold")
      ->capture_default_str();
  project_cmd
      ->add_option("--max-tokens", project.max_train_tokens,
                   "whole-sentence training token budget")
      ->capture_default_str();
  project_cmd
      ->add_option("--constraints", proj_constraints,
                   "type | type+token | unambiguous")
      ->capture_default_str();
  project_cmd->add_option("--dictionary-out", proj_dict)->required();
  project_cmd->add_option("--lattices-out", proj_lattices)->required();
  add_config_file(project_cmd);

  // cluster
  mt_cluster_options cluster;
  mt_cluster_options_init(&cluster);
  std::string cluster_corpus, cluster_out;
  CLI::App* cluster_cmd =
      app.add_subcommand("cluster", "induce word clusters by class bigrams");
  cluster_cmd
      ->add_option("--corpus", cluster_corpus,
                   "raw text, one tokenized sentence per line")
      ->required();
  cluster_cmd->add_option("--clusters", cluster.num_clusters, "cluster count")
      ->capture_default_str();
  cluster_cmd
      ->add_option("--max-words", cluster.max_words,
                   "assign only the most frequent types")
      ->capture_default_str();
  cluster_cmd->add_option("--max-iterations", cluster.max_iterations)
      ->capture_default_str();
  cluster_cmd->add_option("--out", cluster_out)->required();
  add_config_file(cluster_cmd);

  // shared training flags
  mt_train_options train;
  mt_train_options_init(&train);
  std::string train_model = "wsabie", train_constraints = "lattices";
  std::string train_lattices, train_gold, train_embeddings, train_clusters,
      train_out;
  auto add_shared_train_flags = [&](CLI::App* cmd) {
    cmd->add_option("--model", train_model, "wsabie | hmm")
        ->capture_default_str();
    cmd->add_option("--embeddings", train_embeddings,
                    "word embedding file (ranking model)");
    cmd->add_option("--clusters", train_clusters, "word cluster file");
    cmd->add_option("--max-sentence-length", train.max_sentence_length)
        ->capture_default_str();
    cmd->add_option("--model-out", train_out)->required();
    cmd->add_option("--joint-dim", train.joint_dim)->capture_default_str();
    cmd->add_option("--learning-rate", train.learning_rate)
        ->capture_default_str();
    cmd->add_option("--margin", train.margin)->capture_default_str();
    cmd->add_option("--epochs", train.epochs)->capture_default_str();
    cmd->add_option("--norm-cap", train.norm_cap)->capture_default_str();
    cmd->add_option("--seed", train.seed)->capture_default_str();
    cmd->add_flag("--uniform-rank-weight", train.uniform_rank_weight,
                  "disable rank weighting (eta = 1)");
    cmd->add_option("--embedding-dim", train.embedding_dim)
        ->capture_default_str();
    cmd->add_option("--context", train.context, "embedding context window")
        ->capture_default_str();
    cmd->add_option("--cluster-window", train.cluster_window)
        ->capture_default_str();
    cmd->add_option("--l2", train.l2_strength, "L2 regularization strength")
        ->capture_default_str();
    cmd->add_option("--lbfgs-memory", train.lbfgs_memory)
        ->capture_default_str();
    cmd->add_option("--max-iterations", train.max_iterations)
        ->capture_default_str();
    cmd->add_option("--tol", train.convergence_tol)->capture_default_str();
    cmd->add_option("--rare-threshold", train.rare_threshold)
        ->capture_default_str();
    add_config_file(cmd);
  };

  // train
  CLI::App* train_cmd =
      app.add_subcommand("train", "train a tagger on constrained data");
  train_cmd
      ->add_option("--constraints", train_constraints,
                   "lattices | oracle | gold")
      ->capture_default_str();
  train_cmd->add_option("--lattices", train_lattices,
                        "lattice file from `project`");
  train_cmd->add_option("--gold-corpus", train_gold,
                        "annotated corpus (oracle/gold constraints)");
  train_cmd->add_option("--max-tokens", train.max_train_tokens)
      ->capture_default_str();
  add_shared_train_flags(train_cmd);

  // supervised-train
  mt_supervised_train_options supervised;
  mt_supervised_train_options_init(&supervised);
  long long first_n_tokens = -1;
  std::string restrict_attributes;
  CLI::App* supervised_cmd = app.add_subcommand(
      "supervised-train", "train on gold tags, optionally a prefix only");
  supervised_cmd->add_option("--gold-corpus", train_gold)->required();
  supervised_cmd->add_option("--first-n-tokens", first_n_tokens,
                             "train on the leading tokens only");
  supervised_cmd->add_option(
      "--restrict-attributes", restrict_attributes,
      "comma-separated attribute types to keep in the gold tags");
  train_model = "hmm";
  add_shared_train_flags(supervised_cmd);

  // tag
  mt_tag_options tag;
  mt_tag_options_init(&tag);
  std::string tag_model, tag_input, tag_embeddings, tag_clusters, tag_dict,
      tag_output, tag_format = "raw";
  CLI::App* tag_cmd = app.add_subcommand("tag", "tag text with a model");
  tag_cmd->add_option("--model", tag_model)->required();
  tag_cmd->add_option("--input", tag_input)->required();
  tag_cmd
      ->add_option("--input-format", tag_format,
                   "raw (one sentence per line) | conllu")
      ->capture_default_str();
  tag_cmd->add_option("--embeddings", tag_embeddings);
  tag_cmd->add_option("--clusters", tag_clusters);
  tag_cmd->add_option("--dict", tag_dict,
                      "decode-time dictionary constraints (HMM)");
  tag_cmd->add_option("--output", tag_output)->required();
  add_config_file(tag_cmd);

  // evaluate
  mt_evaluate_options evaluate;
  mt_evaluate_options_init(&evaluate);
  std::string eval_mode = "standard", eval_gold, eval_pred, eval_src_train,
      eval_tgt_train, eval_report;
  bool include_unobserved = false;
  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "score predictions against gold tags");
  eval_cmd->add_option("--mode", eval_mode, "standard | intersected | pos")
      ->capture_default_str();
  eval_cmd->add_option("--gold", eval_gold)->required();
  eval_cmd->add_option("--predicted", eval_pred)->required();
  eval_cmd->add_option("--source-train", eval_src_train,
                       "source-language training corpus (shared sets)");
  eval_cmd->add_option("--target-train", eval_tgt_train,
                       "target-language training corpus (shared sets)");
  eval_cmd->add_flag("--include-unobserved-shared", include_unobserved,
                     "average over all shared attribute types");
  eval_cmd->add_option("--report-out", eval_report);
  add_config_file(eval_cmd);

  CLI11_PARSE(app, argc, argv);

  if (align_cmd->parsed()) {
    align.bitext = align_bitext.c_str();
    align.forward_out = align_fwd.c_str();
    align.reverse_out = align_rev.c_str();
    return report_status(mt_align(&align));
  }
  if (project_cmd->parsed()) {
    project.bitext = proj_bitext.c_str();
    project.source_corpus = proj_source.c_str();
    project.forward_alignments = proj_fwd.c_str();
    project.reverse_alignments = proj_rev.c_str();
    project.constraints = proj_constraints.c_str();
    project.dictionary_out = proj_dict.c_str();
    project.lattices_out = proj_lattices.c_str();
    return report_status(mt_project(&project));
  }
  if (cluster_cmd->parsed()) {
    cluster.corpus = cluster_corpus.c_str();
    cluster.clusters_out = cluster_out.c_str();
    return report_status(mt_cluster(&cluster));
  }
  if (train_cmd->parsed()) {
    // train_model is shared with supervised-train, whose default differs.
    if (!train_cmd->count("--model")) train_model = "wsabie";
    train.model = train_model.c_str();
    train.constraints = train_constraints.c_str();
    train.lattices = train_lattices.empty() ? nullptr : train_lattices.c_str();
    train.gold_corpus = train_gold.empty() ? nullptr : train_gold.c_str();
    train.embeddings =
        train_embeddings.empty() ? nullptr : train_embeddings.c_str();
    train.clusters = train_clusters.empty() ? nullptr : train_clusters.c_str();
    train.model_out = train_out.c_str();
    return report_status(mt_train(&train));
  }
  if (supervised_cmd->parsed()) {
    if (!supervised_cmd->count("--model")) train_model = "hmm";
    supervised.train = train;
    supervised.train.model = train_model.c_str();
    supervised.train.gold_corpus = train_gold.c_str();
    supervised.train.embeddings =
        train_embeddings.empty() ? nullptr : train_embeddings.c_str();
    supervised.train.clusters =
        train_clusters.empty() ? nullptr : train_clusters.c_str();
    supervised.train.model_out = train_out.c_str();
    supervised.first_n_tokens = first_n_tokens;
    supervised.restrict_attributes = supervised_cmd->count("--restrict-attributes")
                                         ? restrict_attributes.c_str()
                                         : nullptr;
    return report_status(mt_supervised_train(&supervised));
  }
  if (tag_cmd->parsed()) {
    tag.model = tag_model.c_str();
    tag.input = tag_input.c_str();
    if (tag_format == "raw") {
      tag.input_is_raw = 1;
    } else if (tag_format == "conllu") {
      tag.input_is_raw = 0;
    } else {
      std::fprintf(stderr, "mtag: unknown input format: %s\n",
                   tag_format.c_str());
      return MT_USAGE_ERROR;
    }
    tag.embeddings = tag_embeddings.empty() ? nullptr : tag_embeddings.c_str();
    tag.clusters = tag_clusters.empty() ? nullptr : tag_clusters.c_str();
    tag.dictionary = tag_dict.empty() ? nullptr : tag_dict.c_str();
    tag.output = tag_output.c_str();
    return report_status(mt_tag(&tag));
  }
  if (eval_cmd->parsed()) {
    evaluate.mode = eval_mode.c_str();
    evaluate.gold = eval_gold.c_str();
    evaluate.predicted = eval_pred.c_str();
    evaluate.source_train =
        eval_src_train.empty() ? nullptr : eval_src_train.c_str();
    evaluate.target_train =
        eval_tgt_train.empty() ? nullptr : eval_tgt_train.c_str();
    evaluate.include_unobserved_shared = include_unobserved ? 1 : 0;
    evaluate.report_out = eval_report.empty() ? nullptr : eval_report.c_str();
    mt_eval_result result;
    // run_evaluate prints the per-attribute table on standard output.
    return report_status(mt_evaluate(&evaluate, &result));
  }
  return MT_USAGE_ERROR;
}
