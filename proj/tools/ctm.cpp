// ctm: preprocess -> train -> infer -> evaluate from the command line.
//
// Exit status: 0 on success, 2 for usage errors and unreadable inputs,
// 1 for any other failure. Logging goes to stderr; set SPDLOG_LEVEL (e.g.
// SPDLOG_LEVEL=debug) to change verbosity. Results go to stdout or files.

#include <iostream>

#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

using namespace ctm::cli;

const std::map<std::string, ctm::InputMode> kModes = {{"contextual", ctm::InputMode::kContextual},
                                                      {"bow", ctm::InputMode::kBow},
                                                      {"combined", ctm::InputMode::kCombined}};

void setup_logging() {
  auto logger = spdlog::stderr_color_st("ctm");
  logger->set_pattern("%^[%l]%$ %v");
  spdlog::set_default_logger(logger);
  spdlog::cfg::load_env_levels();
}

std::map<std::string, Path> parse_languages(const std::vector<std::string>& specs) {
  std::map<std::string, Path> out;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
      throw UsageError("--lang expects LANG=PREDICTIONS, got '" + s + "'");
    }
    if (!out.emplace(s.substr(0, eq), s.substr(eq + 1)).second) {
      throw UsageError("--lang " + s.substr(0, eq) + " given twice");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Contextualized neural topic models with zero-shot cross-lingual inference"};
  bool show_version = false;
  app.add_flag("--version", show_version, "Print version information as JSON and exit");
  app.require_subcommand(0, 1);

  // preprocess
  PreprocessOptions pre;
  std::string pre_stopwords;
  auto* preprocess = app.add_subcommand("preprocess", "Truncate, build the vocabulary and write BoW records");
  preprocess->add_option("--input", pre.input, "Corpus JSONL ({id, lang, text} per line)")->required();
  preprocess->add_option("--lang", pre.lang, "Language code overriding the records' lang field");
  preprocess->add_option("--stopwords", pre_stopwords, "Stopword file, one token per line");
  preprocess->add_option("--vocab-size", pre.vocab_size, "Vocabulary size")->capture_default_str();
  preprocess->add_option("--max-tokens", pre.max_tokens, "Tokens kept per document")->capture_default_str();
  preprocess->add_option("--min-chars", pre.min_chars, "Drop documents shorter than this")->capture_default_str();
  preprocess->add_option("--out-dir", pre.out_dir, "Output directory")->required();

  // train
  TrainOptions tr;
  std::string tr_embeddings;
  auto* train = app.add_subcommand("train", "Train a topic model");
  train->add_option("--bow", tr.bow, "BoW JSONL from preprocess")->required();
  train->add_option("--vocab", tr.vocab, "Vocabulary file from preprocess")->required();
  train->add_option("--embeddings", tr_embeddings, "Document embeddings (CTME container)");
  train->add_option("--mode", tr.model.input_mode, "Encoder input")
      ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case))
      ->capture_default_str();
  train->add_option("--topics", tr.model.num_topics, "Number of topics")->capture_default_str();
  train->add_option("--epochs", tr.model.epochs, "Training epochs")->capture_default_str();
  train->add_option("--seed", tr.model.seed, "Random seed")->capture_default_str();
  train->add_option("--out", tr.out, "Checkpoint path")->required();
  train->add_option("--hidden", tr.model.hidden_sizes, "Encoder hidden layer widths")->capture_default_str();
  train->add_option("--dropout", tr.model.dropout_rate, "Dropout rate")->capture_default_str();
  train->add_option("--prior-alpha", tr.model.prior_alpha, "Symmetric Dirichlet concentration")
      ->capture_default_str();
  train->add_option("--lr", tr.model.learning_rate, "Adam learning rate")->capture_default_str();
  train->add_option("--beta1", tr.model.adam_beta1, "Adam first-moment decay")->capture_default_str();
  train->add_option("--beta2", tr.model.adam_beta2, "Adam second-moment decay")->capture_default_str();
  train->add_option("--adam-eps", tr.model.adam_eps, "Adam epsilon")->capture_default_str();
  train->add_option("--batch-size", tr.model.batch_size, "Minibatch size")->capture_default_str();
  train->add_flag("--learn-decoder-bn-scale", tr.model.learn_decoder_bn_scale,
                  "Train the decoder batchnorm scale instead of fixing it at 1");

  // infer
  InferOptions inf;
  std::string inf_embeddings, inf_bow;
  auto* infer = app.add_subcommand("infer", "Infer topic distributions for documents");
  infer->add_option("--model", inf.model, "Checkpoint")->required();
  infer->add_option("--embeddings", inf_embeddings, "Document embeddings (CTME container)");
  infer->add_option("--bow", inf_bow, "BoW JSONL (bow and combined models)");
  infer->add_option("--samples", inf.samples, "Posterior samples averaged per document")->capture_default_str();
  infer->add_option("--seed", inf.seed, "Random seed")->capture_default_str();
  infer->add_flag("--noiseless", inf.noiseless, "Use softmax of the posterior mean instead of sampling");
  infer->add_option("--out", inf.out, "Predictions JSONL")->required();

  // topics
  TopicsOptions top;
  std::string top_out;
  auto* topics = app.add_subcommand("topics", "Print the top words of every topic");
  topics->add_option("--model", top.model, "Checkpoint")->required();
  topics->add_option("--top-n", top.top_n, "Words per topic")->capture_default_str();
  topics->add_option("--out", top_out, "Also write the topics as JSON");

  // evaluate
  std::string eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluation metrics");
  evaluate->require_subcommand(1);
  evaluate->add_option("--out", eval_out, "Also write the result as JSON");

  MatchOptions match;
  auto* match_cmd = evaluate->add_subcommand("match", "Percentage of documents with the same top topic");
  match_cmd->add_option("--a", match.a, "Predictions JSONL")->required();
  match_cmd->add_option("--b", match.b, "Predictions JSONL")->required();

  KlOptions kl;
  auto* kl_cmd = evaluate->add_subcommand("kl", "Mean KL(p || q) over the documents of p");
  kl_cmd->add_option("--p", kl.p, "Predictions JSONL")->required();
  kl_cmd->add_option("--q", kl.q, "Predictions JSONL covering every id of --p")->required();
  kl_cmd->add_option("--epsilon", kl.epsilon, "Probability floor")->capture_default_str();

  CentroidOptions cd;
  auto* cd_cmd = evaluate->add_subcommand("cd", "Mean centroid similarity of the top topics' words");
  cd_cmd->add_option("--a", cd.a, "Predictions JSONL")->required();
  cd_cmd->add_option("--b", cd.b, "Predictions JSONL covering every id of --a")->required();
  cd_cmd->add_option("--model", cd.model, "Checkpoint supplying the topic words")->required();
  cd_cmd->add_option("--word-vectors", cd.word_vectors, "Word vectors (CTME container, ids = tokens)")
      ->required();
  cd_cmd->add_option("--top-n", cd.top_n, "Words per topic centroid")->capture_default_str();

  NpmiOptions np;
  auto* npmi_cmd = evaluate->add_subcommand("npmi", "NPMI topic coherence over document co-occurrence");
  npmi_cmd->add_option("--model", np.model, "Checkpoint")->required();
  npmi_cmd->add_option("--bow", np.bow, "Reference documents as BoW JSONL")->required();
  npmi_cmd->add_option("--top-n", np.top_n, "Words per topic")->capture_default_str();
  npmi_cmd->add_option("--epsilon", np.epsilon, "Smoothing of the joint probability")->capture_default_str();

  Ac1Options ac;
  auto* ac1_cmd = evaluate->add_subcommand("ac1", "Gwet's inter-rater agreement");
  ac1_cmd->add_option("--ratings", ac.ratings, "CSV with header item,rater,score")->required();
  ac1_cmd->add_option("--weights", ac.weights, "ordinal or identity")->capture_default_str();
  ac1_cmd->add_option("--categories", ac.categories, "Number of ordinal categories")->capture_default_str();

  ReportOptions rep;
  std::vector<std::string> rep_langs;
  std::string rep_model, rep_vectors;
  auto* report_cmd = evaluate->add_subcommand("report", "Per-language match, KL and centroid similarity");
  report_cmd->add_option("--english", rep.english, "English predictions JSONL")->required();
  report_cmd->add_option("--lang", rep_langs, "LANG=PREDICTIONS, repeatable");
  report_cmd->add_option("--model", rep_model, "Checkpoint supplying topic words (for centroid similarity)");
  report_cmd->add_option("--word-vectors", rep_vectors, "Word vectors (CTME container, ids = tokens)");
  report_cmd->add_option("--kl-direction", rep.kl_direction, "test-to-english or english-to-test")
      ->capture_default_str();
  report_cmd->add_option("--baseline-kl-direction", rep.baseline_kl_direction,
                         "uniform-to-english or english-to-uniform")
      ->capture_default_str();
  report_cmd->add_option("--centroid-words", rep.centroid_words, "Topic words per centroid")
      ->capture_default_str();
  report_cmd->add_option("--epsilon", rep.epsilon, "Probability floor for KL")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto optional_path = [](const std::string& s) -> std::optional<Path> {
    if (s.empty()) return std::nullopt;
    return Path(s);
  };

  try {
    if (show_version) {
      std::cout << version_json() << std::endl;
    } else if (*preprocess) {
      pre.stopwords = optional_path(pre_stopwords);
      run_preprocess(pre);
    } else if (*train) {
      tr.embeddings = optional_path(tr_embeddings);
      run_train(tr);
    } else if (*infer) {
      inf.embeddings = optional_path(inf_embeddings);
      inf.bow = optional_path(inf_bow);
      run_infer(inf);
    } else if (*topics) {
      top.out = optional_path(top_out);
      run_topics(top);
    } else if (*evaluate) {
      const auto out = optional_path(eval_out);
      if (*match_cmd) run_match(match, out);
      if (*kl_cmd) run_kl(kl, out);
      if (*cd_cmd) run_centroid(cd, out);
      if (*npmi_cmd) run_npmi(np, out);
      if (*ac1_cmd) run_ac1(ac, out);
      if (*report_cmd) {
        rep.languages = parse_languages(rep_langs);
        rep.model = optional_path(rep_model);
        rep.word_vectors = optional_path(rep_vectors);
        run_report(rep, out);
      }
    } else {
      std::cerr << app.help();
      return 2;
    }
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
