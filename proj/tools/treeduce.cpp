// Command-line front end: mine templates, reduce input, run a parser,
// reattach fragments, score, and benchmark, or do the whole experiment in
// one go.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "treeduce/conllu.h"
#include "treeduce/eval.h"
#include "treeduce/external.h"
#include "treeduce/miner.h"
#include "treeduce/parser.h"
#include "treeduce/pattern.h"
#include "treeduce/reattach.h"
#include "treeduce/reducer.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace treeduce;

namespace {

// Every knob a config file may preset; command-line flags override.
struct Defaults {
  double head_threshold = 83.0;
  double label_threshold = 83.0;
  bool bigrams = true;
  bool trigrams = true;
  long long min_count = 1;
  std::string tag_field = "upos";
  std::string mode = "bag";
  std::string priority = "confidence";
  int max_iterations = 1000;
  int batch_size = 1;
  int epochs = 5;
  unsigned seed = 1;
  int reps = 5;
  std::string throughput_basis = "original";
  double external_timeout = 600.0;
};

json defaults_to_json(const Defaults& d) {
  return json{{"head_threshold", d.head_threshold},
              {"label_threshold", d.label_threshold},
              {"bigrams", d.bigrams},
              {"trigrams", d.trigrams},
              {"min_count", d.min_count},
              {"tag_field", d.tag_field},
              {"mode", d.mode},
              {"priority", d.priority},
              {"max_iterations", d.max_iterations},
              {"batch_size", d.batch_size},
              {"epochs", d.epochs},
              {"seed", d.seed},
              {"reps", d.reps},
              {"throughput_basis", d.throughput_basis},
              {"external_timeout", d.external_timeout}};
}

void apply_config_file(Defaults& d, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error("config file " + path + ": " + e.what());
  }
  auto get = [&](const char* key, auto& slot) {
    if (doc.contains(key)) slot = doc.at(key).get<std::decay_t<decltype(slot)>>();
  };
  get("head_threshold", d.head_threshold);
  get("label_threshold", d.label_threshold);
  get("bigrams", d.bigrams);
  get("trigrams", d.trigrams);
  get("min_count", d.min_count);
  get("tag_field", d.tag_field);
  get("mode", d.mode);
  get("priority", d.priority);
  get("max_iterations", d.max_iterations);
  get("batch_size", d.batch_size);
  get("epochs", d.epochs);
  get("seed", d.seed);
  get("reps", d.reps);
  get("throughput_basis", d.throughput_basis);
  get("external_timeout", d.external_timeout);
}

// "2,3:83-83" -> n-gram selection plus both thresholds.
void apply_setup(const std::string& setup, MiningConfig& cfg) {
  const auto colon = setup.find(':');
  if (colon == std::string::npos)
    throw CLI::ValidationError("--setup expects \"2,3:83-83\"");
  const auto dash = setup.find('-', colon);
  if (dash == std::string::npos)
    throw CLI::ValidationError("--setup expects \"2,3:83-83\"");
  cfg.use_bigrams = false;
  cfg.use_trigrams = false;
  for (char c : setup.substr(0, colon)) {
    if (c == '2')
      cfg.use_bigrams = true;
    else if (c == '3')
      cfg.use_trigrams = true;
    else if (c != ',')
      throw CLI::ValidationError("--setup n-gram list may contain 2 and 3 only");
  }
  try {
    cfg.head_threshold = std::stod(setup.substr(colon + 1, dash - colon - 1));
    cfg.label_threshold = std::stod(setup.substr(dash + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--setup thresholds must be numbers");
  }
}

std::string setup_name(const MiningConfig& cfg) {
  std::string grams;
  if (cfg.use_bigrams) grams += "2";
  if (cfg.use_trigrams) grams += grams.empty() ? "3" : ",3";
  std::ostringstream out;
  out << grams << ':' << cfg.head_threshold << '-' << cfg.label_threshold;
  return out.str();
}

MiningConfig mining_config_from(const Defaults& d) {
  MiningConfig cfg;
  cfg.head_threshold = d.head_threshold;
  cfg.label_threshold = d.label_threshold;
  cfg.use_bigrams = d.bigrams;
  cfg.use_trigrams = d.trigrams;
  cfg.min_count = d.min_count;
  cfg.tag_field = d.tag_field == "xpos" ? TagField::Xpos : TagField::Upos;
  cfg.mode = d.mode == "iterative" ? MiningMode::Iterative : MiningMode::BagOfRules;
  cfg.priority = d.priority == "noun-proximity"
                     ? IterativePriority::NounProximity
                     : IterativePriority::ConfidenceFirst;
  cfg.max_iterations = d.max_iterations;
  cfg.batch_size = d.batch_size;
  return cfg;
}

struct ParserChoice {
  std::string model_path;    // built-in parser
  std::string external_cmd;  // external parser when non-empty
  std::string external_model;
  double timeout = 600.0;
  std::string workdir;

  bool is_external() const { return !external_cmd.empty(); }

  std::pair<Treebank, double> run(const Treebank& input,
                                  const BaselineModel* model) const {
    if (is_external()) {
      ExternalParserSpec spec;
      spec.command = external_cmd;
      spec.model_path = external_model;
      spec.timeout_seconds = timeout;
      spec.working_dir = workdir;
      return run_external(spec, input);
    }
    return parse_baseline(*model, input);
  }
};

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

int cmd_mine(const std::string& train_path, const std::string& out_path,
             const MiningConfig& cfg) {
  Treebank train = read_conllu_file(train_path, {.require_gold_trees = true});
  TemplateStore store = mine(train, cfg);
  store.provenance.source = train_path;
  save_store_file(store, out_path);
  long long dual_full = 0;
  for (const Template& t : store.templates)
    if (t.head_confidence == 100.0 && t.label_confidence == 100.0) ++dual_full;
  std::cout << "mined " << store.templates.size() << " templates (" << dual_full
            << " at dual 100% confidence) from " << train.word_count()
            << " words\n";
  return 0;
}

int cmd_reduce(const std::string& store_path, const std::string& in_path,
               const std::string& out_path, const std::string& sidecar_path,
               bool gold, bool strict) {
  TemplateStore store = load_store_file(store_path);
  Treebank input =
      read_conllu_file(in_path, {.require_gold_trees = gold || strict});
  ReducedTreebank red = (gold || strict) ? reduce_gold(input, store, strict)
                                         : reduce_input(input, store);
  write_conllu_file(red.treebank, out_path);
  if (!sidecar_path.empty()) save_records_file(red.records, sidecar_path);
  std::ostringstream pct;
  pct << std::fixed << std::setprecision(1) << red.reduction_pct();
  std::cout << "reduced " << red.original_words << " words to "
            << (red.original_words - red.removed_words) << " (" << pct.str()
            << "% removed)\n";
  return 0;
}

int cmd_train(const std::string& train_path, const std::string& model_path,
              int epochs, unsigned seed) {
  Treebank train = read_conllu_file(train_path, {.require_gold_trees = true});
  BaselineModel model = train_baseline(train, epochs, seed);
  save_model(model, model_path);
  std::cout << "trained " << epochs << " epochs on " << train.word_count()
            << " words; " << model.weights.size() << " features\n";
  return 0;
}

int cmd_parse(const std::string& in_path, const std::string& out_path,
              const ParserChoice& parser) {
  Treebank input = read_conllu_file(in_path);
  std::optional<BaselineModel> model;
  if (!parser.is_external()) model = load_model(parser.model_path);
  auto [output, seconds] = parser.run(input, model ? &*model : nullptr);
  write_conllu_file(output, out_path);
  std::cerr << "parsed " << input.word_count() << " words in " << seconds
            << "s\n";
  return 0;
}

// Non-tree parses (e.g. multi-root output from an external parser) are
// spliced mechanically; they still score arc by arc, but flag them.
void warn_non_trees(const Treebank& tb) {
  size_t bad = 0;
  for (const Sentence& sent : tb.sentences)
    if (!sent.tokens.empty() && !sent.unsupported && !is_single_rooted_tree(sent))
      ++bad;
  if (bad > 0)
    std::cerr << "warning: " << bad
              << " reattached sentence(s) are not single-rooted trees\n";
}

int cmd_reattach(const std::string& parsed_path, const std::string& sidecar_path,
                 const std::string& out_path) {
  Treebank parsed = read_conllu_file(parsed_path);
  std::vector<SentenceReduction> records = load_records_file(sidecar_path);
  Treebank restored = reattach(parsed, records);
  warn_non_trees(restored);
  write_conllu_file(restored, out_path);
  std::cout << "reattached " << restored.word_count() << " words\n";
  return 0;
}

int cmd_eval(const std::string& system_path, const std::string& gold_path,
             const std::string& json_path) {
  Treebank system = read_conllu_file(system_path);
  Treebank gold = read_conllu_file(gold_path);
  EvalReport report = score(system, gold);
  report.setup = system_path;
  std::ostringstream line;
  line << std::fixed << std::setprecision(2) << "UAS " << report.uas << "  LAS "
       << report.las << "  (" << report.counts.correct_heads << "/"
       << report.counts.total_words << " heads)\n";
  std::cout << line.str();
  if (!json_path.empty()) write_text_file(json_path, report_to_json({report}));
  return 0;
}

struct SplitResult {
  EvalReport baseline;
  EvalReport technique;
};

SplitResult run_split(const std::string& name, const Treebank& gold,
                      const TemplateStore& store, const ParserChoice& base_parser,
                      const ParserChoice& tech_parser, const BaselineModel* full,
                      const BaselineModel* reduced_model, int reps,
                      bool basis_original, const std::string& out_dir,
                      const std::string& setup) {
  const long long original_words = static_cast<long long>(gold.word_count());

  BenchmarkRun base_run = benchmark_parse(
      [&]() { return base_parser.run(gold, full); }, reps, original_words);
  write_conllu_file(base_run.output,
                    (fs::path(out_dir) / (name + ".baseline.conllu")).string());

  const auto reduce_started = std::chrono::steady_clock::now();
  ReducedTreebank red = reduce_input(gold, store);
  double overhead = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - reduce_started)
                        .count();
  write_conllu_file(red.treebank,
                    (fs::path(out_dir) / (name + ".reduced.conllu")).string());
  save_records_file(red.records,
                    (fs::path(out_dir) / (name + ".sidecar.json")).string());

  const long long basis =
      basis_original ? original_words : original_words - red.removed_words;
  BenchmarkRun tech_run = benchmark_parse(
      [&]() { return tech_parser.run(red.treebank, reduced_model); }, reps,
      basis);
  write_conllu_file(tech_run.output,
                    (fs::path(out_dir) / (name + ".parsed.conllu")).string());

  const auto reattach_started = std::chrono::steady_clock::now();
  Treebank restored = reattach(tech_run.output, red.records);
  overhead += std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            reattach_started)
                  .count();
  warn_non_trees(restored);
  write_conllu_file(restored,
                    (fs::path(out_dir) / (name + ".reattached.conllu")).string());

  SplitResult result;
  result.baseline = score(base_run.output, gold);
  result.baseline.setup = "baseline";
  result.baseline.timing = base_run.timing;

  result.technique = score(restored, gold);
  result.technique.setup = setup;
  result.technique.word_reduction_pct = red.reduction_pct();
  result.technique.timing = tech_run.timing;
  result.technique.speedup = tech_run.timing.mean_tokens_per_sec /
                             base_run.timing.mean_tokens_per_sec;
  result.technique.overhead_seconds = overhead;
  return result;
}

int cmd_pipeline(const std::string& train_path, const std::string& dev_path,
                 const std::string& test_path, const std::string& out_dir,
                 const MiningConfig& cfg, const ParserChoice& parser_full,
                 const ParserChoice& parser_reduced, int epochs, unsigned seed,
                 int reps, bool basis_original, bool strict) {
  fs::create_directories(out_dir);

  Treebank train = read_conllu_file(train_path, {.require_gold_trees = true});
  TemplateStore store = mine(train, cfg);
  store.provenance.source = train_path;
  const std::string store_path = (fs::path(out_dir) / "store.json").string();
  save_store_file(store, store_path);
  std::cout << "mined " << store.templates.size() << " templates -> "
            << store_path << "\n";

  ReducedTreebank red_train = reduce_gold(train, store, strict);
  write_conllu_file(red_train.treebank,
                    (fs::path(out_dir) / "train.reduced.conllu").string());
  save_records_file(red_train.records,
                    (fs::path(out_dir) / "train.sidecar.json").string());
  std::ostringstream train_pct;
  train_pct << std::fixed << std::setprecision(1) << red_train.reduction_pct();
  std::cout << "reduced training set by " << train_pct.str() << "%\n";

  std::optional<BaselineModel> model_full, model_reduced;
  if (!parser_full.is_external()) {
    model_full = train_baseline(train, epochs, seed);
    save_model(*model_full, (fs::path(out_dir) / "model.full.json").string());
    model_reduced = train_baseline(red_train.treebank, epochs, seed);
    save_model(*model_reduced,
               (fs::path(out_dir) / "model.reduced.json").string());
    std::cout << "trained built-in models (" << epochs << " epochs)\n";
  }

  const std::string setup = setup_name(cfg);
  std::vector<EvalReport> all_reports;
  std::ostringstream text_report;
  const std::vector<std::pair<std::string, std::string>> splits = {
      {"dev", dev_path}, {"test", test_path}};
  for (const auto& [name, path] : splits) {
    if (path.empty()) continue;
    Treebank gold = read_conllu_file(path);
    SplitResult result =
        run_split(name, gold, store, parser_full, parser_reduced,
                  model_full ? &*model_full : nullptr,
                  model_reduced ? &*model_reduced : nullptr, reps,
                  basis_original, out_dir, setup);
    result.baseline.setup = name + " baseline";
    result.technique.setup = name + " " + setup;
    text_report << render_table({result.baseline, result.technique}) << "\n";
    all_reports.push_back(result.baseline);
    all_reports.push_back(result.technique);
  }

  write_text_file((fs::path(out_dir) / "report.txt").string(),
                  text_report.str());
  write_text_file((fs::path(out_dir) / "report.json").string(),
                  report_to_json(all_reports));
  std::cout << "\n" << text_report.str();
  return 0;
}

int cmd_bench(const std::string& in_path, const std::string& store_path,
              const ParserChoice& parser_full, const ParserChoice& parser_reduced,
              int reps, bool basis_original, const std::string& json_path,
              const std::string& out_dir) {
  fs::create_directories(out_dir);
  Treebank gold = read_conllu_file(in_path);
  TemplateStore store = load_store_file(store_path);

  std::optional<BaselineModel> model_full, model_reduced;
  if (!parser_full.is_external()) model_full = load_model(parser_full.model_path);
  if (!parser_reduced.is_external())
    model_reduced = load_model(parser_reduced.model_path);

  SplitResult result = run_split(
      "bench", gold, store, parser_full, parser_reduced,
      model_full ? &*model_full : nullptr,
      model_reduced ? &*model_reduced : nullptr, reps, basis_original, out_dir,
      "reduced");
  std::string table = render_table({result.baseline, result.technique});
  std::cout << table;
  if (!json_path.empty())
    write_text_file(json_path,
                    report_to_json({result.baseline, result.technique}));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Defaults d;
  // Config file (lowest precedence): --config or TREEDUCE_CONFIG.
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc)
      config_path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      config_path = arg.substr(9);
  }
  if (config_path.empty())
    if (const char* env = std::getenv("TREEDUCE_CONFIG")) config_path = env;
  try {
    if (!config_path.empty()) apply_config_file(d, config_path);
  } catch (const std::exception& e) {
    std::cerr << "treeduce: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Template-based parser input reduction toolkit"};
  std::string config_dummy;
  app.add_option("--config", config_dummy, "JSON config file with defaults");
  bool show_config = false;
  app.add_flag("--show-config", show_config,
               "print the effective defaults and exit");

  std::string setup;
  auto add_mining_flags = [&](CLI::App* sub) {
    sub->add_option("--head-threshold", d.head_threshold,
                    "dominant head pattern confidence threshold (%)");
    sub->add_option("--label-threshold", d.label_threshold,
                    "dominant label pattern confidence threshold (%)");
    sub->add_flag("--bigrams,!--no-bigrams", d.bigrams, "use bigram keys");
    sub->add_flag("--trigrams,!--no-trigrams", d.trigrams, "use trigram keys");
    sub->add_option("--min-count", d.min_count, "minimum key frequency");
    sub->add_option("--tag-field", d.tag_field, "upos or xpos")
        ->check(CLI::IsMember({"upos", "xpos"}));
    sub->add_option("--mode", d.mode, "bag or iterative")
        ->check(CLI::IsMember({"bag", "iterative"}));
    sub->add_option("--priority", d.priority,
                    "iterative candidate priority: confidence or noun-proximity")
        ->check(CLI::IsMember({"confidence", "noun-proximity"}));
    sub->add_option("--max-iterations", d.max_iterations,
                    "iterative mode iteration cap");
    sub->add_option("--batch-size", d.batch_size,
                    "templates per iteration in iterative mode");
    sub->add_option("--setup", setup, "shorthand like 2,3:83-83");
  };

  auto* mine_cmd = app.add_subcommand("mine", "mine templates from a treebank");
  mine_cmd->fallthrough();
  std::string train_path, out_path;
  mine_cmd->add_option("--train", train_path, "gold training CoNLL-U")
      ->required();
  mine_cmd->add_option("--out", out_path, "template store output path")
      ->required();
  add_mining_flags(mine_cmd);

  auto* reduce_cmd = app.add_subcommand("reduce", "apply a store to an input");
  reduce_cmd->fallthrough();
  std::string store_path, in_path, sidecar_path, reduce_out;
  bool gold_flag = false, strict_flag = false;
  reduce_cmd->add_option("--store", store_path, "template store")->required();
  reduce_cmd->add_option("--in", in_path, "input CoNLL-U")->required();
  reduce_cmd->add_option("--out", reduce_out, "reduced CoNLL-U")->required();
  reduce_cmd->add_option("--sidecar", sidecar_path, "reduction record output");
  reduce_cmd->add_flag("--gold", gold_flag,
                       "treat input as gold training data (repair trees)");
  reduce_cmd->add_flag("--strict-gold", strict_flag,
                       "skip matches that disagree with gold");

  auto* train_cmd = app.add_subcommand("train", "train the built-in parser");
  train_cmd->fallthrough();
  std::string model_path;
  train_cmd->add_option("--train", train_path, "gold training CoNLL-U")
      ->required();
  train_cmd->add_option("--model", model_path, "model output path")->required();
  train_cmd->add_option("--epochs", d.epochs, "training epochs");
  train_cmd->add_option("--seed", d.seed, "shuffle seed");

  auto* parse_cmd = app.add_subcommand("parse", "parse a CoNLL-U file");
  parse_cmd->fallthrough();
  std::string parse_out, external_cmd, external_model, workdir;
  parse_cmd->add_option("--in", in_path, "input CoNLL-U")->required();
  parse_cmd->add_option("--out", parse_out, "output CoNLL-U")->required();
  parse_cmd->add_option("--model", model_path, "built-in parser model");
  parse_cmd->add_option("--external-cmd", external_cmd,
                        "external command with {input} {output} {model}");
  parse_cmd->add_option("--external-model", external_model,
                        "substituted for {model}");
  parse_cmd->add_option("--timeout", d.external_timeout,
                        "external command timeout (s)");
  parse_cmd->add_option("--workdir", workdir, "external command working dir");

  auto* reattach_cmd =
      app.add_subcommand("reattach", "splice fragments back into a parse");
  reattach_cmd->fallthrough();
  std::string parsed_path, reattach_out;
  reattach_cmd->add_option("--parsed", parsed_path, "parsed reduced CoNLL-U")
      ->required();
  reattach_cmd->add_option("--sidecar", sidecar_path, "reduction records")
      ->required();
  reattach_cmd->add_option("--out", reattach_out, "restored CoNLL-U")
      ->required();

  auto* eval_cmd = app.add_subcommand("eval", "score a parse against gold");
  eval_cmd->fallthrough();
  std::string system_path, gold_path, json_out;
  eval_cmd->add_option("--system", system_path, "system CoNLL-U")->required();
  eval_cmd->add_option("--gold", gold_path, "gold CoNLL-U")->required();
  eval_cmd->add_option("--json", json_out, "machine-readable report path");

  auto* bench_cmd =
      app.add_subcommand("bench", "compare full vs reduced parsing speed");
  bench_cmd->fallthrough();
  std::string model_full_path, model_reduced_path, ext_model_full,
      ext_model_reduced, bench_dir;
  bench_cmd->add_option("--in", in_path, "gold input CoNLL-U")->required();
  bench_cmd->add_option("--store", store_path, "template store")->required();
  bench_cmd->add_option("--model-full", model_full_path,
                        "built-in model trained on the full set");
  bench_cmd->add_option("--model-reduced", model_reduced_path,
                        "built-in model trained on the reduced set");
  bench_cmd->add_option("--external-cmd", external_cmd,
                        "external command with {input} {output} {model}");
  bench_cmd->add_option("--external-model-full", ext_model_full,
                        "{model} for the baseline run");
  bench_cmd->add_option("--external-model-reduced", ext_model_reduced,
                        "{model} for the reduced run");
  bench_cmd->add_option("--timeout", d.external_timeout, "external timeout (s)");
  bench_cmd->add_option("--reps", d.reps, "timed repetitions after warm-up");
  bench_cmd
      ->add_option("--throughput-basis", d.throughput_basis,
                   "tokens/sec numerator: original or reduced")
      ->check(CLI::IsMember({"original", "reduced"}));
  bench_cmd->add_option("--json", json_out, "machine-readable report path");
  bench_cmd->add_option("--out-dir", bench_dir, "artifact directory");

  auto* pipe_cmd =
      app.add_subcommand("pipeline", "mine, reduce, train, parse, score");
  pipe_cmd->fallthrough();
  std::string dev_path, test_path, out_dir;
  pipe_cmd->add_option("--train", train_path, "gold training CoNLL-U")
      ->required();
  pipe_cmd->add_option("--dev", dev_path, "gold development CoNLL-U")
      ->required();
  pipe_cmd->add_option("--test", test_path, "gold test CoNLL-U");
  pipe_cmd->add_option("--out-dir", out_dir, "artifact directory")->required();
  add_mining_flags(pipe_cmd);
  pipe_cmd->add_option("--epochs", d.epochs, "built-in parser epochs");
  pipe_cmd->add_option("--seed", d.seed, "built-in parser seed");
  pipe_cmd->add_option("--reps", d.reps, "timed repetitions after warm-up");
  pipe_cmd
      ->add_option("--throughput-basis", d.throughput_basis,
                   "tokens/sec numerator: original or reduced")
      ->check(CLI::IsMember({"original", "reduced"}));
  pipe_cmd->add_option("--external-cmd", external_cmd,
                       "use an external parser instead of the built-in");
  pipe_cmd->add_option("--external-model-full", ext_model_full,
                       "{model} for baseline runs");
  pipe_cmd->add_option("--external-model-reduced", ext_model_reduced,
                       "{model} for reduced runs");
  pipe_cmd->add_option("--timeout", d.external_timeout, "external timeout (s)");
  pipe_cmd->add_flag("--strict-gold", strict_flag,
                     "skip gold-disagreeing matches when reducing training data");

  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (show_config) {
    std::cout << defaults_to_json(d).dump(2) << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 2;
  }

  try {
    MiningConfig cfg = mining_config_from(d);
    if (!setup.empty()) apply_setup(setup, cfg);

    if (*mine_cmd) return cmd_mine(train_path, out_path, cfg);
    if (*reduce_cmd)
      return cmd_reduce(store_path, in_path, reduce_out, sidecar_path,
                        gold_flag, strict_flag);
    if (*train_cmd) return cmd_train(train_path, model_path, d.epochs, d.seed);
    if (*parse_cmd) {
      ParserChoice parser;
      parser.model_path = model_path;
      parser.external_cmd = external_cmd;
      parser.external_model = external_model;
      parser.timeout = d.external_timeout;
      parser.workdir = workdir;
      if (!parser.is_external() && model_path.empty())
        throw CLI::ValidationError("parse needs --model or --external-cmd");
      return cmd_parse(in_path, parse_out, parser);
    }
    if (*reattach_cmd)
      return cmd_reattach(parsed_path, sidecar_path, reattach_out);
    if (*eval_cmd) return cmd_eval(system_path, gold_path, json_out);
    if (*bench_cmd) {
      ParserChoice full, reduced;
      full.external_cmd = reduced.external_cmd = external_cmd;
      full.timeout = reduced.timeout = d.external_timeout;
      full.external_model = ext_model_full;
      reduced.external_model = ext_model_reduced;
      full.model_path =
          model_full_path.empty() ? model_reduced_path : model_full_path;
      reduced.model_path =
          model_reduced_path.empty() ? model_full_path : model_reduced_path;
      if (!full.is_external() && full.model_path.empty())
        throw CLI::ValidationError(
            "bench needs --model-full/--model-reduced or --external-cmd");
      if (bench_dir.empty()) bench_dir = fs::temp_directory_path().string();
      return cmd_bench(in_path, store_path, full, reduced, d.reps,
                       d.throughput_basis == "original", json_out, bench_dir);
    }
    if (*pipe_cmd) {
      ParserChoice full, reduced;
      full.external_cmd = reduced.external_cmd = external_cmd;
      full.timeout = reduced.timeout = d.external_timeout;
      full.external_model = ext_model_full;
      reduced.external_model = ext_model_reduced;
      return cmd_pipeline(train_path, dev_path, test_path, out_dir, cfg, full,
                          reduced, d.epochs, d.seed, d.reps,
                          d.throughput_basis == "original", strict_flag);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "treeduce: " << e.what() << "\n";
    return 2;
  } catch (const ConlluError& e) {
    std::cerr << "treeduce: treebank-io: " << e.what() << "\n";
    return 1;
  } catch (const MinerError& e) {
    std::cerr << "treeduce: template-miner: " << e.what() << "\n";
    return 1;
  } catch (const ReducerError& e) {
    std::cerr << "treeduce: reducer: " << e.what() << "\n";
    return 1;
  } catch (const ReattachError& e) {
    std::cerr << "treeduce: reattacher: " << e.what() << "\n";
    return 1;
  } catch (const ParserError& e) {
    std::cerr << "treeduce: parser: " << e.what() << "\n";
    return 1;
  } catch (const ExternalError& e) {
    std::cerr << "treeduce: parser-bridge: " << e.what() << "\n";
    return 1;
  } catch (const EvalError& e) {
    std::cerr << "treeduce: eval: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "treeduce: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
