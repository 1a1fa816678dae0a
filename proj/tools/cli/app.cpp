#include "app.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "adapt/eval/experiments.hpp"
#include "adapt/graph/edge_io.hpp"
#include "adapt/graph/split.hpp"
#include "adapt/graph/synth.hpp"
#include "adapt/model/checkpoint.hpp"
#include "adapt/props/properties.hpp"
#include "adapt/train/trainer.hpp"
#include "adapt/util/error.hpp"
#include "adapt/util/parallel.hpp"
#include "adapt/util/text.hpp"
#include "config.hpp"

namespace fs = std::filesystem;

namespace adapt::cli {

namespace {

/// A required input path that does not exist.
class MissingInput : public Error {
 public:
  explicit MissingInput(const std::string& path) : Error("input file not found: " + path) {}
};

void require_file(const std::string& path) {
  std::error_code ec;
  if (path.empty() || !fs::exists(path, ec)) throw MissingInput(path);
}

/// Regular files named by `paths`; directories expand to their files in
/// name order.
std::vector<std::string> expand_inputs(const std::vector<std::string>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) {
    require_file(p);
    if (fs::is_directory(p)) {
      std::vector<std::string> files;
      for (const auto& entry : fs::directory_iterator(p))
        if (entry.is_regular_file()) files.push_back(entry.path().string());
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.push_back(p);
    }
  }
  if (out.empty()) throw ConfigError("no input graphs found");
  return out;
}

bool is_manifest(const std::string& path) {
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  return first.rfind("# adapt-manifest", 0) == 0;
}

/// Edge list or manifest; a manifest contributes only its training edges.
BipartiteGraph load_training_graph(const std::string& path) {
  require_file(path);
  if (is_manifest(path)) return read_manifest_file(path).train_graph();
  return load_edge_list_file(path);
}

BipartiteGraph load_full_graph(const std::string& path) {
  require_file(path);
  if (is_manifest(path)) return read_manifest_file(path).graph;
  return load_edge_list_file(path);
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y%m%d-%H%M%S");
  return s.str();
}

fs::path make_run_dir(const fs::path& root, const std::string& command) {
  fs::create_directories(root);
  const std::string base = command + "-" + timestamp();
  for (int k = 1;; ++k) {
    fs::path dir = root / (k == 1 ? base : base + "-" + std::to_string(k));
    if (fs::create_directory(dir)) return dir;
  }
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  fn(out);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

/// Writes the artifact into the run directory and, when requested, to an
/// extra path.
template <typename Fn>
void publish(const fs::path& run_dir, const std::string& name, const std::string& extra, Fn&& fn) {
  write_file(run_dir / name, fn);
  if (!extra.empty()) {
    const fs::path p(extra);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_file(p, fn);
  }
}

struct Binding {
  std::string path;
  std::string value;
  CLI::Option* option{nullptr};
};

struct Command {
  CLI::App* app{nullptr};
  std::string config_file;
  std::vector<std::string> sets;
  std::string run_dir;
  std::string threads;
  std::string out;
};

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  Command& add_command(const std::string& name, const std::string& help);
  void bind(Command& c, const std::string& flag, const std::string& path, const std::string& help);
  Json resolve(const Command& c) const;
  fs::path start_run(const std::string& name, Json& cfg, const Command& c);

  void cmd_synth(const Command& c);
  void cmd_prepare(const Command& c);
  void cmd_props(const Command& c);
  void cmd_pretrain(const Command& c);
  void cmd_finetune(const Command& c);
  void cmd_eval(const Command& c);
  void cmd_ablation(const Command& c);

  std::ostream& out_;
  std::ostream& err_;
  CLI::App app_{"Graph-adaptive recommendation models: data preparation, pre-training, fine-tuning and evaluation"};
  std::deque<Command> commands_;
  std::deque<Binding> bindings_;
  std::vector<std::pair<const Command*, Binding*>> bound_;

  // Command-specific inputs.
  std::string input_;
  std::vector<std::string> corpus_;
  std::string checkpoint_;
  std::string manifest_;
  std::string target_;
  std::string scorer_{"model"};
  std::string partition_{"test"};
  bool no_adaptor_{false};
};

Command& Cli::add_command(const std::string& name, const std::string& help) {
  auto& c = commands_.emplace_back();
  c.app = app_.add_subcommand(name, help);
  c.app->add_option("--config", c.config_file, "JSON config file (flags override it)");
  c.app->add_option("--set", c.sets, "Override any config entry, e.g. --set model.dropout=0.2")->take_all();
  c.app->add_option("--run-dir", c.run_dir, "Root for timestamped run directories (env ADAPT_RUN_DIR)");
  c.app->add_option("--threads", c.threads, "Worker thread cap, 0 = all cores (env ADAPT_THREADS)");
  return c;
}

void Cli::bind(Command& c, const std::string& flag, const std::string& path, const std::string& help) {
  auto& b = bindings_.emplace_back();
  b.path = path;
  b.option = c.app->add_option(flag, b.value, help + " [" + path + "]");
  bound_.emplace_back(&c, &b);
}

Json Cli::resolve(const Command& c) const {
  Json cfg = default_config();
  if (!c.config_file.empty()) {
    require_file(c.config_file);
    std::ifstream in(c.config_file);
    Json file;
    try {
      file = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError("cannot parse " + c.config_file + ": " + e.what());
    }
    merge_config(cfg, file);
  }
  if (const char* env = std::getenv("ADAPT_RUN_DIR"); env && *env) cfg["run"]["dir"] = std::string(env);
  if (const char* env = std::getenv("ADAPT_THREADS"); env && *env) set_config_value(cfg, "run.threads", env);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& [cmd, b] : bound_)
    if (cmd == &c && b->option->count() > 0) set_config_value(cfg, b->path, b->value);
  if (!c.run_dir.empty()) cfg["run"]["dir"] = c.run_dir;
  if (!c.threads.empty()) set_config_value(cfg, "run.threads", c.threads);
  return cfg;
}

fs::path Cli::start_run(const std::string& name, Json& cfg, const Command& c) {
  (void)c;
  const fs::path dir = make_run_dir(cfg.at("run").at("dir").get<std::string>(), name);
  set_thread_cap(cfg.at("run").at("threads").get<unsigned>());

  auto console = std::make_shared<spdlog::sinks::ostream_sink_mt>(err_);
  console->set_pattern("[%l] %v");
  auto file = std::make_shared<spdlog::sinks::basic_file_sink_mt>((dir / "log.txt").string(), true);
  file->set_pattern("%Y-%m-%d %H:%M:%S.%e [%l] %v");
  auto logger = std::make_shared<spdlog::logger>("adapt", spdlog::sinks_init_list{console, file});
  logger->set_level(spdlog::level::info);
  logger->flush_on(spdlog::level::info);
  spdlog::set_default_logger(logger);

  write_file(dir / "config.json", [&](std::ostream& o) { o << cfg.dump(2) << '\n'; });
  spdlog::info("{} run in {}", name, dir.string());
  return dir;
}

void Cli::cmd_synth(const Command& c) {
  Json cfg = resolve(c);
  const auto sc = synth_config(cfg);
  sc.validate();
  const auto dir = start_run("synth", cfg, c);
  const auto g = gen_synthetic(sc);
  publish(dir, "graph.tsv", c.out, [&](std::ostream& o) { write_edge_list(o, g); });
  out_ << "users " << g.user_count() << "\nitems " << g.item_count() << "\nedges " << g.edge_count()
       << "\nrun_dir " << dir.string() << '\n';
}

void Cli::cmd_prepare(const Command& c) {
  Json cfg = resolve(c);
  require_file(input_);
  const double val = cfg["split"]["val_frac"].get<double>();
  const double test = cfg["split"]["test_frac"].get<double>();
  const double keep = cfg["split"]["keep_frac"].get<double>();
  const auto seed = cfg["split"]["seed"].get<std::uint64_t>();
  const auto dir = start_run("prepare", cfg, c);

  Manifest m;
  m.graph = load_full_graph(input_);
  m.split = split_dataset(m.graph, val, test, seed);
  if (keep < 1.0) m.split = sparsify_train(m.split, keep, derive_seed(seed, {0x5a}));
  m.meta = {{"source", fs::path(input_).filename().string()},
            {"val_frac", format_exact(val)},
            {"test_frac", format_exact(test)},
            {"keep_frac", format_exact(keep)},
            {"seed", std::to_string(seed)}};
  publish(dir, "manifest.tsv", c.out, [&](std::ostream& o) { write_manifest(o, m); });
  out_ << "users " << m.graph.user_count() << "\nitems " << m.graph.item_count() << "\nedges "
       << m.graph.edge_count() << "\ndensity " << format_exact(compute_properties(m.graph).density) << "\ntrain "
       << m.split.train.size() << "\nval " << m.split.val.size() << "\ntest " << m.split.test.size()
       << "\nrun_dir " << dir.string() << '\n';
}

void Cli::cmd_props(const Command& c) {
  Json cfg = resolve(c);
  if (input_.empty() == corpus_.empty()) throw ConfigError("props needs exactly one of --input or --corpus");
  if (!input_.empty()) require_file(input_);
  const auto files = corpus_.empty() ? std::vector<std::string>{} : expand_inputs(corpus_);
  const auto dir = start_run("props", cfg, c);
  if (!input_.empty()) {
    const auto pv = compute_properties(load_training_graph(input_));
    publish(dir, "properties.txt", c.out, [&](std::ostream& o) { write_properties(o, pv); });
    write_properties(out_, pv);
  } else {
    std::vector<PropertyVector> props;
    for (const auto& f : files) {
      props.push_back(compute_properties(load_training_graph(f)));
      spdlog::info("{}: {} nodes, {} edges", f, props.back().node_count, props.back().edge_count);
    }
    const auto stats = fit_norm(props);
    publish(dir, "norm_stats.txt", c.out, [&](std::ostream& o) { write_norm_stats(o, stats); });
    write_norm_stats(out_, stats);
  }
  out_ << "run_dir " << dir.string() << '\n';
}

void Cli::cmd_pretrain(const Command& c) {
  Json cfg = resolve(c);
  if (no_adaptor_) cfg["pretrain"]["train_adaptor"] = false;
  const auto files = expand_inputs(corpus_);
  const auto mc = model_config(cfg);
  const auto pc = pretrain_config(cfg);
  const auto dir = start_run("pretrain", cfg, c);
  std::vector<BipartiteGraph> graphs;
  for (const auto& f : files) graphs.push_back(load_training_graph(f));
  spdlog::info("pre-training on {} graphs", graphs.size());
  const auto r = pretrain(graphs, mc, pc);
  publish(dir, "checkpoint.txt", c.out, [&](std::ostream& o) { write_checkpoint(o, r.checkpoint); });
  write_file(dir / "pretrain_log.tsv", [&](std::ostream& o) { write_epoch_log(o, r.log); });
  write_file(dir / "norm_stats.txt", [&](std::ostream& o) { write_norm_stats(o, r.checkpoint.norm); });
  out_ << "graphs " << graphs.size() << "\nepochs " << r.log.size() << "\nbest_epoch " << r.best_epoch << "\nsteps "
       << r.steps << "\nrun_dir " << dir.string() << '\n';
}

void Cli::cmd_finetune(const Command& c) {
  Json cfg = resolve(c);
  require_file(checkpoint_);
  require_file(manifest_);
  const auto strategy = finetune_strategy(cfg);
  const auto fc = finetune_config(cfg);
  const auto protocol = eval_protocol(cfg);
  const auto dir = start_run("finetune", cfg, c);
  const auto ck = read_checkpoint_file(checkpoint_);
  const auto m = read_manifest_file(manifest_);
  const auto r = finetune(ck, m, strategy, fc, protocol);
  publish(dir, "model.txt", c.out, [&](std::ostream& o) { write_checkpoint(o, r.model); });
  write_file(dir / "finetune_log.tsv", [&](std::ostream& o) { write_epoch_log(o, r.log); });
  write_file(dir / "metrics.txt", [&](std::ostream& o) {
    o << "strategy=" << to_string(strategy) << "\nbest_epoch=" << r.best_epoch
      << "\nbest_val_hr=" << format_exact(r.best_val_hr) << "\nsteps=" << r.steps << '\n';
  });
  out_ << "strategy " << to_string(strategy) << "\nbest_epoch " << r.best_epoch << "\nbest_val_hr "
       << format_exact(r.best_val_hr) << "\nrun_dir " << dir.string() << '\n';
}

void Cli::cmd_eval(const Command& c) {
  Json cfg = resolve(c);
  require_file(manifest_);
  if (scorer_ == "model") require_file(checkpoint_);
  if (partition_ != "test" && partition_ != "val") throw ConfigError("--split must be test or val");
  const auto protocol = eval_protocol(cfg);
  const auto mc = model_config(cfg);
  const auto dir = start_run("eval", cfg, c);
  const auto m = read_manifest_file(manifest_);
  const auto train = m.train_graph();
  const auto& cases = partition_ == "test" ? m.split.test : m.split.val;
  std::optional<Checkpoint> ck;
  if (scorer_ == "model") ck = read_checkpoint_file(checkpoint_);

  std::vector<HrResult> results;
  for (auto seed : protocol.seeds) {
    PairScorer scorer;
    if (scorer_ == "random") {
      scorer = random_scorer(seed);
    } else {
      Checkpoint model = ck ? *ck : Checkpoint::fresh(mc, derive_seed(seed, {0x1a17}));
      if (!ck) model.use_adaptor = false;
      scorer = lgnn_scorer(model, train, derive_seed(seed, {0x7e57}));
    }
    results.push_back(evaluate_hr(scorer, m.graph, cases, protocol, seed));
  }
  std::vector<double> hrs;
  for (const auto& r : results) hrs.push_back(r.hr);
  ExperimentReport report;
  report.seeds = protocol.seeds;
  report.rows.push_back({scorer_ == "random" ? Variant::RandomInit : Variant::Meta, summarize(hrs)});
  const std::string dataset = fs::path(manifest_).stem().string();

  write_file(dir / "report.tsv", [&](std::ostream& o) {
    o << "seed\thr\thits\tevaluated\tskipped\n";
    for (std::size_t k = 0; k < results.size(); ++k)
      o << protocol.seeds[k] << '\t' << format_exact(results[k].hr) << '\t' << results[k].hits << '\t'
        << results[k].evaluated << '\t' << results[k].skipped << '\n';
  });
  const auto& s = report.rows[0].hr;
  const std::string prefix = "dataset=" + dataset + " variant=" + scorer_ + " split=" + partition_;
  publish(dir, "summary.txt", c.out, [&](std::ostream& o) {
    for (std::size_t k = 0; k < results.size(); ++k)
      o << prefix << " seed=" << protocol.seeds[k] << " hr=" << format_exact(results[k].hr) << '\n';
    o << prefix << " mean=" << format_exact(s.mean) << " std=" << format_exact(s.stddev)
      << " hr_percent=" << format_mean_std(s) << '\n';
  });
  out_ << "hr@" << protocol.k << ' ' << format_mean_std(s) << "\nmean " << format_exact(s.mean) << "\nstd "
       << format_exact(s.stddev) << "\nrun_dir " << dir.string() << '\n';
}

void Cli::cmd_ablation(const Command& c) {
  Json cfg = resolve(c);
  if (no_adaptor_) cfg["pretrain"]["train_adaptor"] = false;
  require_file(target_);
  if (checkpoint_.empty() == corpus_.empty()) throw ConfigError("ablation needs exactly one of --checkpoint or --corpus");
  if (!checkpoint_.empty()) require_file(checkpoint_);
  const auto files = corpus_.empty() ? std::vector<std::string>{} : expand_inputs(corpus_);
  auto ec = experiment_config(cfg);
  const auto variants = experiment_variants(cfg);
  const auto pc = pretrain_config(cfg);
  const auto dir = start_run("ablation", cfg, c);

  Checkpoint ck;
  if (!checkpoint_.empty()) {
    ck = read_checkpoint_file(checkpoint_);
    ec.model = ck.config;
  } else {
    std::vector<BipartiteGraph> graphs;
    for (const auto& f : files) graphs.push_back(load_training_graph(f));
    auto r = pretrain(graphs, ec.model, pc);
    ck = std::move(r.checkpoint);
    write_file(dir / "checkpoint.txt", [&](std::ostream& o) { write_checkpoint(o, ck); });
    write_file(dir / "pretrain_log.tsv", [&](std::ostream& o) { write_epoch_log(o, r.log); });
  }
  const auto target = load_full_graph(target_);
  auto report = run_variants(&ck, target, variants, ec);
  report.meta.insert(report.meta.begin(), {"dataset", fs::path(target_).stem().string()});
  publish(dir, "report.tsv", c.out, [&](std::ostream& o) { write_report(o, report); });
  write_file(dir / "summary.txt", [&](std::ostream& o) { write_summary(o, report); });
  write_report(out_, report);
  out_ << "run_dir " << dir.string() << '\n';
}

int Cli::run(const std::vector<std::string>& args) {
  app_.require_subcommand(1);
  app_.set_help_all_flag("--help-all", "Help for every command");

  auto& synth = add_command("synth", "Generate a synthetic bipartite graph");
  bind(synth, "--users", "synth.users", "User count");
  bind(synth, "--items", "synth.items", "Item count");
  bind(synth, "--density", "synth.density", "Edge density");
  bind(synth, "--exponent", "synth.exponent", "Preferential attachment exponent");
  bind(synth, "--communities", "synth.communities", "Planted blocks");
  bind(synth, "--cross-fraction", "synth.cross_fraction", "Share of edges ignoring blocks");
  bind(synth, "--seed", "synth.seed", "Random seed");
  synth.app->add_option("--out", synth.out, "Also write the edge list here");

  auto& prepare = add_command("prepare", "Split an edge list into train/val/test and sparsify the training part");
  prepare.app->add_option("--input", input_, "Edge list or manifest")->required();
  bind(prepare, "--val-frac", "split.val_frac", "Validation fraction");
  bind(prepare, "--test-frac", "split.test_frac", "Test fraction");
  bind(prepare, "--keep-frac", "split.keep_frac", "Fraction of training edges kept");
  bind(prepare, "--seed", "split.seed", "Random seed");
  prepare.app->add_option("--out", prepare.out, "Also write the manifest here");

  auto& props = add_command("props", "Graph properties of one graph, or normalisation statistics of a corpus");
  props.app->add_option("--input", input_, "Edge list or manifest (training part)");
  props.app->add_option("--corpus", corpus_, "Graph files or directories")->take_all();
  props.app->add_option("--out", props.out, "Also write the result here");

  auto& pre = add_command("pretrain", "Pre-train the meta model and adaptor on a corpus");
  pre.app->add_option("--corpus", corpus_, "Graph files or directories")->required()->take_all();
  bind(pre, "--batch-size", "pretrain.batch_size", "Triplets per step");
  bind(pre, "--samples-per-epoch", "pretrain.samples_per_epoch", "Positives per epoch (0 = all)");
  bind(pre, "--lr", "pretrain.learning_rate", "Adam learning rate");
  bind(pre, "--epochs", "pretrain.max_epochs", "Maximum epochs");
  bind(pre, "--patience", "pretrain.patience", "Early-stopping patience");
  bind(pre, "--seed", "pretrain.seed", "Random seed");
  pre.app->add_flag("--no-adaptor", no_adaptor_, "Freeze the adaptor at identity");
  pre.app->add_option("--out", pre.out, "Also write the checkpoint here");

  auto& ft = add_command("finetune", "Fine-tune a pre-trained checkpoint on a prepared target");
  ft.app->add_option("--checkpoint", checkpoint_, "Pre-trained checkpoint")->required();
  ft.app->add_option("--manifest", manifest_, "Target manifest")->required();
  bind(ft, "--strategy", "finetune.strategy", "direct or joint");
  bindings_.back().option->check(CLI::IsMember({"direct", "joint"}));
  bind(ft, "--batch-size", "finetune.batch_size", "Triplets per step");
  bind(ft, "--lr", "finetune.learning_rate", "Adam learning rate");
  bind(ft, "--epochs", "finetune.max_epochs", "Maximum epochs");
  bind(ft, "--patience", "finetune.patience", "Epochs without improvement before stopping (0 = never)");
  bind(ft, "--seed", "finetune.seed", "Random seed");
  ft.app->add_option("--out", ft.out, "Also write the model here");

  auto& ev = add_command("eval", "HR@k of a model on a prepared target");
  ev.app->add_option("--model", checkpoint_, "Checkpoint to evaluate");
  ev.app->add_option("--manifest", manifest_, "Target manifest")->required();
  ev.app->add_option("--scorer", scorer_, "model, random or random-init")
      ->check(CLI::IsMember({"model", "random", "random-init"}));
  ev.app->add_option("--split", partition_, "Partition to rank: test or val")->check(CLI::IsMember({"test", "val"}));
  bind(ev, "--k", "eval.k", "Cut-off rank");
  bind(ev, "--negatives", "eval.negatives", "Negatives per positive");
  bind(ev, "--seeds", "eval.seeds", "Comma-separated protocol seeds");
  ev.app->add_option("--out", ev.out, "Also write the summary here");

  auto& ab = add_command("ablation", "Compare model variants on a target graph");
  ab.app->add_option("--target", target_, "Target edge list or manifest")->required();
  ab.app->add_option("--corpus", corpus_, "Pre-training graphs (pre-trains first)")->take_all();
  ab.app->add_option("--checkpoint", checkpoint_, "Use this pre-trained checkpoint");
  bind(ab, "--variants", "ablation.variants", "Comma-separated variants");
  bind(ab, "--keep-frac", "split.keep_frac", "Fraction of target training edges kept");
  bind(ab, "--seeds", "eval.seeds", "Comma-separated protocol seeds");
  ab.app->add_flag("--no-adaptor", no_adaptor_, "Pre-train with the adaptor frozen");
  ab.app->add_option("--out", ab.out, "Also write the report here");

  std::vector<std::string> argv_store{"adapt"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app_.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out_ << app_.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out_ << app_.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err_ << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  try {
    for (auto& c : commands_) {
      if (!c.app->parsed()) continue;
      if (c.app->count("--help")) return kOk;
      const std::string name = c.app->get_name();
      if (name == "synth") cmd_synth(c);
      else if (name == "prepare") cmd_prepare(c);
      else if (name == "props") cmd_props(c);
      else if (name == "pretrain") cmd_pretrain(c);
      else if (name == "finetune") cmd_finetune(c);
      else if (name == "eval") cmd_eval(c);
      else if (name == "ablation") cmd_ablation(c);
    }
  } catch (const MissingInput& e) {
    err_ << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err_ << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err_ << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli(out, err);
  const int code = cli.run(args);
  spdlog::set_default_logger(std::make_shared<spdlog::logger>("adapt", std::make_shared<spdlog::sinks::ostream_sink_mt>(std::cerr)));
  return code;
}

}  // namespace adapt::cli
