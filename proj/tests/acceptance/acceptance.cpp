// Acceptance run: one PASS/FAIL line per criterion.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adapt/eval/experiments.hpp"
#include "adapt/graph/synth.hpp"
#include "adapt/model/checkpoint.hpp"
#include "adapt/props/properties.hpp"
#include "adapt/subgraph/local_subgraph.hpp"
#include "adapt/train/trainer.hpp"
#include "app.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

using namespace adapt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass{false};
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SynthConfig synth_config(std::size_t u, std::size_t i, double density, std::size_t blocks, double exponent,
                         std::uint64_t seed) {
  SynthConfig c;
  c.user_count = u;
  c.item_count = i;
  c.target_density = density;
  c.communities = blocks;
  c.preferential_exponent = exponent;
  c.seed = seed;
  return c;
}

// ---------------------------------------------------------------------------

Outcome gradient_correctness() {
  const auto g = gen_synthetic(synth_config(5, 5, 0.4, 1, 1.0, 3));
  TrainGraph tg;
  tg.train = g;
  tg.known = g;
  // Normalised against a corpus of similar graphs so the tanh trunk is not
  // saturated.
  std::vector<PropertyVector> corpus;
  for (std::uint64_t k = 0; k < 8; ++k)
    corpus.push_back(compute_properties(
        gen_synthetic(synth_config(4 + k % 3, 4 + (k * 2) % 5, 0.35 + 0.05 * static_cast<double>(k % 4), 1, 1.0, 10 + k))));
  tg.p_norm = normalize(compute_properties(g), fit_norm(corpus));
  Rng rng(4);
  const auto batch = sample_triplets(tg, 0, 4, rng);

  // Every parameter of a reduced architecture, then sampled coordinates of
  // the default one. Dropout is off so the loss is a deterministic function.
  ModelConfig small;
  small.max_label = 6;
  small.layer_dims = {4, 4, 3};
  small.adaptor_hidden = 5;
  small.dropout = 0.0;
  auto ck_small = Checkpoint::fresh(small, 2);
  gradcheck::perturb_adaptor(ck_small.adaptor, 5);
  const auto full = gradcheck::check(ck_small, ParamMode::MetaAdaptorScorer, tg, batch, 6);

  ModelConfig standard;
  standard.dropout = 0.0;
  auto ck = Checkpoint::fresh(standard, 7);
  gradcheck::perturb_adaptor(ck.adaptor, 8, 0.05);
  const auto sampled = gradcheck::check(ck, ParamMode::MetaAdaptorScorer, tg, batch, 9, 200);

  gradcheck::Report all;
  for (const auto* r : {&full, &sampled}) {
    all.checked += r->checked;
    all.below_1e4 += r->below_1e4;
    all.below_1e3 += r->below_1e3;
  }
  const auto& worst = full.worst > sampled.worst ? full : sampled;
  return {all.passes(),
          fmt("%zu coordinates (%zu full small-model, %zu sampled default-model); %.2f%% < 1e-4, %zu >= 1e-3; "
              "worst %.2e at %s",
              all.checked, full.checked, sampled.checked, 100.0 * all.fraction_tight(), all.checked - all.below_1e3,
              worst.worst, worst.worst_name.c_str())};
}

Outcome drnl_equivalence() {
  std::mt19937_64 rng(2024);
  std::size_t graphs = 0, labels = 0, zeros = 0, mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t u = 1 + rng() % 15, i = 1 + rng() % 15;
    const auto g = oracle::random_graph(rng, u, i, 0.05 + 0.3 * static_cast<double>(rng() % 100) / 100.0);
    const auto tu = static_cast<NodeIndex>(rng() % u), ti = static_cast<NodeIndex>(rng() % i);
    auto whole = oracle::whole_graph_subgraph(g, tu, ti);
    drnl_label(whole);
    const auto sampled = extract_local_graph(g, tu, ti, RwrConfig{}, static_cast<std::uint64_t>(t));
    for (const LocalSubgraph* s : {static_cast<const LocalSubgraph*>(&whole), &sampled}) {
      const auto expected = oracle::drnl(*s);
      labels += expected.size();
      zeros += static_cast<std::size_t>(std::count(expected.begin(), expected.end(), 0u));
      if (s->labels != expected) ++mismatches;
    }
    ++graphs;
  }
  return {mismatches == 0 && zeros > 0,
          fmt("%zu graphs (<= 30 nodes), %zu labels incl. %zu unreachable, %zu mismatching subgraphs", graphs,
              labels, zeros, mismatches)};
}

Outcome film_identity() {
  const auto g = gen_synthetic(synth_config(120, 100, 0.05, 2, 1.0, 11));
  const auto ck = Checkpoint::fresh(ModelConfig{}, 12);
  auto meta = ck;
  meta.use_adaptor = false;
  const auto customised_layers = ck.effective_layers(g);
  const auto meta_layers = meta.effective_layers(g);
  std::mt19937_64 rng(13);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto u = static_cast<NodeIndex>(rng() % g.user_count());
    const auto i = static_cast<NodeIndex>(rng() % g.item_count());
    const auto seed = pair_seed(99, u, i);
    const double a = lgnn_score(g, u, i, customised_layers, ck.meta.delta.value, ck.config, seed);
    const double b = lgnn_score(g, u, i, meta_layers, meta.meta.delta.value, meta.config, seed);
    worst = std::max(worst, std::abs(a - b));
  }
  return {worst <= 1e-12, fmt("1000 pairs, max |customised - meta| = %.3e", worst)};
}

Outcome property_oracles() {
  std::size_t graphs = 0, exact_fail = 0, real_fail = 0;
  double worst_real = 0.0;
  auto compare = [&](const BipartiteGraph& g) {
    const auto pv = compute_properties(g);
    if (pv.density != oracle::density(g) ||
        pv.connected_components != static_cast<double>(oracle::components(g)) ||
        pv.robins_alexander_clustering != oracle::robins_alexander(g))
      ++exact_fail;
    for (auto [got, want] : {std::pair{pv.degree_assortativity, oracle::assortativity(g)},
                             std::pair{pv.global_efficiency, oracle::efficiency(g)}}) {
      const double err = std::abs(got - want) / std::max(1.0, std::abs(want));
      worst_real = std::max(worst_real, err);
      if (err > 1e-12) ++real_fail;
    }
    ++graphs;
  };
  for (std::size_t u = 1; u <= 11; ++u)
    for (std::size_t i = 1; u + i <= 12 && u * i <= 12; ++i)
      for (const auto& g : oracle::all_graphs(u, i)) compare(g);
  const std::size_t exhaustive = graphs;
  std::mt19937_64 rng(77);
  for (int t = 0; t < 100; ++t) {
    const std::size_t u = 1 + rng() % 8;
    const std::size_t i = 1 + rng() % (12 - u);
    compare(oracle::random_graph(rng, u, i, 0.2 + 0.5 * static_cast<double>(rng() % 100) / 100.0));
  }

  const auto k22 = BipartiteGraph::from_edges(2, 2, std::vector<Edge>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const auto path = BipartiteGraph::from_edges(2, 1, std::vector<Edge>{{0, 0}, {1, 0}});
  const double k22_ra = robins_alexander_clustering(k22);
  const double path_eff = global_efficiency_exact(path);
  const bool anchors = k22_ra == 1.0 && std::abs(path_eff - 5.0 / 6.0) <= 1e-15;
  return {exact_fail == 0 && real_fail == 0 && anchors,
          fmt("%zu exhaustive + 100 random graphs; integer-valued mismatches %zu, real-valued beyond 1e-12 %zu "
              "(worst %.1e); K22 RA = %.17g, path efficiency = %.17g",
              exhaustive, exact_fail, real_fail, worst_real, k22_ra, path_eff)};
}

Outcome random_anchor() {
  const auto g = gen_synthetic(synth_config(300, 200, 0.05, 2, 1.0, 21));
  Manifest m;
  m.graph = g;
  m.split = split_dataset(g, 0.0, 0.4, 22);
  EvalProtocol protocol;
  std::size_t evaluated = 0, hits = 0;
  bool each = true;
  std::string per_seed;
  for (auto seed : protocol.seeds) {
    const auto r = evaluate_hr(random_scorer(derive_seed(seed, {0x7e57})), g, m.split.test, protocol, seed);
    evaluated += r.evaluated;
    hits += r.hits;
    each = each && std::abs(r.hr - 0.10) <= 0.03 && r.evaluated >= 1000;
    per_seed += fmt(" %.4f", r.hr);
  }
  const double pooled = static_cast<double>(hits) / static_cast<double>(evaluated);
  return {each && std::abs(pooled - 0.10) <= 0.03,
          fmt("%zu test edges per seed; HR@5 per seed%s; pooled %.4f (expect 0.10 +- 0.03)", evaluated / 5,
              per_seed.c_str(), pooled)};
}

Outcome learnability() {
  double best_sum = 0.0, test_sum = 0.0, first_sum = 0.0;
  std::size_t epochs_max = 0;
  std::string per_seed;
  const int runs = 5;
  for (int s = 1; s <= runs; ++s) {
    const auto g = gen_synthetic(synth_config(50, 50, 0.06, 2, 1.5, static_cast<std::uint64_t>(s)));
    ExperimentConfig ec;
    ec.val_frac = 0.2;
    ec.test_frac = 0.2;
    ec.protocol.short_pool = ShortPoolPolicy::UseAll;
    ec.finetune.max_epochs = 100;
    ec.finetune.batch_size = 32;
    const auto split = target_split(g, ec, static_cast<std::uint64_t>(s));
    auto ck = Checkpoint::fresh(ec.model, static_cast<std::uint64_t>(s));
    ck.use_adaptor = false;
    const auto r = finetune(ck, split, Strategy::Direct, ec.finetune, ec.protocol);
    const double test = test_hr(r.model, split, ec.protocol, static_cast<std::uint64_t>(s));
    best_sum += r.best_val_hr;
    test_sum += test;
    first_sum += r.log.front().val_hr;
    epochs_max = std::max(epochs_max, r.log.size() - 1);
    per_seed += fmt(" %.3f@%zu", r.best_val_hr, r.best_epoch);
  }
  const double best = best_sum / runs, test = test_sum / runs;
  return {best >= 0.30 && test > 0.10 && epochs_max <= 100,
          fmt("50x50 two-community graphs, 5 seeds: best val HR@5 (epoch)%s; mean %.3f (untrained %.3f), test %.3f",
              per_seed.c_str(), best, first_sum / runs, test)};
}

// ---------------------------------------------------------------------------
// Transfer experiments shared by the transfer-direction and sparsity checks.

struct TransferRuns {
  ExperimentReport sparse;  // keep 0.4
  ExperimentReport dense;   // keep 1.0
  bool done{false};
};

TransferRuns& transfer() {
  static TransferRuns runs;
  if (runs.done) return runs;
  // Corpus densities span the target's training density after sparsification
  // (0.03 * 0.7 * 0.4 ~ 0.008) up to its unsparsified density.
  const double exponent = 1.5;
  std::vector<BipartiteGraph> corpus;
  for (std::size_t m = 0; m < 6; ++m)
    corpus.push_back(gen_synthetic(synth_config(150 + 30 * m, 200, 0.007 + 0.0035 * static_cast<double>(m), 2,
                                                exponent, 100 + m)));
  const auto target = gen_synthetic(synth_config(300, 200, 0.03, 2, exponent, 999));

  ModelConfig mc;
  mc.bpr_on_logits = true;
  PretrainConfig pc;
  pc.max_epochs = 10;
  pc.batch_size = 64;
  pc.patience = 3;
  pc.seed = 7;
  const auto pre = pretrain(corpus, mc, pc);
  std::cerr << "  pre-training: " << pre.log.size() << " epochs, best " << pre.best_epoch << "\n";

  const std::vector<Variant> variants{Variant::RandomInit, Variant::Customized, Variant::AdaptD, Variant::AdaptJ,
                                      Variant::Scratch};
  for (double keep : {0.4, 1.0}) {
    ExperimentConfig ec;
    ec.model = mc;
    ec.finetune.max_epochs = 20;
    ec.finetune.batch_size = 64;
    ec.val_frac = 0.1;
    ec.test_frac = 0.2;
    ec.keep_frac = keep;
    auto report = run_variants(&pre.checkpoint, target, variants, ec);
    write_report(std::cerr, report);
    (keep < 1.0 ? runs.sparse : runs.dense) = std::move(report);
  }
  runs.done = true;
  return runs;
}

std::string seed_list(const SeedSummary& s) {
  std::string out;
  for (double v : s.values) out += fmt(" %.3f", v);
  return out;
}

Outcome transfer_direction() {
  const auto& r = transfer().sparse;
  const auto& random_init = r.row(Variant::RandomInit).hr;
  const auto& customised = r.row(Variant::Customized).hr;
  const auto& scratch = r.row(Variant::Scratch).hr;
  std::string detail = fmt("keep 0.4: customized %.3f vs random-init %.3f; scratch %.3f [%s]", customised.mean,
                           random_init.mean, scratch.mean, seed_list(scratch).c_str());
  bool adapt_ok = false;
  for (auto v : {Variant::AdaptD, Variant::AdaptJ}) {
    const auto& a = r.row(v).hr;
    std::size_t wins = 0;
    for (std::size_t k = 0; k < a.values.size(); ++k) wins += a.values[k] >= scratch.values[k];
    const bool ok = a.mean >= scratch.mean && wins >= 4;
    adapt_ok = adapt_ok || ok;
    detail += fmt("; %s %.3f [%s] >= scratch on %zu/5 seeds", to_string(v).c_str(), a.mean, seed_list(a).c_str(),
                  wins);
  }
  return {customised.mean > random_init.mean && adapt_ok, detail};
}

Outcome sparsity_trend() {
  const auto& t = transfer();
  auto drop = [&](Variant v) {
    const double dense = t.dense.row(v).hr.mean, sparse = t.sparse.row(v).hr.mean;
    return (dense - sparse) / dense;
  };
  const double scratch = drop(Variant::Scratch);
  const double d = drop(Variant::AdaptD), j = drop(Variant::AdaptJ);
  const double adapt = std::min(d, j);
  return {adapt < scratch,
          fmt("relative HR drop keep 1.0 -> 0.4: adapt-d %.1f%%, adapt-j %.1f%%, scratch %.1f%%", 100 * d, 100 * j,
              100 * scratch)};
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> join(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "adapt_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::string> model{"--set", "model.layer_dims=8,8", "--set", "model.adaptor_hidden=8",
                                       "--set", "model.rwr.max_nodes=12"};
  auto call = [](std::vector<std::string> args, const std::vector<std::string>& extra = {}) {
    args.insert(args.end(), extra.begin(), extra.end());
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (code != 0) throw std::runtime_error("command failed: " + args.front() + ": " + err.str());
    return out.str();
  };
  auto pipeline = [&](const std::string& tag) {
    const std::string d = (root / tag).string();
    const std::vector<std::string> runs{"--run-dir", d + "/runs"};
    for (int k = 0; k < 3; ++k)
      call({"synth", "--users", "60", "--items", "80", "--density", "0.06", "--communities", "2", "--seed",
            std::to_string(40 + k), "--out", d + "/corpus/g" + std::to_string(k) + ".tsv"},
           runs);
    call({"synth", "--users", "60", "--items", "90", "--density", "0.07", "--communities", "2", "--seed", "5", "--out",
          d + "/target.tsv"},
         runs);
    call({"prepare", "--input", d + "/target.tsv", "--val-frac", "0.1", "--test-frac", "0.1", "--keep-frac", "0.6",
          "--out", d + "/manifest.tsv"},
         runs);
    call({"props", "--corpus", d + "/corpus", "--out", d + "/norm.txt"}, runs);
    call({"pretrain", "--corpus", d + "/corpus", "--epochs", "3", "--batch-size", "16", "--samples-per-epoch", "96",
          "--out", d + "/ck.txt"},
         join(model, runs));
    std::vector<std::string> files{"manifest.tsv", "norm.txt", "ck.txt"};
    for (const std::string strategy : {"direct", "joint"}) {
      call({"finetune", "--checkpoint", d + "/ck.txt", "--manifest", d + "/manifest.tsv", "--strategy", strategy,
            "--epochs", "3", "--batch-size", "16", "--out", d + "/" + strategy + ".txt"},
           runs);
      call({"eval", "--model", d + "/" + strategy + ".txt", "--manifest", d + "/manifest.tsv", "--out",
            d + "/eval_" + strategy + ".txt"},
           runs);
      files.push_back(strategy + ".txt");
      files.push_back("eval_" + strategy + ".txt");
    }
    call({"ablation", "--target", d + "/target.tsv", "--checkpoint", d + "/ck.txt", "--seeds", "1,2", "--set",
          "finetune.max_epochs=2", "--set", "finetune.batch_size=16", "--set", "split.val_frac=0.1", "--set",
          "split.test_frac=0.1", "--out", d + "/ablation.tsv"},
         runs);
    files.push_back("ablation.tsv");
    std::map<std::string, std::string> content;
    for (const auto& f : files) content[f] = slurp(d + "/" + f);
    return content;
  };
  const auto a = pipeline("a");
  const auto b = pipeline("b");
  std::size_t same = 0;
  std::string differing;
  for (const auto& [name, text] : a) {
    if (!text.empty() && b.at(name) == text)
      ++same;
    else
      differing += " " + name;
  }
  fs::remove_all(root);
  return {same == a.size(), fmt("%zu/%zu artifacts of synth/prepare/props/pretrain/finetune/eval/ablation identical "
                                "across reruns%s%s",
                                same, a.size(), differing.empty() ? "" : "; differing:", differing.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradient_correctness},
      {"DRNL oracle equivalence", drnl_equivalence},
      {"FiLM identity", film_identity},
      {"property oracles", property_oracles},
      {"random-baseline anchor", random_anchor},
      {"learnability", learnability},
      {"transfer direction", transfer_direction},
      {"determinism", determinism},
      {"sparsity-robustness trend", sparsity_trend},
  };

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << " (" << criteria[k].first << "): " << o.detail
              << fmt(" [%.1fs]", secs) << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
