#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "adapt/eval/protocol.hpp"
#include "adapt/graph/split.hpp"
#include "adapt/graph/synth.hpp"
#include "adapt/train/trainer.hpp"
#include "adapt/util/error.hpp"
#include "adapt/util/parallel.hpp"
#include "gradcheck.hpp"

using namespace adapt;

namespace {

ModelConfig tiny_config() {
  ModelConfig c;
  c.max_label = 5;
  c.layer_dims = {3, 3, 2};
  c.adaptor_hidden = 4;
  c.dropout = 0.0;
  c.rwr.max_nodes_per_side = 8;
  return c;
}

BipartiteGraph synth(std::size_t u, std::size_t i, double d, std::uint64_t seed, std::size_t blocks = 1) {
  SynthConfig c;
  c.user_count = u;
  c.item_count = i;
  c.target_density = d;
  c.communities = blocks;
  c.seed = seed;
  return gen_synthetic(c);
}

TrainGraph train_graph(const BipartiteGraph& g) {
  TrainGraph t;
  t.train = g;
  t.known = g;
  t.p_norm = {0.3, -0.2, 0.1, 0.5, -1.0, 0.7, 0.0, 0.2};
  return t;
}

Manifest manifest(const BipartiteGraph& g, std::uint64_t seed, double val = 0.1, double test = 0.1) {
  Manifest m;
  m.graph = g;
  m.split = split_dataset(g, val, test, seed);
  return m;
}

}  // namespace

TEST_SUITE("train") {
  TEST_CASE("BPR of equal scores is ln 2") {
    CHECK(bpr_value(0.4, 0.4) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    ad::Tape tape;
    auto l = bpr_loss(tape.constant(ad::Tensor::scalar(0.3)), tape.constant(ad::Tensor::scalar(0.3)));
    CHECK(l.value().item() == doctest::Approx(0.693147).epsilon(1e-6));
  }

  TEST_CASE("BPR vanishes for large margins and stays positive") {
    CHECK(bpr_value(50.0, 0.0) < 1e-20);
    CHECK(bpr_value(50.0, 0.0) > 0.0);
    for (double d : {-3.0, -0.5, 0.0, 0.5, 3.0, 30.0}) CHECK(bpr_value(d, 0.0) > 0.0);
    CHECK(bpr_value(-800.0, 0.0) == doctest::Approx(800.0));
  }

  TEST_CASE("summed BPR adds pairs") {
    ad::Tape tape;
    std::vector<ad::Var> p{tape.constant(ad::Tensor::scalar(0.9)), tape.constant(ad::Tensor::scalar(0.2))};
    std::vector<ad::Var> n{tape.constant(ad::Tensor::scalar(0.1)), tape.constant(ad::Tensor::scalar(0.6))};
    CHECK(bpr_loss(p, n).value().item() == doctest::Approx(bpr_value(0.9, 0.1) + bpr_value(0.2, 0.6)));
  }

  TEST_CASE("parameter registry per mode") {
    const auto cfg = tiny_config();
    const auto meta = trainable_parameter_names(cfg, ParamMode::MetaScorer);
    const auto custom = trainable_parameter_names(cfg, ParamMode::CustomScorer);
    const auto full = trainable_parameter_names(cfg, ParamMode::MetaAdaptorScorer);
    CHECK(meta == std::vector<std::string>{"theta.1", "theta.2", "theta.3", "delta"});
    CHECK(custom == meta);
    CHECK(full.size() == meta.size() + 2 + 2 * cfg.layer_count());

    auto ck = Checkpoint::fresh(cfg, 1);
    for (auto mode : {ParamMode::MetaScorer, ParamMode::MetaAdaptorScorer}) {
      auto model = make_step_model(ck, mode);
      std::vector<std::string> names;
      for (auto* p : model.parameters()) names.push_back(p->name);
      auto expected = trainable_parameter_names(cfg, mode);
      std::sort(names.begin(), names.end());
      std::sort(expected.begin(), expected.end());
      CHECK(names == expected);
    }
  }

  TEST_CASE("full-pipeline gradients pass the finite-difference audit") {
    const auto cfg = tiny_config();
    const auto g = synth(5, 5, 0.4, 3);
    const auto tg = train_graph(g);
    Rng rng(4);
    const auto batch = sample_triplets(tg, 0, 3, rng);
    SUBCASE("through the adaptor") {
      auto ck = Checkpoint::fresh(cfg, 2);
      gradcheck::perturb_adaptor(ck.adaptor, 5);
      const auto r = gradcheck::check(ck, ParamMode::MetaAdaptorScorer, tg, batch, 6);
      INFO("worst ", r.worst, " at ", r.worst_name);
      CHECK(r.passes());
    }
    SUBCASE("without the adaptor, on logits") {
      auto c2 = cfg;
      c2.bpr_on_logits = true;
      auto ck = Checkpoint::fresh(c2, 3);
      ck.use_adaptor = false;
      const auto r = gradcheck::check(ck, ParamMode::MetaScorer, tg, batch, 7);
      INFO("worst ", r.worst, " at ", r.worst_name);
      CHECK(r.passes());
    }
  }

  TEST_CASE("batch loss does not depend on the thread count") {
    const auto cfg = tiny_config();
    const auto g = synth(20, 20, 0.2, 8);
    const auto tg = train_graph(g);
    Rng rng(1);
    const auto batch = sample_triplets(tg, 0, 16, rng);
    auto run = [&](unsigned threads) {
      set_thread_cap(threads);
      auto ck = Checkpoint::fresh(cfg, 4);
      gradcheck::perturb_adaptor(ck.adaptor, 1);
      auto model = make_step_model(ck, ParamMode::MetaAdaptorScorer);
      const double loss = bpr_batch(model, tg, batch, 9, true, true);
      return std::make_pair(loss, *ck.adaptor.head_w[0].grad);
    };
    const auto a = run(1), b = run(4);
    set_thread_cap(0);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
  }

  TEST_CASE("sampled triplets are valid with exactly b of each") {
    const auto g = synth(30, 40, 0.1, 2);
    const auto tg = train_graph(g);
    Rng rng(3);
    bool replaced = true;
    const auto batch = sample_triplets(tg, 7, 50, rng, &replaced);
    CHECK_FALSE(replaced);
    CHECK(batch.size() == 50);
    std::set<std::pair<NodeIndex, NodeIndex>> pos;
    for (const auto& t : batch) {
      CHECK(t.graph == 7);
      CHECK(g.has_edge(t.user, t.pos_item));
      CHECK_FALSE(g.has_edge(t.user, t.neg_item));
      pos.insert({t.user, t.pos_item});
    }
    CHECK(pos.size() == 50);
  }

  TEST_CASE("small graphs fall back to sampling with replacement") {
    const auto g = synth(4, 6, 0.3, 1);
    const auto tg = train_graph(g);
    Rng rng(2);
    bool replaced = false;
    const auto batch = sample_triplets(tg, 0, g.edge_count() + 5, rng, &replaced);
    CHECK(replaced);
    CHECK(batch.size() == g.edge_count() + 5);
  }

  TEST_CASE("pre-training rejects an empty corpus and oversized epochs") {
    const auto cfg = tiny_config();
    CHECK_THROWS_AS(pretrain({}, cfg, PretrainConfig{}), ConfigError);
    const BipartiteGraph gs[] = {synth(10, 10, 0.2, 1)};
    PretrainConfig pc;
    pc.samples_per_epoch = 20;
    CHECK_THROWS_AS(pretrain(gs, cfg, pc), ConfigError);
  }

  TEST_CASE("pre-training on five graphs drives the loss below ln 2") {
    auto cfg = tiny_config();
    cfg.layer_dims = {8, 8, 8};
    cfg.adaptor_hidden = 8;
    std::vector<BipartiteGraph> gs;
    for (std::uint64_t m = 0; m < 5; ++m) gs.push_back(synth(20 + 4 * m, 24, 0.15, 10 + m, 2));
    PretrainConfig pc;
    pc.batch_size = 8;
    pc.samples_per_epoch = 40;
    pc.max_epochs = 40;
    pc.patience = 0;
    pc.learning_rate = 0.005;
    pc.seed = 3;
    const auto r = pretrain(gs, cfg, pc);
    CHECK(r.steps == 200);
    CHECK(r.log.size() == 40);
    double late = 0.0;
    for (std::size_t e = 30; e < 40; ++e) late += r.log[e].train_loss / 10;
    CHECK(late < std::log(2.0));
    // Trained adaptor produces graph-specific weights.
    const auto a = r.checkpoint.effective_layers(gs[0]);
    const auto b = r.checkpoint.effective_layers(gs[4]);
    double diff = 0.0;
    for (std::size_t k = 0; k < a[0].numel(); ++k) diff = std::max(diff, std::abs(a[0][k] - b[0][k]));
    CHECK(diff > 0.0);
  }

  TEST_CASE("pre-training is deterministic and tracks the best held-out epoch") {
    const auto cfg = tiny_config();
    const BipartiteGraph gs[] = {synth(15, 15, 0.2, 1), synth(18, 15, 0.2, 2)};
    PretrainConfig pc;
    pc.batch_size = 6;
    pc.samples_per_epoch = 12;
    pc.max_epochs = 6;
    pc.patience = 2;
    pc.holdout_frac = 0.1;
    pc.seed = 5;
    const auto a = pretrain(gs, cfg, pc);
    const auto b = pretrain(gs, cfg, pc);
    std::ostringstream sa, sb;
    write_checkpoint(sa, a.checkpoint);
    write_checkpoint(sb, b.checkpoint);
    CHECK(sa.str() == sb.str());

    double best = INFINITY;
    std::size_t best_epoch = 0, stale = 0;
    for (const auto& r : a.log) {
      if (r.val_loss < best) {
        best = r.val_loss;
        best_epoch = r.epoch;
        stale = 0;
      } else {
        ++stale;
      }
    }
    CHECK(a.best_epoch == best_epoch);
    if (a.log.size() < pc.max_epochs) CHECK(stale >= pc.patience);
  }

  TEST_CASE("a frozen adaptor reduces pre-training to the plain model") {
    const auto cfg = tiny_config();
    const BipartiteGraph gs[] = {synth(15, 15, 0.2, 1)};
    PretrainConfig pc;
    pc.batch_size = 8;
    pc.samples_per_epoch = 16;
    pc.max_epochs = 2;
    pc.train_adaptor = false;
    const auto r = pretrain(gs, cfg, pc);
    CHECK_FALSE(r.checkpoint.use_adaptor);
    const auto fresh = Checkpoint::fresh(cfg, pc.seed);
    CHECK(r.checkpoint.adaptor.head_w[0].value == fresh.adaptor.head_w[0].value);
    CHECK_FALSE(r.checkpoint.meta.layers[0].value == fresh.meta.layers[0].value);
  }

  TEST_CASE("strategy names") {
    CHECK(parse_strategy("direct") == Strategy::Direct);
    CHECK(parse_strategy("joint") == Strategy::Joint);
    CHECK(to_string(Strategy::Joint) == "joint");
    CHECK_THROWS_AS(parse_strategy("both"), ConfigError);
  }

  TEST_CASE("zero fine-tuning epochs return the customised model") {
    const auto cfg = tiny_config();
    auto ck = Checkpoint::fresh(cfg, 6);
    gradcheck::perturb_adaptor(ck.adaptor, 2);
    const auto target = manifest(synth(20, 60, 0.1, 3), 1);
    FinetuneConfig fc;
    fc.max_epochs = 0;
    EvalProtocol ep;
    ep.negatives = 9;
    ep.k = 3;
    const auto d = finetune(ck, target, Strategy::Direct, fc, ep);
    CHECK(d.best_epoch == 0);
    CHECK_FALSE(d.model.use_adaptor);
    const auto expected = ck.effective_layers(target.train_graph());
    for (std::size_t l = 0; l < cfg.layer_count(); ++l) CHECK(d.model.meta.layers[l].value == expected[l]);
    const auto j = finetune(ck, target, Strategy::Joint, fc, ep);
    CHECK(j.model.use_adaptor);
    CHECK(j.model.effective_layers(target.train_graph()) == expected);
  }

  TEST_CASE("direct fine-tuning leaves the adaptor alone, joint moves it") {
    const auto cfg = tiny_config();
    auto ck = Checkpoint::fresh(cfg, 6);
    gradcheck::perturb_adaptor(ck.adaptor, 2);
    const auto target = manifest(synth(20, 60, 0.1, 3), 1);
    FinetuneConfig fc;
    fc.max_epochs = 2;
    fc.batch_size = 16;
    EvalProtocol ep;
    ep.negatives = 9;
    ep.k = 3;
    const auto d = finetune(ck, target, Strategy::Direct, fc, ep);
    CHECK(d.model.adaptor.head_w[0].value == ck.adaptor.head_w[0].value);
    CHECK(d.log.size() == 3);
    CHECK(d.model.info_value("finetune.strategy") == "direct");

    auto joint_ck = ck;
    TrainGraph tg;
    tg.train = target.train_graph();
    tg.known = tg.train;
    // The trunk gradient is an outer product with p, so p must be non-zero.
    tg.p_norm = {0.5, -1.0, 0.25, 1.5, -0.75, 0.1, 2.0, -0.3};
    Rng rng(1);
    const auto batch = sample_triplets(tg, 0, 8, rng);
    auto model = make_step_model(joint_ck, ParamMode::MetaAdaptorScorer);
    bpr_batch(model, tg, batch, 3, true, true);
    double norm = 0.0;
    for (double v : joint_ck.adaptor.trunk_w.grad->values()) norm += v * v;
    CHECK(norm > 0.0);
  }

  TEST_CASE("fine-tuning lowers the training loss and selects the best validation epoch") {
    auto cfg = tiny_config();
    cfg.layer_dims = {8, 8, 8};
    cfg.bpr_on_logits = true;
    auto ck = Checkpoint::fresh(cfg, 1);
    ck.use_adaptor = false;
    const auto target = manifest(synth(30, 60, 0.1, 5, 2), 2, 0.15, 0.05);
    FinetuneConfig fc;
    fc.max_epochs = 6;
    fc.batch_size = 8;
    fc.learning_rate = 0.01;
    EvalProtocol ep;
    ep.negatives = 19;
    const auto r = finetune(ck, target, Strategy::Direct, fc, ep);
    CHECK(r.steps >= 50);
    CHECK(r.log.back().train_loss < r.log[1].train_loss);
    std::size_t argmax = 0;
    for (std::size_t e = 1; e < r.log.size(); ++e)
      if (r.log[e].val_hr > r.log[argmax].val_hr) argmax = e;
    CHECK(r.best_epoch == argmax);
    CHECK(r.best_val_hr == r.log[argmax].val_hr);
  }

  TEST_CASE("epoch log format") {
    const EpochRecord rows[] = {{0, NAN, NAN, 0.25}, {1, 0.5, NAN, 0.5}};
    std::ostringstream out;
    write_epoch_log(out, rows);
    CHECK(out.str() == "epoch\ttrain_loss\tval_loss\tval_hr\n0\t-\t-\t0.25\n1\t0.5\t-\t0.5\n");
  }
}
