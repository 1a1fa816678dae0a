#include "adapt/eval/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "adapt/graph/split.hpp"
#include "adapt/util/error.hpp"
#include "adapt/util/text.hpp"

namespace adapt {

namespace {

constexpr std::pair<Variant, const char*> kNames[] = {
    {Variant::RandomInit, "random-init"}, {Variant::Meta, "meta-lgnn"},  {Variant::Customized, "customized-gnn"},
    {Variant::AdaptD, "adapt-d"},         {Variant::AdaptJ, "adapt-j"},  {Variant::AdaptBest, "adapt-best"},
    {Variant::Scratch, "scratch"},        {Variant::Mf, "mf-bpr"},
};

bool needs_pretrained(Variant v) {
  return v != Variant::RandomInit && v != Variant::Scratch && v != Variant::Mf;
}

}  // namespace

std::string to_string(Variant v) {
  for (auto [k, name] : kNames)
    if (k == v) return name;
  return "unknown";
}

Variant parse_variant(const std::string& s) {
  for (auto [k, name] : kNames)
    if (s == name) return k;
  throw ConfigError("unknown variant '" + s + "'");
}

std::vector<Variant> ablation_variants() {
  return {Variant::RandomInit, Variant::Meta, Variant::Customized, Variant::AdaptD, Variant::AdaptJ};
}

Manifest target_split(const BipartiteGraph& target, const ExperimentConfig& cfg, std::uint64_t seed) {
  Manifest m;
  m.graph = target;
  m.split = split_dataset(target, cfg.val_frac, cfg.test_frac, seed);
  if (cfg.keep_frac < 1.0) m.split = sparsify_train(m.split, cfg.keep_frac, derive_seed(seed, {0x5a}));
  m.meta = {{"seed", std::to_string(seed)}, {"keep_frac", format_exact(cfg.keep_frac)}};
  return m;
}

double test_hr(const Checkpoint& model, const Manifest& split, const EvalProtocol& protocol, std::uint64_t seed) {
  const BipartiteGraph train = split.train_graph();
  auto scorer = lgnn_scorer(model, train, derive_seed(seed, {0x7e57}));
  return evaluate_hr(scorer, split.graph, split.split.test, protocol, seed).hr;
}

const VariantRow& ExperimentReport::row(Variant v) const {
  for (const auto& r : rows)
    if (r.variant == v) return r;
  throw Error("report has no row for " + to_string(v));
}

ExperimentReport run_variants(const Checkpoint* pretrained, const BipartiteGraph& target,
                              std::span<const Variant> variants, const ExperimentConfig& cfg) {
  cfg.protocol.validate();
  if (cfg.protocol.seeds.empty()) throw ConfigError("protocol has no seeds");
  for (auto v : variants)
    if (needs_pretrained(v) && !pretrained)
      throw ConfigError("variant " + to_string(v) + " needs a pre-trained checkpoint");

  std::vector<std::vector<double>> values(variants.size());
  for (auto seed : cfg.protocol.seeds) {
    const Manifest split = target_split(target, cfg, seed);
    FinetuneConfig ft = cfg.finetune;
    ft.seed = derive_seed(cfg.finetune.seed, {seed});

    std::optional<FinetuneResult> direct, joint;
    auto get_direct = [&]() -> const FinetuneResult& {
      if (!direct) direct = finetune(*pretrained, split, Strategy::Direct, ft, cfg.protocol);
      return *direct;
    };
    auto get_joint = [&]() -> const FinetuneResult& {
      if (!joint) joint = finetune(*pretrained, split, Strategy::Joint, ft, cfg.protocol);
      return *joint;
    };

    for (std::size_t k = 0; k < variants.size(); ++k) {
      double hr = 0.0;
      switch (variants[k]) {
        case Variant::RandomInit: {
          Checkpoint ck = Checkpoint::fresh(cfg.model, derive_seed(seed, {0x1a17}));
          ck.use_adaptor = false;
          hr = test_hr(ck, split, cfg.protocol, seed);
          break;
        }
        case Variant::Meta: {
          Checkpoint ck = *pretrained;
          ck.use_adaptor = false;
          hr = test_hr(ck, split, cfg.protocol, seed);
          break;
        }
        case Variant::Customized:
          hr = test_hr(*pretrained, split, cfg.protocol, seed);
          break;
        case Variant::AdaptD:
          hr = test_hr(get_direct().model, split, cfg.protocol, seed);
          break;
        case Variant::AdaptJ:
          hr = test_hr(get_joint().model, split, cfg.protocol, seed);
          break;
        case Variant::AdaptBest: {
          const auto& d = get_direct();
          const auto& j = get_joint();
          const bool pick_joint = !std::isnan(j.best_val_hr) && (std::isnan(d.best_val_hr) || j.best_val_hr > d.best_val_hr);
          hr = test_hr(pick_joint ? j.model : d.model, split, cfg.protocol, seed);
          break;
        }
        case Variant::Scratch: {
          Checkpoint ck = Checkpoint::fresh(cfg.model, derive_seed(seed, {0x5c7a}));
          ck.use_adaptor = false;
          hr = test_hr(finetune(ck, split, Strategy::Direct, ft, cfg.protocol).model, split, cfg.protocol, seed);
          break;
        }
        case Variant::Mf: {
          MfConfig mc = cfg.mf;
          mc.seed = derive_seed(cfg.mf.seed, {seed});
          auto res = train_mf(split, mc, cfg.protocol);
          hr = evaluate_hr(mf_scorer(std::move(res.model)), split.graph, split.split.test, cfg.protocol, seed).hr;
          break;
        }
      }
      values[k].push_back(hr);
    }
  }

  ExperimentReport report;
  report.seeds = cfg.protocol.seeds;
  for (std::size_t k = 0; k < variants.size(); ++k) report.rows.push_back({variants[k], summarize(values[k])});
  report.meta = {{"keep_frac", format_exact(cfg.keep_frac)},
                 {"k", std::to_string(cfg.protocol.k)},
                 {"negatives", std::to_string(cfg.protocol.negatives)}};
  return report;
}

void write_report(std::ostream& out, const ExperimentReport& report) {
  out << "variant\tmean\tstd\thr_percent";
  for (auto s : report.seeds) out << "\tseed_" << s;
  out << '\n';
  for (const auto& r : report.rows) {
    out << to_string(r.variant) << '\t' << format_exact(r.hr.mean) << '\t' << format_exact(r.hr.stddev) << '\t'
        << format_mean_std(r.hr);
    for (double v : r.hr.values) out << '\t' << format_exact(v);
    out << '\n';
  }
}

void write_summary(std::ostream& out, const ExperimentReport& report) {
  std::string dataset = "target";
  for (const auto& [k, v] : report.meta)
    if (k == "dataset") dataset = v;
  out << "dataset=" << dataset;
  for (const auto& [k, v] : report.meta)
    if (k != "dataset") out << ' ' << k << '=' << v;
  out << '\n';
  for (const auto& r : report.rows) {
    const std::string prefix = "dataset=" + dataset + " variant=" + to_string(r.variant);
    for (std::size_t s = 0; s < r.hr.values.size() && s < report.seeds.size(); ++s)
      out << prefix << " seed=" << report.seeds[s] << " hr=" << format_exact(r.hr.values[s]) << '\n';
    out << prefix << " mean=" << format_exact(r.hr.mean) << " std=" << format_exact(r.hr.stddev)
        << " hr_percent=" << format_mean_std(r.hr) << '\n';
  }
}

}  // namespace adapt
