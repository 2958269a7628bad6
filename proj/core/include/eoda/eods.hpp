#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "eoda/alignment.hpp"
#include "eoda/background.hpp"
#include "eoda/dbn.hpp"
#include "eoda/encoding.hpp"
#include "eoda/oracles.hpp"
#include "eoda/rule_learner.hpp"

namespace eoda {

// ---------------------------------------------------------------------------
// The outer estimation-of-distribution loop: label the (cumulative) dataset at
// the current threshold, optionally learn rules and convert them to feature
// bits, train the DBN with warm-start, regenerate the population by (aligned)
// separator-clamped sampling, record metrics, advance the threshold.
// ---------------------------------------------------------------------------

enum class DomainKind { Chess, JobShop };

inline const char* domain_name(DomainKind d) { return d == DomainKind::Chess ? "chess" : "jobshop"; }

struct EodsConfig {
  DomainKind domain = DomainKind::Chess;
  std::vector<int> thresholds;       // non-increasing; last entry is theta*
  int population_size = 1000;        // initial uniform population
  int samples_per_iteration = 1000;  // regenerated population target size
  bool use_ilp = true;
  bool cumulative_data = true;
  std::uint64_t seed = 0;
  LearnerConfig learner;
  TrainConfig train;
  std::vector<int> layer_sizes;
  AlignedConfig alignment;

  static EodsConfig chess_defaults();
  static EodsConfig jobshop_defaults();
};

struct IterationRecord {
  int k = 0;
  int theta = 0;
  long pos_count = 0, neg_count = 0;
  int rule_count = 0;
  double rule_precision_mean = 0.0;
  RuleSet rules;  // empty when use_ilp is off
  double prec_model = 0.0;
  double prec_baseline = 0.0;
  std::optional<double> gain;
  long coverage_a = 0, coverage_b = 0;
  bool used_alignment = false;
  bool fallback_plain = false;  // aligned sampling failed, population drawn plain
  AlignmentReport alignment;
  std::optional<double> aligned_fraction;
  double mean_population_cost = 0.0;  // finite + sentinel costs; draws excluded
  long population_size = 0;
  double wall_seconds = 0.0;
};

struct EodsTrace {
  DomainKind domain = DomainKind::Chess;
  EodsConfig config;
  std::vector<IterationRecord> iterations;
};

// JSON document for one run; flat CSV (fixed six-decimal reals) for plotting.
std::string trace_to_json(const EodsTrace& t);
std::string trace_to_csv(const EodsTrace& t);

// --------------------------------------------------------------------------- metrics

// Partition of cost values at theta: DRAW and INFEASIBLE always label negative.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> label_population(
    const std::vector<Cost>& costs, int theta);

double precision_estimate(const std::vector<Cost>& costs, int theta);  // throws on empty

// Undefined (nullopt) when the baseline is zero.
std::optional<double> gain_ratio(double model_prec, double baseline_prec);

// a = |generated ∩ optimal|, b = |optimal|; throws on an empty optimal set.
std::pair<long, long> near_optimal_coverage(const std::unordered_set<std::uint64_t>& generated,
                                            const std::unordered_set<std::uint64_t>& optimal);

// --------------------------------------------------------------------------- domains

// Chess: costs from the tablebase; optimal set = the 27 depth-0 canonical
// positions; baseline fractions are exact cumulative tablebase fractions.
struct ChessDomain {
  using Instance = KrkPosition;
  using Context = ChessEvalContext;

  explicit ChessDomain(const KrkTablebase& tb);

  DomainKind kind() const { return DomainKind::Chess; }
  int encoded_bits() const { return kKrkBits; }
  const std::vector<GroundLiteral>& catalog() const { return catalog_; }
  const std::unordered_set<std::uint64_t>& optimal_keys() const { return optimal_; }

  BitVec encode(const Instance& p) const { return encode_krk(p); }
  Instance decode_repair(const RawSample& raw, Rng& rng) const {
    return repair_krk(raw.bits, raw.probs, rng);
  }
  Context context_of(const Instance& p) const { return ChessEvalContext(p); }
  Cost cost(const Instance& p) const { return tb_->cost(p); }
  std::uint64_t key(const Instance& p) const { return krk_code(canonicalize_krk(p)); }
  double baseline_fraction(int theta) const { return tb_->cumulative_fraction(theta); }
  std::vector<Instance> sample_uniform(int n, Rng& rng) const {
    return sample_uniform_krk(*tb_, n, rng);
  }

 private:
  const KrkTablebase* tb_;
  std::vector<GroundLiteral> catalog_;
  std::unordered_set<std::uint64_t> optimal_;
};

// Job-shop: costs from the semi-active simulator (with lower-bound invariants
// checked on every call); the optimal set and baseline come from a reference
// pool of uniform schedules evaluated once under a pinned pool seed.
struct JobShopDomain {
  using Instance = JobShopSchedule;
  using Context = JobShopEvalContext;

  static constexpr int kDefaultPoolSize = 100000;
  static constexpr std::uint64_t kPoolSeed = 0x706f6f6c30ULL;

  JobShopDomain(JobShopInstance inst, int theta_star, int pool_size = kDefaultPoolSize,
                const JobShopCatalogConfig& cat_cfg = {});

  DomainKind kind() const { return DomainKind::JobShop; }
  int encoded_bits() const { return kJobShopBits; }
  const std::vector<GroundLiteral>& catalog() const { return catalog_; }
  const std::unordered_set<std::uint64_t>& optimal_keys() const { return optimal_; }
  const JobShopInstance& instance() const { return inst_; }
  int theta_star() const { return theta_star_; }

  BitVec encode(const Instance& s) const { return encode_jobshop(s); }
  Instance decode_repair(const RawSample& raw, Rng& rng) const {
    return repair_jobshop(raw.bits, raw.probs, rng);
  }
  Context context_of(const Instance& s) const { return JobShopEvalContext(inst_, s); }
  Cost cost(const Instance& s) const;
  std::uint64_t key(const Instance& s) const { return jobshop_key(s); }
  double baseline_fraction(int theta) const;
  std::vector<Instance> sample_uniform(int n, Rng& rng) const {
    return sample_uniform_jobshop(inst_, n, rng);
  }

 private:
  JobShopInstance inst_;
  int theta_star_;
  int pool_size_;
  std::vector<GroundLiteral> catalog_;
  std::unordered_set<std::uint64_t> optimal_;
  std::vector<int> pool_costs_sorted_;  // finite pool costs only
};

// --------------------------------------------------------------------------- loop

template <class Domain>
EodsTrace run_eods(const EodsConfig& cfg, const Domain& dom) {
  if (cfg.thresholds.empty()) throw std::invalid_argument("eods: empty threshold schedule");
  for (std::size_t i = 1; i < cfg.thresholds.size(); ++i) {
    if (cfg.thresholds[i] > cfg.thresholds[i - 1])
      throw std::invalid_argument("eods: thresholds must be non-increasing");
  }
  if (cfg.population_size < 1 || cfg.samples_per_iteration < 1)
    throw std::invalid_argument("eods: population sizes must be >= 1");
  if (cfg.layer_sizes.size() < 2) throw std::invalid_argument("eods: need at least two layer sizes");
  if (cfg.layer_sizes.front() != dom.encoded_bits())
    throw std::invalid_argument("eods: bottom layer width must match the domain encoding");

  EodsTrace trace;
  trace.domain = dom.kind();
  trace.config = cfg;

  Rng rng(cfg.seed);

  using Instance = typename Domain::Instance;
  std::vector<Instance> data = dom.sample_uniform(cfg.population_size, rng);
  std::vector<Cost> data_costs;
  data_costs.reserve(data.size());
  for (const auto& x : data) data_costs.push_back(dom.cost(x));

  DbnModel model;
  bool model_ready = false;
  std::unordered_set<std::uint64_t> covered;  // generated ∩ optimal, cumulative

  for (std::size_t k = 1; k <= cfg.thresholds.size(); ++k) {
    auto t0 = std::chrono::steady_clock::now();
    IterationRecord rec;
    rec.k = static_cast<int>(k);
    rec.theta = cfg.thresholds[k - 1];

    auto [pos_idx, neg_idx] = label_population(data_costs, rec.theta);
    rec.pos_count = static_cast<long>(pos_idx.size());
    rec.neg_count = static_cast<long>(neg_idx.size());

    // Rule learning on the labeled dataset.
    std::vector<typename Domain::Context> contexts;
    if (cfg.use_ilp) {
      contexts.reserve(data.size());
      for (const auto& x : data) contexts.push_back(dom.context_of(x));
      std::vector<typename Domain::Context> pos_ctx, neg_ctx;
      pos_ctx.reserve(pos_idx.size());
      neg_ctx.reserve(neg_idx.size());
      for (auto i : pos_idx) pos_ctx.push_back(contexts[i]);
      for (auto i : neg_idx) neg_ctx.push_back(contexts[i]);
      rec.rules = learn_rules(build_literal_matrix(dom.catalog(), pos_ctx),
                              build_literal_matrix(dom.catalog(), neg_ctx), dom.catalog(),
                              cfg.learner);
      rec.rules.iteration = static_cast<int>(k);
      rec.rules.theta = rec.theta;
      rec.rule_count = static_cast<int>(rec.rules.size());
      double acc = 0.0;
      for (const auto& c : rec.rules.clauses) acc += c.precision;
      rec.rule_precision_mean = rec.rules.empty() ? 0.0 : acc / rec.rules.size();
    }

    // Model: create on the first iteration, warm-start afterwards; the feature
    // block only ever grows (stale units keep zero data bits).
    const int want_features =
        cfg.use_ilp ? std::max(rec.rule_count, model_ready ? model.ilp_feature_count : 0) : 0;
    if (!model_ready) {
      model = DbnModel::create(cfg.layer_sizes, want_features, cfg.train.weight_init_scale, rng);
      model_ready = true;
    } else {
      model = dbn_warm_start(model, want_features, cfg.train.weight_init_scale, rng);
    }

    std::vector<DbnTrainRow> rows;
    rows.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      DbnTrainRow row;
      row.visible = dom.encode(data[i]);
      row.ilp.assign(static_cast<std::size_t>(model.ilp_feature_count), 0);
      if (cfg.use_ilp && !rec.rules.empty()) {
        BitVec f = eval_features(rec.rules, contexts[i]);
        std::copy(f.begin(), f.end(), row.ilp.begin());
      }
      row.label = data_costs[i].at_most(rec.theta) ? 1 : 0;
      rows.push_back(std::move(row));
    }
    model = dbn_train(std::move(model), rows, cfg.train, rng);

    // Regenerate the population.
    std::vector<Instance> pop;
    if (cfg.use_ilp && !rec.rules.empty()) {
      rec.used_alignment = true;
      auto res = sample_aligned(model, rec.rules, cfg.samples_per_iteration, cfg.train,
                                cfg.alignment, dom, rng);
      rec.alignment = res.report;
      if (res.failed) {
        rec.fallback_plain = true;
      } else {
        pop = std::move(res.instances);
        rec.aligned_fraction = res.report.final_aligned_fraction;
      }
    }
    if (pop.empty()) {
      ClampSet cs{{model.separator_index(), 1}};
      auto raws = dbn_sample(model, cs, cfg.samples_per_iteration, cfg.train, rng);
      pop.reserve(raws.size());
      for (const auto& raw : raws) pop.push_back(dom.decode_repair(raw, rng));
    }

    // Metrics on the regenerated population.
    std::vector<Cost> pop_costs;
    pop_costs.reserve(pop.size());
    for (const auto& x : pop) pop_costs.push_back(dom.cost(x));
    rec.population_size = static_cast<long>(pop.size());
    rec.prec_model = precision_estimate(pop_costs, rec.theta);
    rec.prec_baseline = dom.baseline_fraction(rec.theta);
    rec.gain = gain_ratio(rec.prec_model, rec.prec_baseline);

    for (const auto& x : pop) {
      std::uint64_t key = dom.key(x);
      if (dom.optimal_keys().count(key)) covered.insert(key);
    }
    auto [a, b] = near_optimal_coverage(covered, dom.optimal_keys());
    rec.coverage_a = a;
    rec.coverage_b = b;

    double cost_sum = 0.0;
    long cost_n = 0;
    for (const auto& c : pop_costs) {
      if (c.kind != Cost::Kind::Draw) {
        cost_sum += c.value;
        ++cost_n;
      }
    }
    rec.mean_population_cost = cost_n > 0 ? cost_sum / cost_n : std::nan("");

    // Fold the new population into the training data.
    if (cfg.cumulative_data) {
      data.insert(data.end(), pop.begin(), pop.end());
      data_costs.insert(data_costs.end(), pop_costs.begin(), pop_costs.end());
    } else {
      data = std::move(pop);
      data_costs = std::move(pop_costs);
    }

    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    trace.iterations.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace eoda
