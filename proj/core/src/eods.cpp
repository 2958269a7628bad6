#include "eoda/eods.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "eoda/io.hpp"

namespace eoda {

EodsConfig EodsConfig::chess_defaults() {
  EodsConfig cfg;
  cfg.domain = DomainKind::Chess;
  cfg.thresholds = {8, 4, 2, 0};
  cfg.layer_sizes = {kKrkBits, 64, 64};
  cfg.learner = LearnerConfig{0.7, 4, 5000, 2};
  return cfg;
}

EodsConfig EodsConfig::jobshop_defaults() {
  EodsConfig cfg;
  cfg.domain = DomainKind::JobShop;
  cfg.thresholds.clear();
  for (int t = 900; t >= 600; t -= 10) cfg.thresholds.push_back(t);
  cfg.layer_sizes = {kJobShopBits, 128, 96};
  cfg.learner = LearnerConfig{0.7, 10, 10000, 2};
  return cfg;
}

// --------------------------------------------------------------------------- metrics

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> label_population(
    const std::vector<Cost>& costs, int theta) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    (costs[i].at_most(theta) ? pos : neg).push_back(i);
  }
  return {std::move(pos), std::move(neg)};
}

double precision_estimate(const std::vector<Cost>& costs, int theta) {
  if (costs.empty()) throw std::invalid_argument("precision_estimate: empty population");
  long n = 0;
  for (const auto& c : costs) {
    if (c.at_most(theta)) ++n;
  }
  return static_cast<double>(n) / static_cast<double>(costs.size());
}

std::optional<double> gain_ratio(double model_prec, double baseline_prec) {
  if (baseline_prec <= 0.0) return std::nullopt;
  return model_prec / baseline_prec;
}

std::pair<long, long> near_optimal_coverage(const std::unordered_set<std::uint64_t>& generated,
                                            const std::unordered_set<std::uint64_t>& optimal) {
  if (optimal.empty()) throw std::invalid_argument("near_optimal_coverage: empty optimal set");
  long a = 0;
  for (std::uint64_t k : generated) {
    if (optimal.count(k)) ++a;
  }
  return {a, static_cast<long>(optimal.size())};
}

// --------------------------------------------------------------------------- domains

ChessDomain::ChessDomain(const KrkTablebase& tb) : tb_(&tb), catalog_(chess_catalog()) {
  for (const auto& p : tb.mates()) optimal_.insert(krk_code(p));
}

JobShopDomain::JobShopDomain(JobShopInstance inst, int theta_star, int pool_size,
                             const JobShopCatalogConfig& cat_cfg)
    : inst_(std::move(inst)),
      theta_star_(theta_star),
      pool_size_(pool_size),
      catalog_(jobshop_catalog(cat_cfg)) {
  validate_jobshop_instance(inst_);
  if (pool_size_ < 1) throw std::invalid_argument("jobshop domain: pool size must be >= 1");
  Rng rng(Rng::mix(kPoolSeed, static_cast<std::uint64_t>(theta_star_)));
  auto pool = sample_uniform_jobshop(inst_, pool_size_, rng);
  pool_costs_sorted_.reserve(pool.size());
  for (const auto& s : pool) {
    Cost c = cost(s);
    if (c.finite()) {
      pool_costs_sorted_.push_back(c.value);
      if (c.value <= theta_star_) optimal_.insert(jobshop_key(s));
    }
  }
  std::sort(pool_costs_sorted_.begin(), pool_costs_sorted_.end());
  if (optimal_.empty()) {
    throw std::runtime_error(
        "jobshop domain: reference pool contains no schedule at or below theta*; "
        "theta* = " +
        std::to_string(theta_star_) + " is unreachable for this instance");
  }
}

Cost JobShopDomain::cost(const Instance& s) const {
  Timetable tt = simulate_jobshop(inst_, s);
  if (!tt.feasible) return Cost::infeasible(tt.makespan);
  // Lower-bound invariants, checked on every evaluation: the makespan can never
  // beat the longest job chain or the heaviest machine load.
  int max_chain = 0, max_load = 0;
  for (int j = 0; j < kJobs; ++j) {
    int chain = 0;
    for (int m = 0; m < kMachines; ++m) chain += inst_.durations[j][m];
    max_chain = std::max(max_chain, chain);
  }
  for (int m = 0; m < kMachines; ++m) max_load = std::max(max_load, tt.machine_load[m]);
  if (tt.makespan < max_chain || tt.makespan < max_load) {
    throw std::logic_error("jobshop cost: makespan below a lower bound");
  }
  return Cost::finite_of(tt.makespan);
}

double JobShopDomain::baseline_fraction(int theta) const {
  auto it = std::upper_bound(pool_costs_sorted_.begin(), pool_costs_sorted_.end(), theta);
  return static_cast<double>(it - pool_costs_sorted_.begin()) / static_cast<double>(pool_size_);
}

// --------------------------------------------------------------------------- trace io

namespace {

nlohmann::json report_json(const AlignmentReport& rep) {
  nlohmann::json j;
  j["pilot_fractions"] = rep.pilot_fractions;
  j["k_star"] = rep.k_star;
  j["final_aligned_fraction"] = rep.final_aligned_fraction;
  j["strict_rejections"] = rep.strict_rejections;
  return j;
}

}  // namespace

std::string trace_to_json(const EodsTrace& t) {
  nlohmann::json j;
  j["domain"] = domain_name(t.domain);
  const EodsConfig& c = t.config;
  j["config"] = {
      {"thresholds", c.thresholds},
      {"population_size", c.population_size},
      {"samples_per_iteration", c.samples_per_iteration},
      {"use_ilp", c.use_ilp},
      {"cumulative_data", c.cumulative_data},
      {"seed", c.seed},
      {"layer_sizes", c.layer_sizes},
      {"learner",
       {{"minacc", c.learner.minacc},
        {"max_literals", c.learner.max_literals},
        {"max_nodes", c.learner.max_nodes},
        {"min_pos_cover", c.learner.min_pos_cover}}},
      {"train",
       {{"cd_steps", c.train.cd_steps},
        {"learning_rate", c.train.learning_rate},
        {"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size},
        {"weight_init_scale", c.train.weight_init_scale},
        {"gibbs_steps_sampling", c.train.gibbs_steps_sampling}}},
      {"alignment",
       {{"strict", c.alignment.strict},
        {"pilot_size", c.alignment.pilot_size},
        {"retry_factor", c.alignment.retry_factor}}},
  };
  j["iterations"] = nlohmann::json::array();
  for (const auto& r : t.iterations) {
    nlohmann::json e;
    e["k"] = r.k;
    e["theta"] = r.theta;
    e["pos_count"] = r.pos_count;
    e["neg_count"] = r.neg_count;
    e["rule_count"] = r.rule_count;
    e["rule_precision_mean"] = r.rule_precision_mean;
    if (!r.rules.empty()) e["rules"] = nlohmann::json::parse(ruleset_to_json(r.rules));
    e["prec_model"] = r.prec_model;
    e["prec_baseline"] = r.prec_baseline;
    if (r.gain) {
      e["gain"] = *r.gain;
    } else {
      e["gain"] = nullptr;
    }
    e["coverage_a"] = r.coverage_a;
    e["coverage_b"] = r.coverage_b;
    e["used_alignment"] = r.used_alignment;
    e["fallback_plain"] = r.fallback_plain;
    if (r.used_alignment) e["alignment"] = report_json(r.alignment);
    if (r.aligned_fraction) {
      e["aligned_fraction"] = *r.aligned_fraction;
    } else {
      e["aligned_fraction"] = nullptr;
    }
    if (std::isnan(r.mean_population_cost)) {
      e["mean_population_cost"] = nullptr;
    } else {
      e["mean_population_cost"] = r.mean_population_cost;
    }
    e["population_size"] = r.population_size;
    e["wall_seconds"] = r.wall_seconds;
    j["iterations"].push_back(e);
  }
  return j.dump(2);
}

std::string trace_to_csv(const EodsTrace& t) {
  std::string out = "iteration,theta,prec_model,prec_baseline,gain,coverage_a,coverage_b,aligned_fraction\n";
  for (const auto& r : t.iterations) {
    out += std::to_string(r.k);
    out += ',';
    out += std::to_string(r.theta);
    out += ',';
    out += format_fixed6(r.prec_model);
    out += ',';
    out += format_fixed6(r.prec_baseline);
    out += ',';
    out += format_fixed6(r.gain ? *r.gain : std::nan(""));
    out += ',';
    out += std::to_string(r.coverage_a);
    out += ',';
    out += std::to_string(r.coverage_b);
    out += ',';
    out += format_fixed6(r.aligned_fraction ? *r.aligned_fraction : std::nan(""));
    out += '\n';
  }
  return out;
}

}  // namespace eoda
