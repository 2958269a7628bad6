#pragma once

#include <cstdint>
#include <vector>

#include "eoda/dbn.hpp"
#include "eoda/rng.hpp"
#include "eoda/rule_learner.hpp"

namespace eoda {

// ---------------------------------------------------------------------------
// Aligned sampling: bias the DBN's output into the success-set of the learned
// rules by clamping a subset of feature units to 1 (the separator is always
// clamped to 1). The clamp subset size is chosen by a pilot sweep over
// k = 0..|H|, one uniform subset per k; the winner is the k with the highest
// aligned fraction, smallest k on ties.
//
// A domain adapter supplies decode_repair (raw sample -> instance) and
// context_of (instance -> evaluation context); see eods.hpp for the two
// concrete adapters.
// ---------------------------------------------------------------------------

struct AlignmentReport {
  std::vector<double> pilot_fractions;  // index k = fraction aligned with k clamped features
  int k_star = 0;
  double final_aligned_fraction = 0.0;
  long strict_rejections = 0;
};

struct AlignedConfig {
  bool strict = true;
  int pilot_size = 50;
  int retry_factor = 20;  // strict-mode raw budget = retry_factor * M
};

// True iff at least one clause body evaluates true (the success-set of a
// non-recursive rule set is the union of per-rule success-sets). Empty rule set:
// false everywhere.
template <typename Context>
bool is_aligned(const Context& ctx, const RuleSet& H) {
  for (const auto& clause : H.clauses) {
    bool all = true;
    for (const auto& lit : clause.body) {
      if (!eval_literal(lit, ctx)) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

namespace detail {

// Uniform size-k subset of {0..n-1} by partial Fisher-Yates; sorted for stable
// clamp ordering.
inline std::vector<int> uniform_subset(int n, int k, Rng& rng) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < k; ++i) {
    int j = i + static_cast<int>(rng.uniform(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline ClampSet clamps_for(const DbnModel& m, const std::vector<int>& feature_subset) {
  ClampSet cs;
  cs.reserve(feature_subset.size() + 1);
  for (int j : feature_subset) cs.emplace_back(m.feature_unit(j), 1);
  cs.emplace_back(m.separator_index(), 1);
  return cs;
}

}  // namespace detail

// Pilot sweep: for each k in 0..|H| draw one uniform feature subset of size k,
// clamp it (plus separator), generate pilot_size samples, and measure the aligned
// fraction after decode-and-repair. Each k gets an independently derived RNG
// stream, so pilots are order-independent.
template <class Domain>
std::pair<int, AlignmentReport> select_clamp_size(const DbnModel& m, const RuleSet& H,
                                                  int pilot_size, const Domain& dom,
                                                  const TrainConfig& cfg, Rng& rng) {
  if (H.empty()) throw std::invalid_argument("select_clamp_size: empty rule set");
  if (pilot_size < 1) throw std::invalid_argument("select_clamp_size: pilot_size must be >= 1");
  const int n = static_cast<int>(H.size());
  if (m.ilp_feature_count < n)
    throw std::invalid_argument("select_clamp_size: model has fewer feature units than rules");

  AlignmentReport rep;
  rep.pilot_fractions.resize(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    Rng sub = rng.split(static_cast<std::uint64_t>(k));
    auto subset = detail::uniform_subset(n, k, sub);
    auto raws = dbn_sample(m, detail::clamps_for(m, subset), pilot_size, cfg, sub);
    int aligned = 0;
    for (const auto& raw : raws) {
      auto inst = dom.decode_repair(raw, sub);
      if (is_aligned(dom.context_of(inst), H)) ++aligned;
    }
    rep.pilot_fractions[k] = static_cast<double>(aligned) / pilot_size;
  }
  int k_star = 0;
  for (int k = 1; k <= n; ++k) {
    if (rep.pilot_fractions[k] > rep.pilot_fractions[k_star]) k_star = k;
  }
  rep.k_star = k_star;
  return {k_star, rep};
}

template <class Domain>
struct AlignedSamples {
  std::vector<typename Domain::Instance> instances;
  AlignmentReport report;
  bool failed = false;  // strict mode exhausted its budget with zero aligned samples
};

// Generate M instances using k* clamped features. Strict mode rejects non-aligned
// samples and keeps drawing (fresh uniform subset per batch) until M aligned
// instances are gathered or the raw budget runs out; zero gathered is a failure
// signal. Lenient mode returns one batch of M with the aligned fraction reported.
// An empty rule set degenerates to plain separator-clamped sampling.
template <class Domain>
AlignedSamples<Domain> sample_aligned(const DbnModel& m, const RuleSet& H, int M,
                                      const TrainConfig& cfg, const AlignedConfig& acfg,
                                      const Domain& dom, Rng& rng) {
  if (M < 1) throw std::invalid_argument("sample_aligned: M must be >= 1");
  AlignedSamples<Domain> out;

  if (H.empty()) {
    ClampSet cs{{m.separator_index(), 1}};
    auto raws = dbn_sample(m, cs, M, cfg, rng);
    out.instances.reserve(raws.size());
    for (const auto& raw : raws) out.instances.push_back(dom.decode_repair(raw, rng));
    return out;
  }

  auto [k_star, rep] = select_clamp_size(m, H, acfg.pilot_size, dom, cfg, rng);
  out.report = rep;
  const int n = static_cast<int>(H.size());

  if (!acfg.strict) {
    auto subset = detail::uniform_subset(n, k_star, rng);
    auto raws = dbn_sample(m, detail::clamps_for(m, subset), M, cfg, rng);
    long aligned = 0;
    for (const auto& raw : raws) {
      auto inst = dom.decode_repair(raw, rng);
      if (is_aligned(dom.context_of(inst), H)) ++aligned;
      out.instances.push_back(std::move(inst));
    }
    out.report.final_aligned_fraction = static_cast<double>(aligned) / M;
    return out;
  }

  const long budget = static_cast<long>(acfg.retry_factor) * M;
  long raw_used = 0;
  while (static_cast<int>(out.instances.size()) < M && raw_used < budget) {
    // Batches never shrink below 64 raws (rejection at low aligned rates would
    // otherwise degenerate into single-sample draws); extras are dropped.
    long want = M - static_cast<long>(out.instances.size());
    int batch = static_cast<int>(std::min(std::max(want, 64L), budget - raw_used));
    auto subset = detail::uniform_subset(n, k_star, rng);
    auto raws = dbn_sample(m, detail::clamps_for(m, subset), batch, cfg, rng);
    raw_used += batch;
    for (const auto& raw : raws) {
      auto inst = dom.decode_repair(raw, rng);
      if (static_cast<int>(out.instances.size()) >= M) break;
      if (is_aligned(dom.context_of(inst), H)) {
        out.instances.push_back(std::move(inst));
      } else {
        ++out.report.strict_rejections;
      }
    }
  }
  out.report.final_aligned_fraction =
      raw_used > 0 ? static_cast<double>(out.instances.size()) / static_cast<double>(raw_used)
                   : 0.0;
  out.failed = out.instances.empty();
  return out;
}

}  // namespace eoda
