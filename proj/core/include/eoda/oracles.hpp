#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "eoda/encoding.hpp"
#include "eoda/rng.hpp"

namespace eoda {

// Objective value of a candidate solution. KRK: depth of win in White moves with
// Black to move (0 = already checkmated) or DRAW. Job-shop: makespan, or INFEASIBLE
// carrying the sentinel value (5x the instance's total duration) so infeasible
// genotypes still rank as very bad.
struct Cost {
  enum class Kind : std::uint8_t { Finite, Draw, Infeasible };

  Kind kind = Kind::Finite;
  int value = 0;  // depth or makespan; sentinel when Infeasible; unused for Draw

  bool finite() const { return kind == Kind::Finite; }

  // Threshold test used for labeling: DRAW never passes, INFEASIBLE never passes.
  bool at_most(int theta) const { return kind == Kind::Finite && value <= theta; }

  static Cost finite_of(int v) { return {Kind::Finite, v}; }
  static Cost draw() { return {Kind::Draw, 0}; }
  static Cost infeasible(int sentinel) { return {Kind::Infeasible, sentinel}; }

  bool operator==(const Cost&) const = default;
};

// ---------------------------------------------------------------------------
// KRK depth-of-win tablebase over the 28056 canonical Black-to-move positions.
// Built by retrograde analysis of the full (un-reduced) legal position graph for
// both sides; Black maximizes and prefers DRAW (stalemate or safe rook capture),
// White minimizes the number of White moves to mate.
// ---------------------------------------------------------------------------
class KrkTablebase {
 public:
  static constexpr int kCanonicalCount = 28056;
  static constexpr int kMaxDepth = 16;
  static constexpr std::uint8_t kDrawByte = 255;

  static KrkTablebase build();

  // Binary container: magic "KRKTB1", then 28056 little-endian (code: u32, cost: u8)
  // pairs sorted by code, DRAW = 255.
  void save(const std::filesystem::path& p) const;
  static KrkTablebase load(const std::filesystem::path& p);

  // Canonicalizes, then looks up. Throws on illegal positions.
  Cost cost(const KrkPosition& pos) const;

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<std::uint32_t, std::uint8_t>>& entries() const { return entries_; }

  // Canonical positions sorted by code; parallel to entries().
  const std::vector<KrkPosition>& canonical_positions() const { return positions_; }

  // The 27 canonical checkmate positions (depth 0).
  std::vector<KrkPosition> mates() const;

  std::array<long, kMaxDepth + 1> depth_histogram() const;
  long draw_count() const;

  // Exact fraction of canonical positions with finite depth <= theta.
  double cumulative_fraction(int theta) const;

 private:
  KrkTablebase() = default;
  void index();

  std::vector<std::pair<std::uint32_t, std::uint8_t>> entries_;  // sorted by code
  std::vector<KrkPosition> positions_;
  std::vector<std::uint8_t> by_code_;  // 8^6 flat lookup, 254 = not canonical
};

KrkTablebase build_krk_tablebase();

Cost krk_cost(const KrkTablebase& tb, const KrkPosition& pos);

// ---------------------------------------------------------------------------
// Job-shop semi-active timetable. Each machine processes jobs strictly in its
// listed order; a task starts as soon as its job predecessor (per routing) and the
// machine's previous task have both finished. Incompatible priority/routing orders
// deadlock; the simulator detects no-progress and marks the result infeasible,
// assigning unscheduled tasks the sentinel time so downstream predicates stay total.
// ---------------------------------------------------------------------------
struct Timetable {
  std::array<std::array<int, kMachines>, kJobs> start{};   // [job][machine]
  std::array<std::array<int, kMachines>, kJobs> finish{};  // [job][machine]
  std::array<int, kMachines> machine_finish{};             // end of machine's last task
  std::array<int, kMachines> machine_load{};               // sum of durations on machine
  bool feasible = false;
  int makespan = 0;  // sentinel when infeasible

  // Idle time on machine m from t = 0 to its last completion.
  int machine_wait(int m) const { return machine_finish[m] - machine_load[m]; }
  int total_wait() const {
    int s = 0;
    for (int m = 0; m < kMachines; ++m) s += machine_wait(m);
    return s;
  }
};

int jobshop_sentinel(const JobShopInstance& inst);

Timetable simulate_jobshop(const JobShopInstance& inst, const JobShopSchedule& s);

Cost jobshop_cost(const JobShopInstance& inst, const JobShopSchedule& s);

// Seeded benchmark instance: per-job routing permutations and durations uniform in
// [1, 99]. Seed 0 is the frozen default benchmark instance.
JobShopInstance random_jobshop_instance(std::uint64_t seed);

// ---------------------------------------------------------------------------
// Uniform initial populations. KRK: uniform over the 28056 canonical positions.
//
// Job-shop: uniform dispatch construction. Repeatedly pick one unfinished job
// uniformly at random and append its next routed task to that machine's order.
// The dispatch sequence is a linear extension of the induced precedence graph,
// so the genotype's strict-priority timetable is feasible by construction, and
// every feasible genotype is reachable (any feasible genotype's precedence
// graph admits a topological dispatch order that reproduces it). Independent
// per-machine permutations would be infeasible almost surely: a random 5x5
// priority specification has 12.5 expected crossing cycles, making P(acyclic)
// on the order of 1e-5, which would leave nothing for the threshold schedule
// to label.
// ---------------------------------------------------------------------------
std::vector<KrkPosition> sample_uniform_krk(const KrkTablebase& tb, int n, Rng& rng);
std::vector<JobShopSchedule> sample_uniform_jobshop(const JobShopInstance& inst, int n, Rng& rng);

}  // namespace eoda
