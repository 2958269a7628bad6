#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eoda/encoding.hpp"
#include "eoda/oracles.hpp"

namespace eoda {

// ---------------------------------------------------------------------------
// Ground background literals for rule bodies. Every literal is a total, pure
// predicate over one instance. Threshold families enumerate finite integer grids;
// tautological endpoints (<= max, >= 0) are left out of the catalogs.
//
// Chess geometry is evaluated on the canonical representative of the position's
// symmetry class, which makes every chess literal invariant under the 8 board
// symmetries by construction.
// ---------------------------------------------------------------------------

enum class Pred : std::uint8_t {
  // chess
  DistFile,      // |file(a) - file(b)| cmp t, pair in arg a
  DistRank,      // |rank(a) - rank(b)| cmp t
  DistCheb,      // Chebyshev distance cmp t
  SameFile,      // file(a) == file(b)
  SameRank,      // rank(a) == rank(b)
  AlignDist,     // min(|wr_file - bk_file|, |wr_rank - bk_rank|) cmp t
  Adjacent,      // Chebyshev distance == 1
  Between,       // a: 0 = WR between kings, 1 = WK between WR and BK, 2 = BK between WK and WR
  BkEdgeDist,    // min distance of BK to board edge cmp t
  BkCornerDist,  // min Chebyshev distance of BK to a corner cmp t
  WkCentreDist,  // min Chebyshev distance of WK to the four centre squares cmp t
  Opposition,    // kings 2 apart on a file or rank
  AlmostOpposition,  // kings 2 apart diagonally
  LShape,        // kings a knight's move apart
  // job-shop
  Early,           // job a at position 0 or 1 in machine b's order
  Late,            // job a at position 3 or 4
  FastestTask,     // duration(a, b) equals the minimum over jobs on machine b
  SlowestTask,     // duration(a, b) equals the maximum
  FastTask,        // duration(a, b) at most the second-smallest on machine b
  SlowTask,        // duration(a, b) at least the second-largest
  MachineWait,     // idle time of machine b (finish minus load) cmp t
  TotalWait,       // summed idle over machines cmp t
  PreTaskElapsed,  // start time of job a's task on machine b cmp t
};

enum class Cmp : std::uint8_t { Le, Ge };

enum class PiecePair : std::uint8_t { WkBk = 0, WkWr = 1, WrBk = 2 };

struct GroundLiteral {
  Pred pred{};
  std::int16_t a = 0;  // piece pair / betweenness variant / job id
  std::int16_t b = 0;  // machine id (job-shop only)
  Cmp cmp = Cmp::Le;
  std::int16_t threshold = 0;

  bool operator==(const GroundLiteral&) const = default;
};

bool is_chess_pred(Pred p);
bool is_jobshop_pred(Pred p);

std::string describe_literal(const GroundLiteral& lit);

// Signature-level view of a predicate family, for documentation dumps.
struct PredicateSignature {
  std::string id;
  int arity = 0;
  std::string args;        // human description of the argument domains
  bool has_threshold = false;
  int threshold_min = 0, threshold_max = 0;
  std::string definition;  // pinned semantics, one line
};

std::vector<PredicateSignature> chess_predicates();
std::vector<PredicateSignature> jobshop_predicates();

// Enumeration order of the ground catalogs is fixed; the rule learner's final
// tie-break is catalog position, so this order is part of reproducibility.
std::vector<GroundLiteral> chess_catalog();

struct JobShopCatalogConfig {
  int wait_stride = 50;
  int wait_max = 1200;
  int total_stride = 100;
  int total_max = 4000;
  int elapsed_stride = 50;
  int elapsed_max = 1200;
};

std::vector<GroundLiteral> jobshop_catalog(const JobShopCatalogConfig& cfg = {});

// JSON dump of a domain's signatures plus the ground catalog size.
std::string catalog_json(const std::string& domain);

// ---------------------------------------------------------------------------
// Evaluation contexts. Constructed once per instance; literal evaluation is then
// a handful of integer compares.
// ---------------------------------------------------------------------------

struct ChessEvalContext {
  KrkPosition canon;

  explicit ChessEvalContext(const KrkPosition& p) : canon(canonicalize_krk(p)) {}
};

struct JobShopEvalContext {
  const JobShopInstance* inst;
  JobShopSchedule sched;
  Timetable tt;
  int pos_of[kMachines][kJobs];  // position of job j in machine m's order

  JobShopEvalContext(const JobShopInstance& instance, const JobShopSchedule& s);
};

bool eval_literal(const GroundLiteral& lit, const ChessEvalContext& ctx);
bool eval_literal(const GroundLiteral& lit, const JobShopEvalContext& ctx);

}  // namespace eoda
