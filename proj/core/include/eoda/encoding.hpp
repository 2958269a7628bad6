#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eoda/rng.hpp"

namespace eoda {

// Bit vector over {0,1}, one byte per bit. All model layers and codecs use this.
using BitVec = std::vector<std::uint8_t>;

// ---------------------------------------------------------------------------
// KRK endgame positions, Black to move.
//
// Files and ranks are 0-indexed (a1 = file 0, rank 0). A position is the tuple
// (wk_file, wk_rank, wr_file, wr_rank, bk_file, bk_rank). Legality:
//   * all three squares distinct,
//   * kings not adjacent (Chebyshev distance >= 2).
// Black being in check is allowed (it is Black's move); the rook may be en prise.
//
// Binary encoding: 48 bits, six one-hot groups of 8 in the field order above.
// Bit 8*g + v is set iff field g has value v.
// ---------------------------------------------------------------------------

struct KrkPosition {
  int wk_file = 0, wk_rank = 0;
  int wr_file = 0, wr_rank = 0;
  int bk_file = 0, bk_rank = 0;

  bool operator==(const KrkPosition&) const = default;
};

inline constexpr int kKrkBits = 48;

// Throws std::invalid_argument naming the violated invariant; is_legal_krk is the
// non-throwing twin.
void validate_krk(const KrkPosition& p);
bool is_legal_krk(const KrkPosition& p);

BitVec encode_krk(const KrkPosition& p);

// Strict decode: each 8-bit group must be exactly one-hot and the decoded position
// legal. Errors name the offending group or invariant.
KrkPosition decode_krk(const BitVec& v);

// The 8 board symmetries (identity, file mirror, rank mirror, 180 rotation, and the
// four diagonal variants). t in [0, 8). Exposed for tests.
KrkPosition krk_transform(const KrkPosition& p, int t);

// Representative of the symmetry class: white king confined to the a1-d1-d4 triangle
// (file <= 3, rank <= file); ties broken by the lexicographically smallest tuple
// (wk_file, wk_rank, wr_file, wr_rank, bk_file, bk_rank).
KrkPosition canonicalize_krk(const KrkPosition& p);

bool is_canonical_krk(const KrkPosition& p);

// Packed code with wk_file as the most significant base-8 digit, so numeric order
// equals lexicographic tuple order. Range [0, 8^6).
std::uint32_t krk_code(const KrkPosition& p);
KrkPosition krk_from_code(std::uint32_t code);

// Text form "wk_file wk_rank wr_file wr_rank bk_file bk_rank", e.g. "0 0 3 7 0 2".
std::string krk_to_line(const KrkPosition& p);
KrkPosition krk_from_line(const std::string& line);

// ---------------------------------------------------------------------------
// 5x5 job-shop.
//
// An instance fixes, per job, the machine visiting order (routings[j][s] = machine
// of job j's s-th task) and per (job, machine) an integer duration in [1, 99].
// A candidate solution lists, per machine, the job processing order.
//
// Binary encoding: 125 bits. Bit 25*m + 5*p + j is set iff machine m processes job
// j in position p. A valid schedule sets each (m, p) group to exactly one job and
// each machine's row to a permutation.
// ---------------------------------------------------------------------------

inline constexpr int kJobs = 5;
inline constexpr int kMachines = 5;
inline constexpr int kJobShopBits = kMachines * kJobs * kJobs;

struct JobShopInstance {
  // routings[j][s]: machine of job j's s-th task; each row is a permutation of machines.
  std::array<std::array<int, kMachines>, kJobs> routings{};
  // durations[j][m]: processing time of job j on machine m, in [1, 99].
  std::array<std::array<int, kMachines>, kJobs> durations{};

  bool operator==(const JobShopInstance&) const = default;
};

struct JobShopSchedule {
  // orders[m][p]: job processed p-th on machine m; each row is a permutation of jobs.
  std::array<std::array<int, kJobs>, kMachines> orders{};

  bool operator==(const JobShopSchedule&) const = default;
};

void validate_jobshop_instance(const JobShopInstance& inst);
void validate_jobshop_schedule(const JobShopSchedule& s);

BitVec encode_jobshop(const JobShopSchedule& s);

// Strict decode: every (machine, position) group one-hot, every machine row a
// permutation.
JobShopSchedule decode_jobshop(const BitVec& v);

// Text form: five comma-separated machine orders, each five digits, e.g.
// "01234,13024,20431,34210,42103".
std::string jobshop_to_line(const JobShopSchedule& s);
JobShopSchedule jobshop_from_line(const std::string& line);

// Packed identity for dedup: 25 base-5 digits, orders[0][0] least significant.
std::uint64_t jobshop_key(const JobShopSchedule& s);

// ---------------------------------------------------------------------------
// Repair. Raw model samples carry both sampled bits and the per-bit visible
// activation probabilities; repair projects them onto the nearest valid object.
//
// One-hot repair per group: if the group has exactly one set bit, keep it;
// otherwise take the argmax of the activation probabilities, breaking exact ties
// uniformly at random from the caller's generator. (A deterministic lowest-index
// rule would bias an untrained model's output toward value 0; random tie-breaks
// keep uniform samplers uniform while staying reproducible under a fixed seed.)
// ---------------------------------------------------------------------------

// Chess: one-hot repair per field, then if the decoded position is illegal move the
// rook off an occupied square (nearest square by Chebyshev distance, then file, then
// rank) and the black king to the nearest square restoring legality, and finally
// canonicalize.
KrkPosition repair_krk(const BitVec& bits, const std::vector<float>& probs, Rng& rng);

// Job-shop: one-hot repair per (machine, position) group, then per machine keep the
// first occurrence of each duplicated job and fill the holes with the missing jobs,
// assigning the highest-probability (hole, job) pairs first.
JobShopSchedule repair_jobshop(const BitVec& bits, const std::vector<float>& probs, Rng& rng);

}  // namespace eoda
