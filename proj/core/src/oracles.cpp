#include "eoda/oracles.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace eoda {

// --------------------------------------------------------------------------- KRK build
//
// Retrograde analysis over square-indexed states (wk, wr, bk), Black to move, plus
// the intermediate White-to-move layer. Both layers cover the full 64^3 grid; only
// at the end are Black-to-move states reduced to canonical form.
//
// Value semantics: btm value d = White forces mate in d White moves (0 = mated now);
// DRAW when Black escapes (stalemate, safe rook capture, or White cannot force mate).
// Black maximizes and prefers DRAW, which the successor-counter scheme encodes: a
// Black state resolves to depth d+1 only when its last unresolved successor does,
// and states with any DRAW escape never enter the counter phase.

namespace {

inline int file_of(int s) { return s & 7; }
inline int rank_of(int s) { return s >> 3; }
inline int square(int f, int r) { return r * 8 + f; }
inline int cheb_sq(int a, int b) {
  return std::max(std::abs(file_of(a) - file_of(b)), std::abs(rank_of(a) - rank_of(b)));
}

constexpr int kNStates = 64 * 64 * 64;
inline int state_idx(int wk, int wr, int bk) { return (wk * 64 + wr) * 64 + bk; }

constexpr int kKingDelta[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                  {0, 1},   {1, -1}, {1, 0},  {1, 1}};

// Rook on wr attacks target; the white king is the only blocker that matters (the
// black king standing "between" is the target side's own problem and never occurs
// on the rays we query).
bool rook_attacks(int wr, int target, int wk) {
  if (wr == target) return false;
  if (file_of(wr) == file_of(target)) {
    int lo = std::min(rank_of(wr), rank_of(target)), hi = std::max(rank_of(wr), rank_of(target));
    if (file_of(wk) == file_of(wr) && rank_of(wk) > lo && rank_of(wk) < hi) return false;
    return true;
  }
  if (rank_of(wr) == rank_of(target)) {
    int lo = std::min(file_of(wr), file_of(target)), hi = std::max(file_of(wr), file_of(target));
    if (rank_of(wk) == rank_of(wr) && file_of(wk) > lo && file_of(wk) < hi) return false;
    return true;
  }
  return false;
}

bool static_ok(int wk, int wr, int bk) {
  if (wk == wr || wk == bk || wr == bk) return false;
  return cheb_sq(wk, bk) >= 2;
}

}  // namespace

KrkTablebase KrkTablebase::build() {
  constexpr std::uint8_t UNK = 254, DRAW = 255;

  std::vector<std::uint8_t> btm_legal(kNStates, 0), wtm_legal(kNStates, 0), btm_check(kNStates, 0);
  for (int wk = 0; wk < 64; ++wk) {
    for (int wr = 0; wr < 64; ++wr) {
      for (int bk = 0; bk < 64; ++bk) {
        if (!static_ok(wk, wr, bk)) continue;
        int i = state_idx(wk, wr, bk);
        bool chk = rook_attacks(wr, bk, wk);
        btm_legal[i] = 1;
        btm_check[i] = chk;
        wtm_legal[i] = !chk;  // with White to move, Black must not stand in check
      }
    }
  }

  std::vector<std::uint8_t> btm_val(kNStates, UNK), wtm_val(kNStates, UNK);
  std::vector<std::uint8_t> succ_left(kNStates, 0);

  // Terminal classification of Black-to-move states. A rook capture that the white
  // king does not guard is an immediate draw escape (KvK is a dead draw), and Black
  // prefers it over any losing line, so such states never resolve to a depth.
  std::vector<int> frontier;
  for (int wk = 0; wk < 64; ++wk) {
    for (int wr = 0; wr < 64; ++wr) {
      for (int bk = 0; bk < 64; ++bk) {
        int i = state_idx(wk, wr, bk);
        if (!btm_legal[i]) continue;
        int nmoves = 0;
        bool draw_escape = false;
        for (auto& d : kKingDelta) {
          int f = file_of(bk) + d[0], r = rank_of(bk) + d[1];
          if (f < 0 || f > 7 || r < 0 || r > 7) continue;
          int dest = square(f, r);
          if (dest == wk) continue;
          if (cheb_sq(dest, wk) < 2) continue;
          if (dest == wr) {  // capture; legal because the king guard case is cheb < 2
            draw_escape = true;
            ++nmoves;
            continue;
          }
          if (rook_attacks(wr, dest, wk)) continue;
          ++nmoves;
        }
        if (nmoves == 0) {
          if (btm_check[i]) {
            btm_val[i] = 0;
            frontier.push_back(i);
          } else {
            btm_val[i] = DRAW;  // stalemate
          }
        } else if (draw_escape) {
          btm_val[i] = DRAW;
        } else {
          succ_left[i] = static_cast<std::uint8_t>(nmoves);
        }
      }
    }
  }

  // Frontier sweep. When a White-to-move state first resolves (depth d+1), each of
  // its Black-to-move predecessors loses one unresolved successor; the predecessor
  // resolves to d+1 once no successor is left (Black maximizes, so it waits for all).
  auto notify_btm_preds = [&](int wk, int wr, int bk, int depth1, std::vector<int>& next) {
    for (auto& e : kKingDelta) {
      int bf = file_of(bk) + e[0], br = rank_of(bk) + e[1];
      if (bf < 0 || bf > 7 || br < 0 || br > 7) continue;
      int bkp = square(bf, br);
      if (bkp == wk || bkp == wr) continue;
      int s = state_idx(wk, wr, bkp);
      if (!btm_legal[s]) continue;
      if (btm_val[s] != UNK || succ_left[s] == 0) continue;
      if (--succ_left[s] == 0) {
        btm_val[s] = static_cast<std::uint8_t>(depth1);
        next.push_back(s);
      }
    }
  };

  int depth = 0;
  std::vector<int> next;
  while (!frontier.empty()) {
    next.clear();
    for (int i : frontier) {
      int wk = i >> 12, wr = (i >> 6) & 63, bk = i & 63;
      // White king retro-moves into this Black-to-move state.
      for (auto& d : kKingDelta) {
        int f = file_of(wk) + d[0], r = rank_of(wk) + d[1];
        if (f < 0 || f > 7 || r < 0 || r > 7) continue;
        int wkp = square(f, r);
        if (wkp == wr || wkp == bk) continue;
        int j = state_idx(wkp, wr, bk);
        if (!static_ok(wkp, wr, bk) || !wtm_legal[j]) continue;
        if (wtm_val[j] == UNK) {
          wtm_val[j] = static_cast<std::uint8_t>(depth + 1);
          notify_btm_preds(wkp, wr, bk, depth + 1, next);
        }
      }
      // White rook retro-moves: slide outward until a piece blocks the ray.
      constexpr int kRookDelta[4][2] = {{0, 1}, {0, -1}, {1, 0}, {-1, 0}};
      for (auto& d : kRookDelta) {
        int f = file_of(wr) + d[0], r = rank_of(wr) + d[1];
        while (f >= 0 && f <= 7 && r >= 0 && r <= 7) {
          int wrp = square(f, r);
          if (wrp == wk || wrp == bk) break;
          int j = state_idx(wk, wrp, bk);
          if (static_ok(wk, wrp, bk) && wtm_legal[j] && wtm_val[j] == UNK) {
            wtm_val[j] = static_cast<std::uint8_t>(depth + 1);
            notify_btm_preds(wk, wrp, bk, depth + 1, next);
          }
          f += d[0];
          r += d[1];
        }
      }
    }
    ++depth;
    frontier.swap(next);
  }

  // Unresolved Black-to-move states are drawn: Black holds out forever.
  KrkTablebase tb;
  tb.entries_.reserve(kCanonicalCount);
  for (int wk = 0; wk < 64; ++wk) {
    for (int wr = 0; wr < 64; ++wr) {
      for (int bk = 0; bk < 64; ++bk) {
        int i = state_idx(wk, wr, bk);
        if (!btm_legal[i]) continue;
        KrkPosition p{file_of(wk), rank_of(wk), file_of(wr), rank_of(wr), file_of(bk), rank_of(bk)};
        if (!is_canonical_krk(p)) continue;
        std::uint8_t v = btm_val[i] == UNK ? DRAW : btm_val[i];
        tb.entries_.emplace_back(krk_code(p), v);
      }
    }
  }
  std::sort(tb.entries_.begin(), tb.entries_.end());
  tb.index();
  return tb;
}

void KrkTablebase::index() {
  positions_.clear();
  positions_.reserve(entries_.size());
  by_code_.assign(1u << 18, 254);
  for (auto& [code, v] : entries_) {
    positions_.push_back(krk_from_code(code));
    by_code_[code] = v;
  }
}

void KrkTablebase::save(const std::filesystem::path& p) const {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open tablebase file for writing: " + p.string());
  f.write("KRKTB1", 6);
  for (auto& [code, v] : entries_) {
    char b[5];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((code >> (8 * i)) & 0xff);
    b[4] = static_cast<char>(v);
    f.write(b, 5);
  }
  if (!f) throw std::runtime_error("short write to tablebase file: " + p.string());
}

KrkTablebase KrkTablebase::load(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open tablebase file: " + p.string());
  char magic[6];
  f.read(magic, 6);
  if (!f || std::memcmp(magic, "KRKTB1", 6) != 0)
    throw std::runtime_error("tablebase file has wrong magic: " + p.string());
  KrkTablebase tb;
  tb.entries_.reserve(kCanonicalCount);
  char b[5];
  std::uint32_t prev_code = 0;
  while (f.read(b, 5)) {
    std::uint32_t code = 0;
    for (int i = 0; i < 4; ++i)
      code |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(b[i])) << (8 * i);
    auto v = static_cast<std::uint8_t>(b[4]);
    if (code >= (1u << 18)) throw std::runtime_error("tablebase entry code out of range");
    if (!tb.entries_.empty() && code <= prev_code)
      throw std::runtime_error("tablebase entries not strictly increasing");
    if (v != kDrawByte && v > kMaxDepth) throw std::runtime_error("tablebase cost byte out of range");
    KrkPosition pos = krk_from_code(code);
    if (!is_legal_krk(pos) || !is_canonical_krk(pos))
      throw std::runtime_error("tablebase entry is not a canonical legal position");
    tb.entries_.emplace_back(code, v);
    prev_code = code;
  }
  if (f.gcount() != 0) throw std::runtime_error("tablebase file has trailing bytes");
  if (tb.entries_.size() != kCanonicalCount)
    throw std::runtime_error("tablebase has " + std::to_string(tb.entries_.size()) +
                             " entries, expected " + std::to_string(kCanonicalCount));
  tb.index();
  return tb;
}

Cost KrkTablebase::cost(const KrkPosition& pos) const {
  KrkPosition c = canonicalize_krk(pos);  // throws on illegal input
  std::uint8_t v = by_code_[krk_code(c)];
  if (v == 254) throw std::logic_error("krk cost: canonical position missing from tablebase");
  return v == kDrawByte ? Cost::draw() : Cost::finite_of(v);
}

std::vector<KrkPosition> KrkTablebase::mates() const {
  std::vector<KrkPosition> out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].second == 0) out.push_back(positions_[i]);
  }
  return out;
}

std::array<long, KrkTablebase::kMaxDepth + 1> KrkTablebase::depth_histogram() const {
  std::array<long, kMaxDepth + 1> h{};
  for (auto& [code, v] : entries_) {
    if (v != kDrawByte) ++h[v];
  }
  return h;
}

long KrkTablebase::draw_count() const {
  long n = 0;
  for (auto& [code, v] : entries_) {
    if (v == kDrawByte) ++n;
  }
  return n;
}

double KrkTablebase::cumulative_fraction(int theta) const {
  long n = 0;
  for (auto& [code, v] : entries_) {
    if (v != kDrawByte && v <= theta) ++n;
  }
  return static_cast<double>(n) / static_cast<double>(entries_.size());
}

KrkTablebase build_krk_tablebase() { return KrkTablebase::build(); }

Cost krk_cost(const KrkTablebase& tb, const KrkPosition& pos) { return tb.cost(pos); }

// --------------------------------------------------------------------------- job-shop

int jobshop_sentinel(const JobShopInstance& inst) {
  int total = 0;
  for (int j = 0; j < kJobs; ++j) {
    for (int m = 0; m < kMachines; ++m) total += inst.durations[j][m];
  }
  return total * 5;
}

Timetable simulate_jobshop(const JobShopInstance& inst, const JobShopSchedule& s) {
  validate_jobshop_instance(inst);
  validate_jobshop_schedule(s);

  Timetable tt;
  int next_pos[kMachines] = {};  // next order index to schedule, per machine
  int next_step[kJobs] = {};     // next routing step, per job
  int job_ready[kJobs] = {};     // finish time of the job's latest completed task
  int machine_free[kMachines] = {};
  int remaining = kJobs * kMachines;

  bool progress = true;
  while (remaining > 0 && progress) {
    progress = false;
    for (int m = 0; m < kMachines; ++m) {
      while (next_pos[m] < kJobs) {
        int j = s.orders[m][next_pos[m]];
        if (inst.routings[j][next_step[j]] != m) break;  // job is waiting elsewhere
        int st = std::max(job_ready[j], machine_free[m]);
        int fin = st + inst.durations[j][m];
        tt.start[j][m] = st;
        tt.finish[j][m] = fin;
        job_ready[j] = fin;
        machine_free[m] = fin;
        ++next_step[j];
        ++next_pos[m];
        --remaining;
        progress = true;
      }
    }
  }

  const int sentinel = jobshop_sentinel(inst);
  tt.feasible = remaining == 0;
  if (!tt.feasible) {
    // Unscheduled tasks get the sentinel time so time predicates stay total.
    for (int j = 0; j < kJobs; ++j) {
      for (int si = next_step[j]; si < kMachines; ++si) {
        int m = inst.routings[j][si];
        tt.start[j][m] = sentinel;
        tt.finish[j][m] = sentinel;
      }
    }
  }

  int makespan = 0;
  for (int m = 0; m < kMachines; ++m) {
    int load = 0, last = 0;
    for (int j = 0; j < kJobs; ++j) {
      load += inst.durations[j][m];
      last = std::max(last, tt.finish[j][m]);
    }
    tt.machine_load[m] = load;
    tt.machine_finish[m] = last;
    makespan = std::max(makespan, last);
  }
  tt.makespan = tt.feasible ? makespan : sentinel;
  return tt;
}

Cost jobshop_cost(const JobShopInstance& inst, const JobShopSchedule& s) {
  Timetable tt = simulate_jobshop(inst, s);
  return tt.feasible ? Cost::finite_of(tt.makespan) : Cost::infeasible(tt.makespan);
}

JobShopInstance random_jobshop_instance(std::uint64_t seed) {
  Rng rng(Rng::mix(seed, 0x6a6f6273686f70ULL));  // tag: "jobshop"
  JobShopInstance inst;
  for (int j = 0; j < kJobs; ++j) {
    std::array<int, kMachines> perm;
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> v(perm.begin(), perm.end());
    rng.shuffle(v);
    std::copy(v.begin(), v.end(), inst.routings[j].begin());
    for (int m = 0; m < kMachines; ++m) {
      inst.durations[j][m] = 1 + static_cast<int>(rng.uniform(99));
    }
  }
  validate_jobshop_instance(inst);
  return inst;
}

std::vector<KrkPosition> sample_uniform_krk(const KrkTablebase& tb, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_uniform: n must be >= 1");
  std::vector<KrkPosition> out;
  out.reserve(static_cast<std::size_t>(n));
  const auto& pool = tb.canonical_positions();
  for (int i = 0; i < n; ++i) {
    out.push_back(pool[rng.uniform(pool.size())]);
  }
  return out;
}

std::vector<JobShopSchedule> sample_uniform_jobshop(const JobShopInstance& inst, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_uniform: n must be >= 1");
  validate_jobshop_instance(inst);
  std::vector<JobShopSchedule> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    JobShopSchedule s;
    int stage[kJobs] = {};      // next routing step per job
    int filled[kMachines] = {};  // filled order positions per machine
    int live[kJobs];
    int nlive = kJobs;
    for (int j = 0; j < kJobs; ++j) live[j] = j;
    for (int step = 0; step < kJobs * kMachines; ++step) {
      int pick = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(nlive)));
      int j = live[pick];
      int m = inst.routings[j][stage[j]];
      s.orders[m][filled[m]++] = j;
      if (++stage[j] == kMachines) live[pick] = live[--nlive];
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace eoda
