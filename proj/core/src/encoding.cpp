#include "eoda/encoding.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace eoda {

namespace {

int cheb(int f1, int r1, int f2, int r2) {
  return std::max(std::abs(f1 - f2), std::abs(r1 - r2));
}

bool in_range8(int v) { return v >= 0 && v < 8; }

// Argmax of probs over [base, base+len), exact ties broken uniformly at random.
int argmax_group(const std::vector<float>& probs, int base, int len, Rng& rng) {
  float best = probs[base];
  int nties = 1;
  for (int i = 1; i < len; ++i) {
    float p = probs[base + i];
    if (p > best) {
      best = p;
      nties = 1;
    } else if (p == best) {
      ++nties;
    }
  }
  int pick = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(nties)));
  for (int i = 0; i < len; ++i) {
    if (probs[base + i] == best && pick-- == 0) return i;
  }
  return len - 1;  // unreachable
}

// One set bit in the group keeps its index; anything else goes through argmax.
int decode_group_repair(const BitVec& bits, const std::vector<float>& probs, int base, int len,
                        Rng& rng) {
  int ones = 0, idx = -1;
  for (int i = 0; i < len; ++i) {
    if (bits[base + i]) {
      ++ones;
      idx = i;
    }
  }
  if (ones == 1) return idx;
  return argmax_group(probs, base, len, rng);
}

}  // namespace

// --------------------------------------------------------------------------- chess

void validate_krk(const KrkPosition& p) {
  const int all[6] = {p.wk_file, p.wk_rank, p.wr_file, p.wr_rank, p.bk_file, p.bk_rank};
  for (int v : all) {
    if (!in_range8(v)) throw std::invalid_argument("krk: coordinate out of [0,8)");
  }
  if (p.wk_file == p.wr_file && p.wk_rank == p.wr_rank)
    throw std::invalid_argument("krk: white king and rook on the same square");
  if (p.wk_file == p.bk_file && p.wk_rank == p.bk_rank)
    throw std::invalid_argument("krk: kings on the same square");
  if (p.wr_file == p.bk_file && p.wr_rank == p.bk_rank)
    throw std::invalid_argument("krk: rook and black king on the same square");
  if (cheb(p.wk_file, p.wk_rank, p.bk_file, p.bk_rank) < 2)
    throw std::invalid_argument("krk: kings adjacent");
}

bool is_legal_krk(const KrkPosition& p) {
  const int all[6] = {p.wk_file, p.wk_rank, p.wr_file, p.wr_rank, p.bk_file, p.bk_rank};
  for (int v : all) {
    if (!in_range8(v)) return false;
  }
  if (p.wk_file == p.wr_file && p.wk_rank == p.wr_rank) return false;
  if (p.wk_file == p.bk_file && p.wk_rank == p.bk_rank) return false;
  if (p.wr_file == p.bk_file && p.wr_rank == p.bk_rank) return false;
  return cheb(p.wk_file, p.wk_rank, p.bk_file, p.bk_rank) >= 2;
}

BitVec encode_krk(const KrkPosition& p) {
  validate_krk(p);
  BitVec v(kKrkBits, 0);
  const int fields[6] = {p.wk_file, p.wk_rank, p.wr_file, p.wr_rank, p.bk_file, p.bk_rank};
  for (int g = 0; g < 6; ++g) v[8 * g + fields[g]] = 1;
  return v;
}

KrkPosition decode_krk(const BitVec& v) {
  if (v.size() != kKrkBits) throw std::invalid_argument("krk decode: expected 48 bits");
  int fields[6];
  for (int g = 0; g < 6; ++g) {
    int ones = 0, idx = -1;
    for (int i = 0; i < 8; ++i) {
      if (v[8 * g + i]) {
        ++ones;
        idx = i;
      }
    }
    if (ones != 1) {
      throw std::invalid_argument("krk decode: group " + std::to_string(g) + " has " +
                                  std::to_string(ones) + " set bits, expected 1");
    }
    fields[g] = idx;
  }
  KrkPosition p{fields[0], fields[1], fields[2], fields[3], fields[4], fields[5]};
  validate_krk(p);
  return p;
}

KrkPosition krk_transform(const KrkPosition& p, int t) {
  if (t < 0 || t >= 8) throw std::invalid_argument("krk transform index out of [0,8)");
  auto tf = [t](int f, int r) -> std::pair<int, int> {
    switch (t) {
      case 0: return {f, r};
      case 1: return {7 - f, r};
      case 2: return {f, 7 - r};
      case 3: return {7 - f, 7 - r};
      case 4: return {r, f};
      case 5: return {7 - r, f};
      case 6: return {r, 7 - f};
      default: return {7 - r, 7 - f};
    }
  };
  KrkPosition q;
  std::tie(q.wk_file, q.wk_rank) = tf(p.wk_file, p.wk_rank);
  std::tie(q.wr_file, q.wr_rank) = tf(p.wr_file, p.wr_rank);
  std::tie(q.bk_file, q.bk_rank) = tf(p.bk_file, p.bk_rank);
  return q;
}

std::uint32_t krk_code(const KrkPosition& p) {
  std::uint32_t c = 0;
  const int fields[6] = {p.wk_file, p.wk_rank, p.wr_file, p.wr_rank, p.bk_file, p.bk_rank};
  for (int v : fields) c = c * 8 + static_cast<std::uint32_t>(v);
  return c;
}

KrkPosition krk_from_code(std::uint32_t code) {
  if (code >= (1u << 18)) throw std::invalid_argument("krk code out of range");
  int fields[6];
  for (int g = 5; g >= 0; --g) {
    fields[g] = static_cast<int>(code % 8);
    code /= 8;
  }
  return {fields[0], fields[1], fields[2], fields[3], fields[4], fields[5]};
}

KrkPosition canonicalize_krk(const KrkPosition& p) {
  validate_krk(p);
  bool found = false;
  KrkPosition best{};
  std::uint32_t best_code = 0;
  for (int t = 0; t < 8; ++t) {
    KrkPosition q = krk_transform(p, t);
    if (q.wk_file > 3 || q.wk_rank > q.wk_file) continue;  // wk outside the triangle
    std::uint32_t c = krk_code(q);
    if (!found || c < best_code) {
      found = true;
      best = q;
      best_code = c;
    }
  }
  // Every wk square maps into the triangle under at least one of the 8 transforms.
  if (!found) throw std::logic_error("krk canonicalize: no transform reached the triangle");
  return best;
}

bool is_canonical_krk(const KrkPosition& p) {
  return is_legal_krk(p) && canonicalize_krk(p) == p;
}

std::string krk_to_line(const KrkPosition& p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%d %d %d %d %d %d", p.wk_file, p.wk_rank, p.wr_file, p.wr_rank,
                p.bk_file, p.bk_rank);
  return buf;
}

KrkPosition krk_from_line(const std::string& line) {
  std::istringstream ss(line);
  int f[6];
  for (int& v : f) {
    if (!(ss >> v)) throw std::invalid_argument("krk parse: expected six integers: " + line);
  }
  std::string rest;
  if (ss >> rest) throw std::invalid_argument("krk parse: trailing tokens: " + line);
  KrkPosition p{f[0], f[1], f[2], f[3], f[4], f[5]};
  validate_krk(p);
  return p;
}

// --------------------------------------------------------------------------- job-shop

namespace {

void require_permutation(const int* row, int n, const char* what) {
  bool seen[16] = {};
  for (int i = 0; i < n; ++i) {
    int v = row[i];
    if (v < 0 || v >= n) throw std::invalid_argument(std::string(what) + ": value out of range");
    if (seen[v]) throw std::invalid_argument(std::string(what) + ": duplicate value");
    seen[v] = true;
  }
}

}  // namespace

void validate_jobshop_instance(const JobShopInstance& inst) {
  for (int j = 0; j < kJobs; ++j) {
    require_permutation(inst.routings[j].data(), kMachines, "jobshop instance routing row");
    for (int m = 0; m < kMachines; ++m) {
      int d = inst.durations[j][m];
      if (d < 1 || d > 99)
        throw std::invalid_argument("jobshop instance: duration out of [1,99]");
    }
  }
}

void validate_jobshop_schedule(const JobShopSchedule& s) {
  for (int m = 0; m < kMachines; ++m) {
    require_permutation(s.orders[m].data(), kJobs, "jobshop schedule machine order");
  }
}

BitVec encode_jobshop(const JobShopSchedule& s) {
  validate_jobshop_schedule(s);
  BitVec v(kJobShopBits, 0);
  for (int m = 0; m < kMachines; ++m) {
    for (int p = 0; p < kJobs; ++p) v[25 * m + 5 * p + s.orders[m][p]] = 1;
  }
  return v;
}

JobShopSchedule decode_jobshop(const BitVec& v) {
  if (v.size() != kJobShopBits) throw std::invalid_argument("jobshop decode: expected 125 bits");
  JobShopSchedule s;
  for (int m = 0; m < kMachines; ++m) {
    for (int p = 0; p < kJobs; ++p) {
      int ones = 0, idx = -1;
      for (int j = 0; j < kJobs; ++j) {
        if (v[25 * m + 5 * p + j]) {
          ++ones;
          idx = j;
        }
      }
      if (ones != 1) {
        throw std::invalid_argument("jobshop decode: machine " + std::to_string(m) + " position " +
                                    std::to_string(p) + " has " + std::to_string(ones) +
                                    " set bits, expected 1");
      }
      s.orders[m][p] = idx;
    }
  }
  validate_jobshop_schedule(s);
  return s;
}

std::string jobshop_to_line(const JobShopSchedule& s) {
  validate_jobshop_schedule(s);
  std::string out;
  for (int m = 0; m < kMachines; ++m) {
    if (m) out += ',';
    for (int p = 0; p < kJobs; ++p) out += static_cast<char>('0' + s.orders[m][p]);
  }
  return out;
}

JobShopSchedule jobshop_from_line(const std::string& line) {
  JobShopSchedule s;
  std::size_t pos = 0;
  for (int m = 0; m < kMachines; ++m) {
    if (m) {
      if (pos >= line.size() || line[pos] != ',')
        throw std::invalid_argument("jobshop parse: expected ',' between machine orders");
      ++pos;
    }
    for (int p = 0; p < kJobs; ++p) {
      if (pos >= line.size() || line[pos] < '0' || line[pos] > '4')
        throw std::invalid_argument("jobshop parse: expected digit in [0,4]");
      s.orders[m][p] = line[pos] - '0';
      ++pos;
    }
  }
  if (pos != line.size()) throw std::invalid_argument("jobshop parse: trailing characters");
  validate_jobshop_schedule(s);
  return s;
}

std::uint64_t jobshop_key(const JobShopSchedule& s) {
  std::uint64_t k = 0;
  for (int m = kMachines - 1; m >= 0; --m) {
    for (int p = kJobs - 1; p >= 0; --p) k = k * 5 + static_cast<std::uint64_t>(s.orders[m][p]);
  }
  return k;
}

// --------------------------------------------------------------------------- repair

KrkPosition repair_krk(const BitVec& bits, const std::vector<float>& probs, Rng& rng) {
  if (bits.size() != kKrkBits || probs.size() != kKrkBits)
    throw std::invalid_argument("krk repair: expected 48 bits and 48 probabilities");
  int f[6];
  for (int g = 0; g < 6; ++g) f[g] = decode_group_repair(bits, probs, 8 * g, 8, rng);
  KrkPosition p{f[0], f[1], f[2], f[3], f[4], f[5]};

  if (!is_legal_krk(p)) {
    // Nearest-square relocation order: Chebyshev distance from the decoded square,
    // then file, then rank. Rook first (off the kings), then the black king.
    auto nearest = [](int fromf, int fromr, auto&& ok) -> std::pair<int, int> {
      int bestf = -1, bestr = -1, bestd = 99;
      for (int ff = 0; ff < 8; ++ff) {
        for (int rr = 0; rr < 8; ++rr) {
          if (!ok(ff, rr)) continue;
          int d = cheb(fromf, fromr, ff, rr);
          if (d < bestd || (d == bestd && (ff < bestf || (ff == bestf && rr < bestr)))) {
            bestd = d;
            bestf = ff;
            bestr = rr;
          }
        }
      }
      return {bestf, bestr};
    };
    if ((p.wr_file == p.wk_file && p.wr_rank == p.wk_rank) ||
        (p.wr_file == p.bk_file && p.wr_rank == p.bk_rank)) {
      auto [nf, nr] = nearest(p.wr_file, p.wr_rank, [&](int ff, int rr) {
        return !(ff == p.wk_file && rr == p.wk_rank) && !(ff == p.bk_file && rr == p.bk_rank);
      });
      p.wr_file = nf;
      p.wr_rank = nr;
    }
    if (!is_legal_krk(p)) {
      auto [nf, nr] = nearest(p.bk_file, p.bk_rank, [&](int ff, int rr) {
        return !(ff == p.wr_file && rr == p.wr_rank) &&
               cheb(ff, rr, p.wk_file, p.wk_rank) >= 2;
      });
      p.bk_file = nf;
      p.bk_rank = nr;
    }
  }
  return canonicalize_krk(p);
}

JobShopSchedule repair_jobshop(const BitVec& bits, const std::vector<float>& probs, Rng& rng) {
  if (bits.size() != kJobShopBits || probs.size() != kJobShopBits)
    throw std::invalid_argument("jobshop repair: expected 125 bits and 125 probabilities");
  JobShopSchedule s;
  for (int m = 0; m < kMachines; ++m) {
    int row[kJobs];
    for (int p = 0; p < kJobs; ++p) {
      row[p] = decode_group_repair(bits, probs, 25 * m + 5 * p, kJobs, rng);
    }
    // First occurrence of each job wins its position; later duplicates become holes.
    bool used[kJobs] = {};
    bool hole[kJobs] = {};
    for (int p = 0; p < kJobs; ++p) {
      if (used[row[p]]) {
        hole[p] = true;
      } else {
        used[row[p]] = true;
      }
    }
    // Fill holes greedily by activation probability: repeatedly place the missing job
    // with the highest probability at any open hole. Exact ties fall back to the
    // caller's generator.
    for (;;) {
      float best = -1.0f;
      std::vector<std::pair<int, int>> ties;  // (position, job)
      for (int p = 0; p < kJobs; ++p) {
        if (!hole[p]) continue;
        for (int j = 0; j < kJobs; ++j) {
          if (used[j]) continue;
          float pr = probs[25 * m + 5 * p + j];
          if (pr > best) {
            best = pr;
            ties.clear();
            ties.emplace_back(p, j);
          } else if (pr == best) {
            ties.emplace_back(p, j);
          }
        }
      }
      if (ties.empty()) break;
      auto [p, j] = ties[rng.uniform(ties.size())];
      row[p] = j;
      hole[p] = false;
      used[j] = true;
    }
    for (int p = 0; p < kJobs; ++p) s.orders[m][p] = row[p];
  }
  validate_jobshop_schedule(s);
  return s;
}

}  // namespace eoda
