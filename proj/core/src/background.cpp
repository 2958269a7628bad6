#include "eoda/background.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace eoda {

bool is_chess_pred(Pred p) { return p <= Pred::LShape; }
bool is_jobshop_pred(Pred p) { return p >= Pred::Early; }

namespace {

const char* pred_name(Pred p) {
  switch (p) {
    case Pred::DistFile: return "dist_file";
    case Pred::DistRank: return "dist_rank";
    case Pred::DistCheb: return "dist_cheb";
    case Pred::SameFile: return "same_file";
    case Pred::SameRank: return "same_rank";
    case Pred::AlignDist: return "align_dist";
    case Pred::Adjacent: return "adjacent";
    case Pred::Between: return "between";
    case Pred::BkEdgeDist: return "bk_edge_dist";
    case Pred::BkCornerDist: return "bk_corner_dist";
    case Pred::WkCentreDist: return "wk_centre_dist";
    case Pred::Opposition: return "kings_in_opposition";
    case Pred::AlmostOpposition: return "kings_almost_in_opposition";
    case Pred::LShape: return "kings_l_shape";
    case Pred::Early: return "early";
    case Pred::Late: return "late";
    case Pred::FastestTask: return "fastest_task";
    case Pred::SlowestTask: return "slowest_task";
    case Pred::FastTask: return "fast_task";
    case Pred::SlowTask: return "slow_task";
    case Pred::MachineWait: return "machine_wait";
    case Pred::TotalWait: return "total_wait";
    case Pred::PreTaskElapsed: return "pre_task_elapsed";
  }
  return "?";
}

const char* pair_name(int pair) {
  switch (pair) {
    case 0: return "wk,bk";
    case 1: return "wk,wr";
    case 2: return "wr,bk";
  }
  return "?";
}

const char* between_name(int v) {
  switch (v) {
    case 0: return "wr;wk,bk";
    case 1: return "wk;wr,bk";
    case 2: return "bk;wk,wr";
  }
  return "?";
}

bool pred_has_pair(Pred p) {
  return p == Pred::DistFile || p == Pred::DistRank || p == Pred::DistCheb ||
         p == Pred::SameFile || p == Pred::SameRank || p == Pred::Adjacent;
}

bool pred_has_threshold(Pred p) {
  switch (p) {
    case Pred::DistFile:
    case Pred::DistRank:
    case Pred::DistCheb:
    case Pred::AlignDist:
    case Pred::BkEdgeDist:
    case Pred::BkCornerDist:
    case Pred::WkCentreDist:
    case Pred::MachineWait:
    case Pred::TotalWait:
    case Pred::PreTaskElapsed:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::string describe_literal(const GroundLiteral& lit) {
  std::string s = pred_name(lit.pred);
  if (is_chess_pred(lit.pred)) {
    if (pred_has_pair(lit.pred)) {
      s += "(";
      s += pair_name(lit.a);
      s += ")";
    } else if (lit.pred == Pred::Between) {
      s += "(";
      s += between_name(lit.a);
      s += ")";
    } else if (lit.pred == Pred::AlignDist) {
      s += "(wr,bk)";
    }
  } else {
    if (lit.pred == Pred::TotalWait) {
      // no piece args
    } else if (lit.pred == Pred::MachineWait) {
      s += "(m" + std::to_string(lit.b) + ")";
    } else {
      s += "(j" + std::to_string(lit.a) + ",m" + std::to_string(lit.b) + ")";
    }
  }
  if (pred_has_threshold(lit.pred)) {
    s += lit.cmp == Cmp::Le ? " <= " : " >= ";
    s += std::to_string(lit.threshold);
  }
  return s;
}

// --------------------------------------------------------------------------- catalogs

namespace {

// Threshold grid with tautological endpoints removed: <= covers [lo, hi-1],
// >= covers [lo+1, hi].
void push_threshold_family(std::vector<GroundLiteral>& out, Pred p, int a, int b, int lo, int hi,
                           int stride = 1) {
  for (int t = lo; t < hi; t += stride) out.push_back({p, static_cast<std::int16_t>(a),
                                                       static_cast<std::int16_t>(b), Cmp::Le,
                                                       static_cast<std::int16_t>(t)});
  for (int t = lo + stride; t <= hi; t += stride)
    out.push_back({p, static_cast<std::int16_t>(a), static_cast<std::int16_t>(b), Cmp::Ge,
                   static_cast<std::int16_t>(t)});
}

}  // namespace

std::vector<GroundLiteral> chess_catalog() {
  std::vector<GroundLiteral> out;
  for (Pred p : {Pred::DistFile, Pred::DistRank, Pred::DistCheb}) {
    for (int pair = 0; pair < 3; ++pair) push_threshold_family(out, p, pair, 0, 0, 7);
  }
  for (int pair = 0; pair < 3; ++pair) out.push_back({Pred::SameFile, static_cast<std::int16_t>(pair)});
  for (int pair = 0; pair < 3; ++pair) out.push_back({Pred::SameRank, static_cast<std::int16_t>(pair)});
  push_threshold_family(out, Pred::AlignDist, 0, 0, 0, 7);
  for (int pair = 0; pair < 3; ++pair) out.push_back({Pred::Adjacent, static_cast<std::int16_t>(pair)});
  for (int v = 0; v < 3; ++v) out.push_back({Pred::Between, static_cast<std::int16_t>(v)});
  push_threshold_family(out, Pred::BkEdgeDist, 0, 0, 0, 3);
  push_threshold_family(out, Pred::BkCornerDist, 0, 0, 0, 3);
  push_threshold_family(out, Pred::WkCentreDist, 0, 0, 0, 3);
  out.push_back({Pred::Opposition});
  out.push_back({Pred::AlmostOpposition});
  out.push_back({Pred::LShape});
  return out;
}

std::vector<GroundLiteral> jobshop_catalog(const JobShopCatalogConfig& cfg) {
  std::vector<GroundLiteral> out;
  for (Pred p : {Pred::Early, Pred::Late, Pred::FastestTask, Pred::SlowestTask, Pred::FastTask,
                 Pred::SlowTask}) {
    for (int j = 0; j < kJobs; ++j) {
      for (int m = 0; m < kMachines; ++m) out.push_back({p, static_cast<std::int16_t>(j),
                                                         static_cast<std::int16_t>(m)});
    }
  }
  for (int m = 0; m < kMachines; ++m) {
    push_threshold_family(out, Pred::MachineWait, 0, m, 0, cfg.wait_max, cfg.wait_stride);
  }
  push_threshold_family(out, Pred::TotalWait, 0, 0, 0, cfg.total_max, cfg.total_stride);
  for (int j = 0; j < kJobs; ++j) {
    for (int m = 0; m < kMachines; ++m) {
      push_threshold_family(out, Pred::PreTaskElapsed, j, m, 0, cfg.elapsed_max,
                            cfg.elapsed_stride);
    }
  }
  return out;
}

std::vector<PredicateSignature> chess_predicates() {
  return {
      {"dist_file", 2, "piece pair in {wk-bk, wk-wr, wr-bk}; cmp in {<=,>=}", true, 0, 7,
       "absolute file difference of the pair"},
      {"dist_rank", 2, "piece pair; cmp", true, 0, 7, "absolute rank difference of the pair"},
      {"dist_cheb", 2, "piece pair; cmp", true, 0, 7, "Chebyshev distance of the pair"},
      {"same_file", 1, "piece pair", false, 0, 0, "pair shares a file"},
      {"same_rank", 1, "piece pair", false, 0, 0, "pair shares a rank"},
      {"align_dist", 1, "cmp", true, 0, 7,
       "min of BK's file distance and rank distance to the rook's lines"},
      {"adjacent", 1, "piece pair", false, 0, 0, "Chebyshev distance of the pair is 1"},
      {"between", 1, "variant in {wr between kings, wk between wr/bk, bk between wk/wr}", false, 0,
       0, "middle piece strictly inside a file, rank, or diagonal segment of the outer two"},
      {"bk_edge_dist", 1, "cmp", true, 0, 3, "BK distance to the closest board edge"},
      {"bk_corner_dist", 1, "cmp", true, 0, 3, "BK Chebyshev distance to the closest corner"},
      {"wk_centre_dist", 1, "cmp", true, 0, 3,
       "WK Chebyshev distance to the closest of the four centre squares"},
      {"kings_in_opposition", 0, "", false, 0, 0, "kings two apart on one file or rank"},
      {"kings_almost_in_opposition", 0, "", false, 0, 0, "kings two apart on one diagonal"},
      {"kings_l_shape", 0, "", false, 0, 0, "kings a knight's move apart"},
  };
}

std::vector<PredicateSignature> jobshop_predicates() {
  JobShopCatalogConfig cfg;
  return {
      {"early", 2, "job 0..4; machine 0..4", false, 0, 0,
       "job sits at position 0 or 1 of the machine's order"},
      {"late", 2, "job; machine", false, 0, 0, "job sits at position 3 or 4"},
      {"fastest_task", 2, "job; machine", false, 0, 0,
       "the job's duration on the machine equals the machine's minimum"},
      {"slowest_task", 2, "job; machine", false, 0, 0,
       "the job's duration on the machine equals the machine's maximum"},
      {"fast_task", 2, "job; machine", false, 0, 0,
       "duration at most the machine's second-smallest"},
      {"slow_task", 2, "job; machine", false, 0, 0,
       "duration at least the machine's second-largest"},
      {"machine_wait", 2, "machine; cmp", true, 0, cfg.wait_max,
       "idle time of the machine up to its last completion"},
      {"total_wait", 1, "cmp", true, 0, cfg.total_max, "summed idle time over all machines"},
      {"pre_task_elapsed", 3, "job; machine; cmp", true, 0, cfg.elapsed_max,
       "start time of the job's task on the machine"},
  };
}

std::string catalog_json(const std::string& domain) {
  nlohmann::json j;
  std::vector<PredicateSignature> sigs;
  std::vector<GroundLiteral> cat;
  if (domain == "chess") {
    sigs = chess_predicates();
    cat = chess_catalog();
  } else if (domain == "jobshop") {
    sigs = jobshop_predicates();
    cat = jobshop_catalog();
  } else {
    throw std::invalid_argument("unknown domain: " + domain);
  }
  j["domain"] = domain;
  j["predicates"] = nlohmann::json::array();
  for (auto& s : sigs) {
    nlohmann::json e;
    e["id"] = s.id;
    e["arity"] = s.arity;
    e["args"] = s.args;
    if (s.has_threshold) e["threshold_range"] = {s.threshold_min, s.threshold_max};
    e["definition"] = s.definition;
    j["predicates"].push_back(e);
  }
  j["ground_literal_count"] = cat.size();
  nlohmann::json lits = nlohmann::json::array();
  for (auto& lit : cat) lits.push_back(describe_literal(lit));
  j["ground_literals"] = lits;
  return j.dump(2);
}

// --------------------------------------------------------------------------- evaluation

namespace {

struct Sq {
  int f, r;
};

int dist_file(Sq a, Sq b) { return std::abs(a.f - b.f); }
int dist_rank(Sq a, Sq b) { return std::abs(a.r - b.r); }
int dist_cheb(Sq a, Sq b) { return std::max(dist_file(a, b), dist_rank(a, b)); }

// p strictly inside a file, rank, or diagonal segment from a to b.
bool strictly_between(Sq p, Sq a, Sq b) {
  int df = b.f - a.f, dr = b.r - a.r;
  if (df == 0 && dr == 0) return false;
  bool line = df == 0 || dr == 0 || std::abs(df) == std::abs(dr);
  if (!line) return false;
  // collinearity via cross product, then strict interior on both axes
  if ((p.f - a.f) * dr != (p.r - a.r) * df) return false;
  int lof = std::min(a.f, b.f), hif = std::max(a.f, b.f);
  int lor = std::min(a.r, b.r), hir = std::max(a.r, b.r);
  bool inside_f = df == 0 ? p.f == a.f : (p.f > lof && p.f < hif);
  bool inside_r = dr == 0 ? p.r == a.r : (p.r > lor && p.r < hir);
  return inside_f && inside_r;
}

bool cmp_ok(int value, Cmp c, int t) { return c == Cmp::Le ? value <= t : value >= t; }

}  // namespace

bool eval_literal(const GroundLiteral& lit, const ChessEvalContext& ctx) {
  if (!is_chess_pred(lit.pred))
    throw std::invalid_argument("literal/domain mismatch: " + describe_literal(lit) +
                                " is not a chess predicate");
  const KrkPosition& p = ctx.canon;
  Sq wk{p.wk_file, p.wk_rank}, wr{p.wr_file, p.wr_rank}, bk{p.bk_file, p.bk_rank};
  auto pair_of = [&](int tag) -> std::pair<Sq, Sq> {
    switch (tag) {
      case 0: return {wk, bk};
      case 1: return {wk, wr};
      default: return {wr, bk};
    }
  };
  switch (lit.pred) {
    case Pred::DistFile: {
      auto [x, y] = pair_of(lit.a);
      return cmp_ok(dist_file(x, y), lit.cmp, lit.threshold);
    }
    case Pred::DistRank: {
      auto [x, y] = pair_of(lit.a);
      return cmp_ok(dist_rank(x, y), lit.cmp, lit.threshold);
    }
    case Pred::DistCheb: {
      auto [x, y] = pair_of(lit.a);
      return cmp_ok(dist_cheb(x, y), lit.cmp, lit.threshold);
    }
    case Pred::SameFile: {
      auto [x, y] = pair_of(lit.a);
      return x.f == y.f;
    }
    case Pred::SameRank: {
      auto [x, y] = pair_of(lit.a);
      return x.r == y.r;
    }
    case Pred::AlignDist:
      return cmp_ok(std::min(dist_file(wr, bk), dist_rank(wr, bk)), lit.cmp, lit.threshold);
    case Pred::Adjacent: {
      auto [x, y] = pair_of(lit.a);
      return dist_cheb(x, y) == 1;
    }
    case Pred::Between:
      switch (lit.a) {
        case 0: return strictly_between(wr, wk, bk);
        case 1: return strictly_between(wk, wr, bk);
        default: return strictly_between(bk, wk, wr);
      }
    case Pred::BkEdgeDist: {
      int d = std::min(std::min(bk.f, 7 - bk.f), std::min(bk.r, 7 - bk.r));
      return cmp_ok(d, lit.cmp, lit.threshold);
    }
    case Pred::BkCornerDist: {
      int d = std::max(std::min(bk.f, 7 - bk.f), std::min(bk.r, 7 - bk.r));
      return cmp_ok(d, lit.cmp, lit.threshold);
    }
    case Pred::WkCentreDist: {
      int df = wk.f <= 3 ? 3 - wk.f : wk.f - 4;
      int dr = wk.r <= 3 ? 3 - wk.r : wk.r - 4;
      return cmp_ok(std::max(df, dr), lit.cmp, lit.threshold);
    }
    case Pred::Opposition: {
      int df = dist_file(wk, bk), dr = dist_rank(wk, bk);
      return (df == 0 && dr == 2) || (df == 2 && dr == 0);
    }
    case Pred::AlmostOpposition: {
      int df = dist_file(wk, bk), dr = dist_rank(wk, bk);
      return df == 2 && dr == 2;
    }
    case Pred::LShape: {
      int df = dist_file(wk, bk), dr = dist_rank(wk, bk);
      return (df == 1 && dr == 2) || (df == 2 && dr == 1);
    }
    default:
      break;
  }
  throw std::logic_error("unhandled chess predicate");
}

JobShopEvalContext::JobShopEvalContext(const JobShopInstance& instance, const JobShopSchedule& s)
    : inst(&instance), sched(s), tt(simulate_jobshop(instance, s)) {
  for (int m = 0; m < kMachines; ++m) {
    for (int p = 0; p < kJobs; ++p) pos_of[m][s.orders[m][p]] = p;
  }
}

bool eval_literal(const GroundLiteral& lit, const JobShopEvalContext& ctx) {
  if (!is_jobshop_pred(lit.pred))
    throw std::invalid_argument("literal/domain mismatch: " + describe_literal(lit) +
                                " is not a job-shop predicate");
  const int j = lit.a, m = lit.b;
  const auto& dur = ctx.inst->durations;
  auto column_sorted = [&](int mach) {
    std::array<int, kJobs> col;
    for (int q = 0; q < kJobs; ++q) col[q] = dur[q][mach];
    std::sort(col.begin(), col.end());
    return col;
  };
  switch (lit.pred) {
    case Pred::Early:
      return ctx.pos_of[m][j] <= 1;
    case Pred::Late:
      return ctx.pos_of[m][j] >= kJobs - 2;
    case Pred::FastestTask:
      return dur[j][m] == column_sorted(m).front();
    case Pred::SlowestTask:
      return dur[j][m] == column_sorted(m).back();
    case Pred::FastTask:
      return dur[j][m] <= column_sorted(m)[1];
    case Pred::SlowTask:
      return dur[j][m] >= column_sorted(m)[kJobs - 2];
    case Pred::MachineWait:
      return cmp_ok(ctx.tt.machine_wait(m), lit.cmp, lit.threshold);
    case Pred::TotalWait:
      return cmp_ok(ctx.tt.total_wait(), lit.cmp, lit.threshold);
    case Pred::PreTaskElapsed:
      return cmp_ok(ctx.tt.start[j][m], lit.cmp, lit.threshold);
    default:
      break;
  }
  throw std::logic_error("unhandled job-shop predicate");
}

}  // namespace eoda
