// Acceptance gate. Each numbered criterion prints exactly one [PASS]/[FAIL]
// line with the measured values; the process exits nonzero if any fail.
// Tolerances and budgets are pinned as named constants below. Criteria that
// compare stochastic runs use fixed seeds, so every number here is
// reproducible bit-for-bit on the same platform.

#include <sys/wait.h>

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "eoda/alignment.hpp"
#include "eoda/background.hpp"
#include "eoda/dbn.hpp"
#include "eoda/eods.hpp"
#include "eoda/oracles.hpp"
#include "eoda/rng.hpp"
#include "eoda/rule_learner.hpp"

namespace fs = std::filesystem;
using namespace eoda;

namespace {

// ---------------------------------------------------------------------- pins

constexpr double kTablebaseBudgetSec = 60.0;  // criterion 1
constexpr std::array<long, KrkTablebase::kMaxDepth + 1> kRefCounts = {
    27, 78, 246, 81, 198, 471, 592, 683, 1433, 1712, 1985, 2854, 3597, 4194, 4553, 2166, 390};
constexpr long kRefDraws = 2796;
constexpr long kRefTotal = 28056;

constexpr double kTvTolerance = 0.05;  // criterion 2a
constexpr int kTvSamples = 120000;
constexpr int kTvSweeps = 25;
constexpr int kCdTrials = 100;  // criterion 2b
constexpr int kCdPositiveMin = 95;
constexpr int kCdReps = 200;  // averaging depth for the expected CD update

constexpr int kClampCalls = 10000;  // criterion 3

constexpr double kMinacc = 0.7;  // criterion 4
constexpr int kTargetTrials = 30;

constexpr int kSeedRuns = 5;  // criteria 5b, 6, 7
constexpr int kPairedWinsMin = 4;

// Criterion 6: the uniform baselines. The exact cumulative tablebase fractions
// are recomputed from the table at run time; the published tuple rounds k = 1
// and disagrees at k = 2 (0.042 against a count-derived 630/28056 = 0.0225),
// so the medians are required to clear whichever is larger.
constexpr std::array<double, 3> kPublishedBaseline = {0.136, 0.042, 0.012};
constexpr double kChessSuiteBudgetSec = 1800.0;

int g_failures = 0;

void verdict(int n, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
  if (!ok) ++g_failures;
  std::fflush(stdout);
}

double median5(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

std::string fmt(double x, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, x);
  return buf;
}

// ------------------------------------------------------------- CLI plumbing

int run_cli(const std::string& args, const fs::path& data_dir, const fs::path& capture,
            std::string* text) {
  std::string cmd = "EODA_DATA_DIR='" + data_dir.string() + "' '" + EODA_CLI_PATH + "' " + args +
                    " > '" + capture.string() + "' 2>&1";
  int rc = std::system(cmd.c_str());
  if (text) {
    std::ifstream in(capture);
    std::stringstream ss;
    ss << in.rdbuf();
    *text = ss.str();
  }
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --------------------------------------------------------- criterion 1

KrkTablebase criterion1(const fs::path& work) {
  auto t0 = std::chrono::steady_clock::now();
  KrkTablebase tb = KrkTablebase::build();
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::string why;
  bool ok = true;
  auto hist = tb.depth_histogram();
  for (int d = 0; d <= KrkTablebase::kMaxDepth; ++d) {
    if (hist[d] != kRefCounts[d]) {
      ok = false;
      why += " depth " + std::to_string(d) + " = " + std::to_string(hist[d]) + " (want " +
             std::to_string(kRefCounts[d]) + ");";
    }
  }
  if (tb.draw_count() != kRefDraws) {
    ok = false;
    why += " draws = " + std::to_string(tb.draw_count()) + ";";
  }
  if (static_cast<long>(tb.size()) != kRefTotal) {
    ok = false;
    why += " total = " + std::to_string(tb.size()) + ";";
  }
  if (tb.mates().size() != 27) {
    ok = false;
    why += " mates = " + std::to_string(tb.mates().size()) + ";";
  }
  if (secs > kTablebaseBudgetSec) {
    ok = false;
    why += " build took " + fmt(secs, 2) + " s (budget " + fmt(kTablebaseBudgetSec, 0) + ");";
  }

  fs::create_directories(work / "data");
  tb.save(work / "data" / "krk.tb");

  std::string out;
  int rc = run_cli("tablebase verify", work / "data", work / "verify_out.txt", &out);
  bool note = out.find("0.152") != std::string::npos && out.find("432/28056") != std::string::npos;
  if (rc != 0) {
    ok = false;
    why += " verify exit " + std::to_string(rc) + ";";
  }
  if (!note) {
    ok = false;
    why += " depth-3 discrepancy note missing from verify output;";
  }

  verdict(1, ok,
          ok ? "tablebase exact: 17 depth counts, draws 2796, total 28056, 27 mates; build " +
                   fmt(secs, 3) + " s; CLI verify exit 0 with the depth-3 note"
             : "tablebase mismatch:" + why);
  return tb;
}

// --------------------------------------------------------- criterion 2

// Boltzmann enumeration straight from the energy definition, independent of
// the library's softplus-based free energy.
std::vector<double> enum_visible(const Rbm& r) {
  const int V = r.visible(), H = r.hidden();
  std::vector<double> p(std::size_t{1} << V, 0.0);
  for (std::uint32_t v = 0; v < (1u << V); ++v) {
    for (std::uint32_t h = 0; h < (1u << H); ++h) {
      double e = 0.0;
      for (int i = 0; i < V; ++i) {
        if (v >> i & 1) e += r.b(i);
      }
      for (int j = 0; j < H; ++j) {
        if (!(h >> j & 1)) continue;
        e += r.c(j);
        for (int i = 0; i < V; ++i) {
          if (v >> i & 1) e += r.W(j, i);
        }
      }
      p[v] += std::exp(e);
    }
  }
  double z = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& x : p) x /= z;
  return p;
}

bool criterion2() {
  // (a) 12-unit model: one top RBM, visible 8 (7 code bits + separator),
  // hidden 4. The sampler's marginal over the code bits must match the
  // enumerated marginal within total variation kTvTolerance.
  Rng rng(0xacce55);
  DbnModel m = DbnModel::create({7, 4}, 0, 0.01f, rng);
  Rbm& top = m.layers.back();
  for (int j = 0; j < top.hidden(); ++j) {
    for (int i = 0; i < top.visible(); ++i) top.W(j, i) = static_cast<float>(rng.normal() * 0.8);
  }
  for (int i = 0; i < top.visible(); ++i) top.b(i) = static_cast<float>(rng.normal() * 0.5);
  for (int j = 0; j < top.hidden(); ++j) top.c(j) = static_cast<float>(rng.normal() * 0.5);

  auto joint = enum_visible(top);
  std::vector<double> exact(128, 0.0);
  for (std::uint32_t v = 0; v < 256; ++v) exact[v & 127] += joint[v];

  TrainConfig scfg;
  scfg.gibbs_steps_sampling = kTvSweeps;
  auto raws = dbn_sample(m, {}, kTvSamples, scfg, rng);
  std::vector<double> emp(128, 0.0);
  for (const auto& raw : raws) {
    std::uint32_t idx = 0;
    for (int i = 0; i < 7; ++i) idx |= static_cast<std::uint32_t>(raw.bits[i]) << i;
    emp[idx] += 1.0 / kTvSamples;
  }
  double tv = 0.0;
  for (int i = 0; i < 128; ++i) tv += std::abs(emp[i] - exact[i]);
  tv *= 0.5;
  bool ok_tv = tv <= kTvTolerance;

  // (b) CD-1 vs the exact log-likelihood gradient on a 6v4h RBM at random
  // parameter points. The expected update is estimated by averaging kCdReps
  // independent CD-1 steps from the same start.
  int positive = 0;
  for (int trial = 0; trial < kCdTrials; ++trial) {
    Rng trng(Rng::mix(0xcd1, trial));
    Rbm r = Rbm::init(6, 4, 0.01f, trng);
    for (int j = 0; j < 4; ++j) {
      for (int i = 0; i < 6; ++i) r.W(j, i) = static_cast<float>(trng.normal() * 0.5);
    }
    for (int i = 0; i < 6; ++i) r.b(i) = static_cast<float>(trng.normal() * 0.5);
    for (int j = 0; j < 4; ++j) r.c(j) = static_cast<float>(trng.normal() * 0.5);

    const int B = 12;
    Eigen::MatrixXf batch(6, B);
    for (int col = 0; col < B; ++col) {
      for (int i = 0; i < 6; ++i) batch(i, col) = trng.bernoulli(0.5) ? 1.0f : 0.0f;
    }

    // Exact gradient of the mean log-likelihood over the batch.
    Eigen::MatrixXd gw = Eigen::MatrixXd::Zero(4, 6);
    Eigen::VectorXd gb = Eigen::VectorXd::Zero(6), gc = Eigen::VectorXd::Zero(4);
    for (int col = 0; col < B; ++col) {
      Eigen::VectorXd v = batch.col(col).cast<double>();
      Eigen::VectorXd hp =
          (1.0 / (1.0 + (-(r.W.cast<double>() * v + r.c.cast<double>())).array().exp())).matrix();
      gw += hp * v.transpose() / B;
      gb += v / B;
      gc += hp / B;
    }
    double z = 0.0;
    Eigen::MatrixXd mw = Eigen::MatrixXd::Zero(4, 6);
    Eigen::VectorXd mb = Eigen::VectorXd::Zero(6), mc = Eigen::VectorXd::Zero(4);
    for (std::uint32_t v = 0; v < 64; ++v) {
      Eigen::VectorXd vv(6);
      for (int i = 0; i < 6; ++i) vv(i) = (v >> i & 1) ? 1.0 : 0.0;
      for (std::uint32_t h = 0; h < 16; ++h) {
        Eigen::VectorXd hh(4);
        for (int j = 0; j < 4; ++j) hh(j) = (h >> j & 1) ? 1.0 : 0.0;
        double e = r.b.cast<double>().dot(vv) + r.c.cast<double>().dot(hh) +
                   hh.dot(r.W.cast<double>() * vv);
        double w = std::exp(e);
        z += w;
        mw += w * hh * vv.transpose();
        mb += w * vv;
        mc += w * hh;
      }
    }
    gw -= mw / z;
    gb -= mb / z;
    gc -= mc / z;

    Eigen::MatrixXd dw = Eigen::MatrixXd::Zero(4, 6);
    Eigen::VectorXd db = Eigen::VectorXd::Zero(6), dc = Eigen::VectorXd::Zero(4);
    for (int rep = 0; rep < kCdReps; ++rep) {
      Rbm step = r;
      rbm_cd_batch(step, batch, 1, 1.0f, trng);
      dw += (step.W - r.W).cast<double>() / kCdReps;
      db += (step.b - r.b).cast<double>() / kCdReps;
      dc += (step.c - r.c).cast<double>() / kCdReps;
    }
    double dot = (dw.array() * gw.array()).sum() + db.dot(gb) + dc.dot(gc);
    if (dot > 0.0) ++positive;
  }
  bool ok_cd = positive >= kCdPositiveMin;

  verdict(2, ok_tv && ok_cd,
          "RBM correctness: enumerated vs Gibbs TV = " + fmt(tv, 4) + " (tol " +
              fmt(kTvTolerance, 2) + "); CD-1 aligned with exact gradient at " +
              std::to_string(positive) + "/" + std::to_string(kCdTrials) + " points (need >= " +
              std::to_string(kCdPositiveMin) + ")");
  return ok_tv && ok_cd;
}

// --------------------------------------------------------- criterion 3

bool criterion3() {
  Rng rng(0xc1a3);
  DbnModel m = DbnModel::create({10, 8, 6}, 3, 0.01f, rng);
  Rbm& top = m.layers.back();
  for (int j = 0; j < top.hidden(); ++j) {
    for (int i = 0; i < top.visible(); ++i) top.W(j, i) = static_cast<float>(rng.normal() * 0.5);
  }
  const int tv = top.visible();

  TrainConfig cfg;  // default 6 sweeps per call
  long violations = 0, observed = 0;
  for (int call = 0; call < kClampCalls; ++call) {
    std::vector<int> idx(tv);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    int k = static_cast<int>(rng.uniform(static_cast<std::uint64_t>(tv) + 1));
    ClampSet clamps;
    for (int i = 0; i < k; ++i) {
      clamps.emplace_back(idx[i], static_cast<std::uint8_t>(rng.bernoulli(0.5) ? 1 : 0));
    }
    auto watch = [&](int, const BitVec& state) {
      ++observed;
      for (auto& [u, bit] : clamps) {
        if (state[static_cast<std::size_t>(u)] != bit) ++violations;
      }
    };
    dbn_sample(m, clamps, 1, cfg, rng, watch);
  }
  bool ok = violations == 0 && observed == static_cast<long>(kClampCalls) * cfg.gibbs_steps_sampling;
  verdict(3, ok,
          "clamping invariant: " + std::to_string(kClampCalls) + " sampling calls, " +
              std::to_string(observed) + " observed sweeps, " + std::to_string(violations) +
              " violations");
  return ok;
}

// --------------------------------------------------------- criterion 4

bool criterion4(const KrkTablebase& tb) {
  const auto catalog = chess_catalog();
  Rng rng(0x1ea51);
  std::string why;
  bool ok = true;

  // (a) Soundness on noisy cost labels: every accepted clause's training
  // precision, recomputed here from the raw contexts, is >= minacc, and the
  // clause's stored statistics agree with the recomputation.
  long clauses_seen = 0;
  for (int round = 0; round < 8; ++round) {
    auto sample = sample_uniform_krk(tb, 500, rng);
    int theta = std::array<int, 4>{8, 4, 10, 6}[round % 4];
    std::vector<ChessEvalContext> pos_ctx, neg_ctx;
    for (const auto& p : sample) {
      bool lab = tb.cost(p).at_most(theta);
      if (rng.bernoulli(0.1)) lab = !lab;  // 10 percent label noise
      (lab ? pos_ctx : neg_ctx).emplace_back(p);
    }
    if (pos_ctx.size() < 2 || neg_ctx.empty()) continue;
    LearnerConfig lcfg;  // defaults: minacc 0.7, max_literals 4
    RuleSet rs = learn_rules(build_literal_matrix(catalog, pos_ctx),
                             build_literal_matrix(catalog, neg_ctx), catalog, lcfg);
    for (const auto& cl : rs.clauses) {
      ++clauses_seen;
      long pc = 0, nc = 0;
      auto covers = [&](const ChessEvalContext& c) {
        for (const auto& lit : cl.body) {
          if (!eval_literal(lit, c)) return false;
        }
        return true;
      };
      for (const auto& c : pos_ctx) pc += covers(c);
      for (const auto& c : neg_ctx) nc += covers(c);
      double prec = static_cast<double>(pc) / static_cast<double>(pc + nc);
      if (prec < kMinacc - 1e-12) {
        ok = false;
        why += " clause below minacc (recomputed " + fmt(prec, 4) + ");";
      }
      if (pc != cl.pos_covered || nc != cl.neg_covered ||
          std::abs(prec - cl.precision) > 1e-9) {
        ok = false;
        why += " stored clause stats disagree with recomputation;";
      }
    }
  }
  if (clauses_seen < 5) {
    ok = false;
    why += " too few clauses learned for the soundness check (" + std::to_string(clauses_seen) +
           ");";
  }

  // (b) Noise-free targets expressible in <= 3 catalog literals are recovered
  // with training recall 1.0 and precision 1.0.
  int reproduced = 0;
  for (int trial = 0; trial < kTargetTrials; ++trial) {
    Rng trng(Rng::mix(0x7a26e7, trial));
    std::vector<GroundLiteral> target;
    std::vector<ChessEvalContext> pos_ctx, neg_ctx;
    for (int attempt = 0; attempt < 200; ++attempt) {
      target.clear();
      int nlits = 1 + static_cast<int>(trng.uniform(3));
      std::vector<std::size_t> picked;
      while (static_cast<int>(target.size()) < nlits) {
        std::size_t i = trng.uniform(catalog.size());
        if (std::find(picked.begin(), picked.end(), i) == picked.end()) {
          picked.push_back(i);
          target.push_back(catalog[i]);
        }
      }
      auto sample = sample_uniform_krk(tb, 600, trng);
      pos_ctx.clear();
      neg_ctx.clear();
      for (const auto& p : sample) {
        ChessEvalContext c(p);
        bool truth = true;
        for (const auto& lit : target) {
          if (!eval_literal(lit, c)) {
            truth = false;
            break;
          }
        }
        (truth ? pos_ctx : neg_ctx).push_back(c);
      }
      if (pos_ctx.size() >= 8 && neg_ctx.size() >= 8) break;
      target.clear();
    }
    if (target.empty()) continue;  // degenerate target family, skip the trial

    LearnerConfig lcfg;
    lcfg.max_literals = 3;
    lcfg.max_nodes = 50000;
    RuleSet rs = learn_rules(build_literal_matrix(catalog, pos_ctx),
                             build_literal_matrix(catalog, neg_ctx), catalog, lcfg);
    auto covered = [&](const ChessEvalContext& c) {
      for (const auto& cl : rs.clauses) {
        bool all = true;
        for (const auto& lit : cl.body) {
          if (!eval_literal(lit, c)) {
            all = false;
            break;
          }
        }
        if (all) return true;
      }
      return false;
    };
    bool perfect = !rs.empty();
    for (const auto& c : pos_ctx) {
      if (!covered(c)) {
        perfect = false;
        break;
      }
    }
    if (perfect) {
      for (const auto& c : neg_ctx) {
        if (covered(c)) {
          perfect = false;
          break;
        }
      }
    }
    if (perfect) ++reproduced;
  }
  if (reproduced < kTargetTrials) {
    ok = false;
    why += " only " + std::to_string(reproduced) + "/" + std::to_string(kTargetTrials) +
           " noise-free targets reproduced exactly;";
  }

  verdict(4, ok,
          ok ? "rule learner sound: " + std::to_string(clauses_seen) +
                   " clauses all >= minacc 0.7 under 10 percent label noise (stats recomputed " +
                   "independently); " + std::to_string(reproduced) + "/" +
                   std::to_string(kTargetTrials) +
                   " noise-free <= 3-literal targets recovered at recall 1.0, precision 1.0"
             : "rule learner:" + why);
  return ok;
}

// --------------------------------------------------------- criterion 5

bool criterion5(const KrkTablebase& tb) {
  ChessDomain dom(tb);
  const auto& catalog = dom.catalog();
  std::string why;
  bool ok = true;

  // (a) Strict mode returns only instances inside the rule success-set.
  auto find_lit = [&](Pred p, int a, Cmp cmp, int t) -> GroundLiteral {
    for (const auto& l : catalog) {
      if (l.pred == p && l.a == a && l.cmp == cmp && l.threshold == t) return l;
    }
    for (const auto& l : catalog) {
      if (l.pred == p) return l;  // parameterless families
    }
    throw std::logic_error("acceptance: literal not in catalog");
  };
  RuleSet H;
  {
    Clause c1, c2;
    c1.body = {find_lit(Pred::DistCheb, static_cast<int>(PiecePair::WkBk), Cmp::Ge, 4)};
    c2.body = {find_lit(Pred::Opposition, 0, Cmp::Le, 0)};
    H.clauses = {c1, c2};
    H.iteration = 1;
    H.theta = 8;
  }
  long strict_returned = 0, strict_aligned = 0;
  for (int s = 0; s < 3; ++s) {
    Rng rng(Rng::mix(0xa119, s));
    DbnModel m = DbnModel::create({48, 12}, 2, 0.01f, rng);
    Rbm& top = m.layers.back();
    for (int j = 0; j < top.hidden(); ++j) {
      for (int i = 0; i < top.visible(); ++i)
        top.W(j, i) = static_cast<float>(rng.normal() * 0.3);
    }
    TrainConfig scfg;
    AlignedConfig acfg;
    acfg.strict = true;
    acfg.pilot_size = 30;
    auto res = sample_aligned(m, H, 150, scfg, acfg, dom, rng);
    if (res.failed || res.instances.empty()) {
      ok = false;
      why += " strict run " + std::to_string(s) + " returned no instances;";
      continue;
    }
    strict_returned += static_cast<long>(res.instances.size());
    for (const auto& inst : res.instances) {
      if (is_aligned(dom.context_of(inst), H)) ++strict_aligned;
    }
  }
  if (strict_aligned != strict_returned) {
    ok = false;
    why += " " + std::to_string(strict_returned - strict_aligned) +
           " strict-mode instances violate every rule body;";
  }

  // (b) Lenient mode: aligned fraction at k* beats the k = 0 pilot in at
  // least kPairedWinsMin of kSeedRuns full loop runs.
  int wins = 0, usable = 0;
  for (int seed = 0; seed < kSeedRuns; ++seed) {
    EodsConfig cfg = EodsConfig::chess_defaults();
    cfg.thresholds = {8};
    cfg.population_size = 400;
    cfg.samples_per_iteration = 300;
    cfg.layer_sizes = {48, 24, 16};
    cfg.train.epochs = 10;
    cfg.alignment.strict = false;
    cfg.seed = static_cast<std::uint64_t>(seed);
    EodsTrace tr = run_eods(cfg, dom);
    const auto& it = tr.iterations.front();
    if (!it.used_alignment || it.rules.empty()) continue;
    ++usable;
    if (it.alignment.final_aligned_fraction >= it.alignment.pilot_fractions[0]) ++wins;
  }
  if (usable < kSeedRuns) {
    ok = false;
    why += " only " + std::to_string(usable) + "/" + std::to_string(kSeedRuns) +
           " lenient runs produced rules;";
  }
  if (wins < kPairedWinsMin) {
    ok = false;
    why += " lenient aligned fraction beat the k=0 pilot in only " + std::to_string(wins) + "/" +
           std::to_string(kSeedRuns) + " runs;";
  }

  verdict(5, ok,
          ok ? "alignment sound: " + std::to_string(strict_returned) +
                   " strict-mode instances all satisfy a rule body; lenient k* fraction >= k=0 " +
                   "pilot in " + std::to_string(wins) + "/" + std::to_string(kSeedRuns) + " runs"
             : "alignment:" + why);
  return ok;
}

// --------------------------------------------------------- criterion 6

bool criterion6(const KrkTablebase& tb) {
  ChessDomain dom(tb);
  EodsConfig base = EodsConfig::chess_defaults();
  base.population_size = 2000;
  base.samples_per_iteration = 600;
  base.layer_sizes = {48, 32, 24};
  base.learner.max_literals = 3;
  base.train.learning_rate = 0.1f;
  base.train.epochs = 100;
  base.train.gibbs_steps_sampling = 30;

  // prec[mode][k][seed], mode 0 = plain DBN, 1 = DBNILP; coverage at k = 4.
  std::array<std::array<std::vector<double>, 3>, 2> prec;
  std::array<std::array<long, kSeedRuns>, 2> cov{};
  auto t0 = std::chrono::steady_clock::now();
  for (int seed = 0; seed < kSeedRuns; ++seed) {
    for (int mode = 0; mode < 2; ++mode) {
      EodsConfig cfg = base;
      cfg.seed = static_cast<std::uint64_t>(seed);
      cfg.use_ilp = mode == 1;
      EodsTrace tr = run_eods(cfg, dom);
      for (int k = 0; k < 3; ++k) prec[mode][k].push_back(tr.iterations[k].prec_model);
      cov[mode][seed] = tr.iterations[3].coverage_a;
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool ok = true;
  std::string why, meds;
  for (int k = 0; k < 3; ++k) {
    double base_k =
        std::max(tb.cumulative_fraction(base.thresholds[k]), kPublishedBaseline[k]);
    double med_dbn = median5(prec[0][k]);
    double med_ilp = median5(prec[1][k]);
    meds += " k=" + std::to_string(k + 1) + ": " + fmt(med_ilp, 3) + " > " + fmt(med_dbn, 3) +
            " > " + fmt(base_k, 3) + ";";
    if (!(med_ilp > med_dbn)) {
      ok = false;
      why += " median ILP " + fmt(med_ilp, 4) + " not above median DBN " + fmt(med_dbn, 4) +
             " at k=" + std::to_string(k + 1) + ";";
    }
    if (!(med_dbn > base_k)) {
      ok = false;
      why += " median DBN " + fmt(med_dbn, 4) + " not above baseline " + fmt(base_k, 4) +
             " at k=" + std::to_string(k + 1) + ";";
    }
  }
  int cov_wins = 0;
  std::string covs;
  for (int s = 0; s < kSeedRuns; ++s) {
    if (cov[1][s] > cov[0][s]) ++cov_wins;
    covs += " " + std::to_string(cov[1][s]) + "v" + std::to_string(cov[0][s]);
  }
  if (cov_wins < kPairedWinsMin) {
    ok = false;
    why += " final depth-0 coverage higher with ILP in only " + std::to_string(cov_wins) + "/" +
           std::to_string(kSeedRuns) + " seeds (ILPvDBN:" + covs + ");";
  }
  if (secs > kChessSuiteBudgetSec) {
    ok = false;
    why += " suite took " + fmt(secs, 1) + " s (budget " + fmt(kChessSuiteBudgetSec, 0) + ");";
  }

  verdict(6, ok,
          ok ? "EODS ordering on chess <8,4,2,0>, 5 seeds: medians" + meds +
                   " ILP coverage wins " + std::to_string(cov_wins) + "/" +
                   std::to_string(kSeedRuns) + " (of 27:" + covs + "); suite " + fmt(secs, 1) +
                   " s"
             : "EODS ordering:" + why);
  return ok;
}

// --------------------------------------------------------- criterion 7

bool criterion7() {
  JobShopInstance inst = random_jobshop_instance(0);
  JobShopDomain dom(inst, 600);
  EodsConfig base = EodsConfig::jobshop_defaults();
  base.population_size = 300;
  base.samples_per_iteration = 300;
  base.layer_sizes = {125, 64, 48};
  base.train.epochs = 10;

  int wins = 0;
  std::string pairs;
  auto t0 = std::chrono::steady_clock::now();
  for (int seed = 0; seed < kSeedRuns; ++seed) {
    double final_cost[2] = {0.0, 0.0};
    for (int mode = 0; mode < 2; ++mode) {
      EodsConfig cfg = base;
      cfg.seed = static_cast<std::uint64_t>(seed);
      cfg.use_ilp = mode == 1;
      EodsTrace tr = run_eods(cfg, dom);
      final_cost[mode] = tr.iterations.back().mean_population_cost;
    }
    if (final_cost[1] < final_cost[0]) ++wins;
    pairs += " " + fmt(final_cost[1], 0) + "v" + fmt(final_cost[0], 0);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = wins >= kPairedWinsMin;

  // Every schedule evaluated above went through JobShopDomain::cost, which
  // throws if the makespan undercuts the job-chain or machine-load lower
  // bound; reaching this line means the invariant held for all of them.
  verdict(7, ok,
          ok ? "job-shop seed-0 instance: ILP final mean cost below plain in " +
                   std::to_string(wins) + "/" + std::to_string(kSeedRuns) + " seeds (ILPvplain:" +
                   pairs + "); lower-bound invariants checked on every cost call; " +
                   fmt(secs, 1) + " s"
             : "job-shop: ILP won only " + std::to_string(wins) + "/" +
                   std::to_string(kSeedRuns) + " seeds (ILPvplain:" + pairs + ")");
  return ok;
}

// --------------------------------------------------------- criterion 8

bool criterion8(const fs::path& work) {
  const std::string flags =
      "run --domain chess --thresholds 8,4 --population 150 --samples 150 --epochs 3 "
      "--layers 48,24,16 --pilot-size 20 --ilp on --seeds 1 --out ";
  std::string out_a, out_b;
  int rc_a = run_cli(flags + "'" + (work / "det_a").string() + "'", work / "data",
                     work / "det_a.txt", &out_a);
  int rc_b = run_cli(flags + "'" + (work / "det_b").string() + "'", work / "data",
                     work / "det_b.txt", &out_b);
  bool ok = rc_a == 0 && rc_b == 0;
  std::string why;
  if (!ok) {
    why = " run exits " + std::to_string(rc_a) + "/" + std::to_string(rc_b) + ";";
  } else {
    auto run_dir = [](const std::string& text) {
      auto p = text.find("run directory: ");
      auto e = text.find('\n', p);
      return text.substr(p + 15, e - (p + 15));
    };
    fs::path csv_a = fs::path(run_dir(out_a)) / "ilp_on" / "seed_0" / "trace.csv";
    fs::path csv_b = fs::path(run_dir(out_b)) / "ilp_on" / "seed_0" / "trace.csv";
    std::string a = slurp(csv_a), b = slurp(csv_b);
    if (a.empty() || a != b) {
      ok = false;
      why = " trace.csv differs between identical runs (" + std::to_string(a.size()) + " vs " +
            std::to_string(b.size()) + " bytes);";
    }
  }
  verdict(8, ok,
          ok ? "determinism: identical config and seed give byte-identical trace.csv "
               "across independent CLI invocations"
             : "determinism:" + why);
  return ok;
}

}  // namespace

int main() {
  fs::path work = fs::temp_directory_path() /
                  ("eoda_acceptance_" + std::to_string(static_cast<long>(::getpid())));
  fs::create_directories(work);

  KrkTablebase tb = criterion1(work);
  criterion2();
  criterion3();
  criterion4(tb);
  criterion5(tb);
  criterion6(tb);
  criterion7();
  criterion8(work);

  std::error_code ec;
  fs::remove_all(work, ec);

  if (g_failures == 0) {
    std::printf("all 8 acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
