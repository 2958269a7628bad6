#include "eoda/rule_learner.hpp"

#include <algorithm>
#include <cstdio>
#include <queue>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace eoda {

namespace {

struct Node {
  std::vector<std::uint32_t> lits;  // sorted catalog indices
  double prec = 0.0;
  long p = 0;  // positives covered, counted against the round's remaining set
  long n = 0;  // negatives covered, full set
};

// Score cascade: precision, then positive coverage, then fewer literals, then
// catalog-lexicographic body. Total order on distinct nodes, so the search is
// deterministic.
bool better(const Node& a, const Node& b) {
  if (a.prec != b.prec) return a.prec > b.prec;
  if (a.p != b.p) return a.p > b.p;
  if (a.lits.size() != b.lits.size()) return a.lits.size() < b.lits.size();
  return a.lits < b.lits;
}

struct WorseThan {
  bool operator()(const Node& a, const Node& b) const { return better(b, a); }
};

struct VecHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (std::uint32_t x : v) {
      h ^= x;
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

DynBitset cover_all(const LiteralMatrix& m, const std::vector<std::uint32_t>& lits) {
  DynBitset cov(m.rows, true);
  for (std::uint32_t l : lits) cov &= m.columns[l];
  return cov;
}

}  // namespace

RuleSet learn_rules(const LiteralMatrix& pos, const LiteralMatrix& neg,
                    const std::vector<GroundLiteral>& catalog, const LearnerConfig& cfg) {
  if (catalog.empty()) throw std::invalid_argument("learn_rules: empty literal catalog");
  if (pos.columns.size() != catalog.size() || neg.columns.size() != catalog.size())
    throw std::invalid_argument("learn_rules: truth matrices do not match the catalog");
  if (cfg.minacc <= 0.0 || cfg.minacc > 1.0)
    throw std::invalid_argument("learn_rules: minacc out of (0,1]");
  if (cfg.max_literals < 1 || cfg.max_nodes < 1 || cfg.min_pos_cover < 1)
    throw std::invalid_argument("learn_rules: budgets must be >= 1");

  RuleSet rs;
  DynBitset remaining(pos.rows, true);

  while (remaining.count() >= static_cast<std::size_t>(cfg.min_pos_cover)) {
    // One best-first specialization round against the remaining positives.
    std::priority_queue<Node, std::vector<Node>, WorseThan> open;
    std::unordered_set<std::vector<std::uint32_t>, VecHash> visited;
    Node best;
    bool have_best = false;
    long expansions = 0;

    Node root;
    root.p = static_cast<long>(remaining.count());
    root.n = static_cast<long>(neg.rows);
    root.prec = root.p + root.n > 0 ? static_cast<double>(root.p) / (root.p + root.n) : 0.0;
    open.push(root);

    while (!open.empty() && expansions < cfg.max_nodes) {
      Node cur = open.top();
      open.pop();
      if (static_cast<int>(cur.lits.size()) >= cfg.max_literals) continue;

      // Materialize the parent's coverage once; children then need two popcounts each.
      DynBitset cur_pos = cover_all(pos, cur.lits);
      cur_pos &= remaining;
      DynBitset cur_neg = cover_all(neg, cur.lits);

      for (std::uint32_t l = 0; l < catalog.size() && expansions < cfg.max_nodes; ++l) {
        if (std::binary_search(cur.lits.begin(), cur.lits.end(), l)) continue;
        Node child;
        child.lits = cur.lits;
        child.lits.insert(std::upper_bound(child.lits.begin(), child.lits.end(), l), l);
        if (!visited.insert(child.lits).second) continue;
        ++expansions;
        child.p = static_cast<long>(DynBitset::and_count(cur_pos, pos.columns[l]));
        if (child.p < cfg.min_pos_cover) continue;  // coverage only shrinks below the bar
        child.n = static_cast<long>(DynBitset::and_count(cur_neg, neg.columns[l]));
        child.prec = static_cast<double>(child.p) / (child.p + child.n);
        if (child.prec >= cfg.minacc && (!have_best || better(child, best))) {
          best = child;
          have_best = true;
        }
        // A pure clause cannot improve by specializing; a full-length body cannot grow.
        if (child.n > 0 && static_cast<int>(child.lits.size()) < cfg.max_literals) {
          open.push(std::move(child));
        }
      }
    }

    if (!have_best) break;

    Clause c;
    for (std::uint32_t l : best.lits) c.body.push_back(catalog[l]);
    // Recorded stats run over the full training data; they can only be at least as
    // good as the round-local precision that gated acceptance.
    DynBitset full_pos = cover_all(pos, best.lits);
    DynBitset full_neg = cover_all(neg, best.lits);
    c.pos_covered = static_cast<long>(full_pos.count());
    c.neg_covered = static_cast<long>(full_neg.count());
    c.precision = static_cast<double>(c.pos_covered) / (c.pos_covered + c.neg_covered);
    rs.clauses.push_back(std::move(c));

    remaining -= full_pos;
  }
  return rs;
}

RuleSet learn_rules_chess(const std::vector<KrkPosition>& pos, const std::vector<KrkPosition>& neg,
                          const LearnerConfig& cfg) {
  std::vector<ChessEvalContext> pctx, nctx;
  pctx.reserve(pos.size());
  nctx.reserve(neg.size());
  for (const auto& p : pos) pctx.emplace_back(p);
  for (const auto& p : neg) nctx.emplace_back(p);
  auto catalog = chess_catalog();
  return learn_rules(build_literal_matrix(catalog, pctx), build_literal_matrix(catalog, nctx),
                     catalog, cfg);
}

RuleSet learn_rules_jobshop(const JobShopInstance& inst, const std::vector<JobShopSchedule>& pos,
                            const std::vector<JobShopSchedule>& neg, const LearnerConfig& cfg,
                            const JobShopCatalogConfig& cat_cfg) {
  std::vector<JobShopEvalContext> pctx, nctx;
  pctx.reserve(pos.size());
  nctx.reserve(neg.size());
  for (const auto& s : pos) pctx.emplace_back(inst, s);
  for (const auto& s : neg) nctx.emplace_back(inst, s);
  auto catalog = jobshop_catalog(cat_cfg);
  return learn_rules(build_literal_matrix(catalog, pctx), build_literal_matrix(catalog, nctx),
                     catalog, cfg);
}

// --------------------------------------------------------------------------- features

Feature feature_of(const Clause& h, int index) { return Feature{h, index}; }

std::vector<Feature> features_of(const RuleSet& rs) {
  std::vector<Feature> out;
  out.reserve(rs.clauses.size());
  for (std::size_t j = 0; j < rs.clauses.size(); ++j) {
    out.push_back(feature_of(rs.clauses[j], static_cast<int>(j)));
  }
  return out;
}

RuleSet rules_of(const std::vector<Feature>& fs) {
  RuleSet rs;
  rs.clauses.reserve(fs.size());
  for (const auto& f : fs) rs.clauses.push_back(f.rule);
  return rs;
}

// --------------------------------------------------------------------------- serialization

namespace {

const char* cmp_name(Cmp c) { return c == Cmp::Le ? "le" : "ge"; }

struct PredName {
  Pred pred;
  const char* name;
};

constexpr PredName kPredNames[] = {
    {Pred::DistFile, "dist_file"},
    {Pred::DistRank, "dist_rank"},
    {Pred::DistCheb, "dist_cheb"},
    {Pred::SameFile, "same_file"},
    {Pred::SameRank, "same_rank"},
    {Pred::AlignDist, "align_dist"},
    {Pred::Adjacent, "adjacent"},
    {Pred::Between, "between"},
    {Pred::BkEdgeDist, "bk_edge_dist"},
    {Pred::BkCornerDist, "bk_corner_dist"},
    {Pred::WkCentreDist, "wk_centre_dist"},
    {Pred::Opposition, "kings_in_opposition"},
    {Pred::AlmostOpposition, "kings_almost_in_opposition"},
    {Pred::LShape, "kings_l_shape"},
    {Pred::Early, "early"},
    {Pred::Late, "late"},
    {Pred::FastestTask, "fastest_task"},
    {Pred::SlowestTask, "slowest_task"},
    {Pred::FastTask, "fast_task"},
    {Pred::SlowTask, "slow_task"},
    {Pred::MachineWait, "machine_wait"},
    {Pred::TotalWait, "total_wait"},
    {Pred::PreTaskElapsed, "pre_task_elapsed"},
};

const char* pred_id(Pred p) {
  for (auto& e : kPredNames) {
    if (e.pred == p) return e.name;
  }
  throw std::logic_error("unnamed predicate");
}

Pred pred_from_id(const std::string& s) {
  for (auto& e : kPredNames) {
    if (s == e.name) return e.pred;
  }
  throw std::invalid_argument("unknown predicate id: " + s);
}

}  // namespace

std::string ruleset_to_json(const RuleSet& rs) {
  nlohmann::json j;
  j["iteration"] = rs.iteration;
  j["theta"] = rs.theta;
  j["clauses"] = nlohmann::json::array();
  for (const auto& c : rs.clauses) {
    nlohmann::json cc;
    cc["body"] = nlohmann::json::array();
    for (const auto& lit : c.body) {
      nlohmann::json ll;
      ll["pred"] = pred_id(lit.pred);
      ll["a"] = lit.a;
      ll["b"] = lit.b;
      ll["cmp"] = cmp_name(lit.cmp);
      ll["threshold"] = lit.threshold;
      ll["text"] = describe_literal(lit);
      cc["body"].push_back(ll);
    }
    cc["pos_covered"] = c.pos_covered;
    cc["neg_covered"] = c.neg_covered;
    cc["precision"] = c.precision;
    j["clauses"].push_back(cc);
  }
  return j.dump(2);
}

RuleSet ruleset_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  RuleSet rs;
  rs.iteration = j.value("iteration", 0);
  rs.theta = j.value("theta", 0);
  for (const auto& cc : j.at("clauses")) {
    Clause c;
    for (const auto& ll : cc.at("body")) {
      GroundLiteral lit;
      lit.pred = pred_from_id(ll.at("pred").get<std::string>());
      lit.a = static_cast<std::int16_t>(ll.value("a", 0));
      lit.b = static_cast<std::int16_t>(ll.value("b", 0));
      lit.cmp = ll.value("cmp", std::string("le")) == "ge" ? Cmp::Ge : Cmp::Le;
      lit.threshold = static_cast<std::int16_t>(ll.value("threshold", 0));
      c.body.push_back(lit);
    }
    if (c.body.empty()) throw std::invalid_argument("ruleset json: clause with empty body");
    c.pos_covered = cc.value("pos_covered", 0L);
    c.neg_covered = cc.value("neg_covered", 0L);
    c.precision = cc.value("precision", 0.0);
    rs.clauses.push_back(std::move(c));
  }
  return rs;
}

std::string ruleset_listing(const RuleSet& rs) {
  std::string out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "ruleset: %zu clause(s), iteration %d, theta %d\n",
                rs.clauses.size(), rs.iteration, rs.theta);
  out += buf;
  for (std::size_t i = 0; i < rs.clauses.size(); ++i) {
    const Clause& c = rs.clauses[i];
    out += "  rule " + std::to_string(i + 1) + ": good(x) :- ";
    for (std::size_t k = 0; k < c.body.size(); ++k) {
      if (k) out += ", ";
      out += describe_literal(c.body[k]);
    }
    std::snprintf(buf, sizeof(buf), ".  [pos %ld, neg %ld, prec %.4f]\n", c.pos_covered,
                  c.neg_covered, c.precision);
    out += buf;
  }
  return out;
}

}  // namespace eoda
