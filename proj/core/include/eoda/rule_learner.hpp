#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eoda/background.hpp"
#include "eoda/bitset.hpp"
#include "eoda/encoding.hpp"

namespace eoda {

// ---------------------------------------------------------------------------
// Greedy set-covering clause learner. Each covering round runs a best-first
// top-down specialization from the empty body, adding one catalog literal per
// expansion; the best clause meeting the acceptance bar claims its positives and
// the next round starts. Deterministic by construction: the score order is
// (precision, positive coverage, fewer literals, catalog order), with no random
// tie-breaks, so identical inputs give identical rule sets.
//
// The learner sees instances only through precomputed literal truth columns,
// which keeps it domain-agnostic.
// ---------------------------------------------------------------------------

struct Clause {
  std::vector<GroundLiteral> body;  // non-empty conjunction, stored in catalog order
  long pos_covered = 0;             // training stats over the full dataset
  long neg_covered = 0;
  double precision = 0.0;

  bool operator==(const Clause& o) const { return body == o.body; }
};

struct RuleSet {
  std::vector<Clause> clauses;
  int iteration = 0;  // provenance
  int theta = 0;

  bool empty() const { return clauses.empty(); }
  std::size_t size() const { return clauses.size(); }
};

struct LearnerConfig {
  double minacc = 0.7;
  int max_literals = 4;
  int max_nodes = 5000;
  int min_pos_cover = 2;
};

// Truth columns: matrix[l] is the truth bitmap of catalog literal l, first over the
// positive rows, then (in a parallel matrix) the negative rows.
struct LiteralMatrix {
  std::size_t rows = 0;
  std::vector<DynBitset> columns;  // one per catalog literal
};

template <typename Context>
LiteralMatrix build_literal_matrix(const std::vector<GroundLiteral>& catalog,
                                   const std::vector<Context>& instances) {
  LiteralMatrix m;
  m.rows = instances.size();
  m.columns.reserve(catalog.size());
  for (const auto& lit : catalog) {
    DynBitset col(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (eval_literal(lit, instances[i])) col.set(i);
    }
    m.columns.push_back(std::move(col));
  }
  return m;
}

// pos/neg are truth matrices over the positive and negative examples, aligned on
// the same catalog. Throws on an empty catalog; empty positives give an empty set.
RuleSet learn_rules(const LiteralMatrix& pos, const LiteralMatrix& neg,
                    const std::vector<GroundLiteral>& catalog, const LearnerConfig& cfg);

// Convenience wrappers that evaluate the catalog on raw instances first.
RuleSet learn_rules_chess(const std::vector<KrkPosition>& pos, const std::vector<KrkPosition>& neg,
                          const LearnerConfig& cfg);
RuleSet learn_rules_jobshop(const JobShopInstance& inst, const std::vector<JobShopSchedule>& pos,
                            const std::vector<JobShopSchedule>& neg, const LearnerConfig& cfg,
                            const JobShopCatalogConfig& cat_cfg = {});

// ---------------------------------------------------------------------------
// Clause <-> feature bijection. A feature is a clause tagged with its unit index
// in the DBN's augmented data layer; converting back recovers the clause list.
// ---------------------------------------------------------------------------

struct Feature {
  Clause rule;
  int index = 0;

  bool operator==(const Feature& o) const { return rule == o.rule && index == o.index; }
};

Feature feature_of(const Clause& h, int index = 0);
std::vector<Feature> features_of(const RuleSet& rs);
RuleSet rules_of(const std::vector<Feature>& fs);

// Bit j = truth of clause j's body. Empty rule set gives an empty vector.
template <typename Context>
BitVec eval_features(const RuleSet& rs, const Context& ctx) {
  BitVec out(rs.clauses.size(), 0);
  for (std::size_t j = 0; j < rs.clauses.size(); ++j) {
    bool all = true;
    for (const auto& lit : rs.clauses[j].body) {
      if (!eval_literal(lit, ctx)) {
        all = false;
        break;
      }
    }
    out[j] = all ? 1 : 0;
  }
  return out;
}

// JSON round-trip (clause bodies, stats, provenance) and a human-readable listing.
std::string ruleset_to_json(const RuleSet& rs);
RuleSet ruleset_from_json(const std::string& text);
std::string ruleset_listing(const RuleSet& rs);

}  // namespace eoda
