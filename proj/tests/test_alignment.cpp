#include <doctest.h>

#include <algorithm>
#include <map>
#include <vector>

#include <eoda/alignment.hpp>
#include <eoda/dbn.hpp>
#include <eoda/rng.hpp>

// A minimal test domain: instances are the raw code bits, and literals read
// single bits. Ge literals assert bit[a] == 1; Le literals are tautologies,
// which gives the tie-break tests an always-aligned rule. The overloads live in
// namespace eoda so is_aligned's unqualified eval_literal call resolves to them.
namespace eoda {

struct ToyCtx {
  BitVec bits;
};

inline bool eval_literal(const GroundLiteral& lit, const ToyCtx& ctx) {
  if (lit.cmp == Cmp::Le) return true;
  return ctx.bits.at(static_cast<std::size_t>(lit.a)) == 1;
}

}  // namespace eoda

using namespace eoda;

namespace {

struct ToyDomain {
  using Instance = BitVec;
  Instance decode_repair(const RawSample& raw, Rng&) const { return raw.bits; }
  ToyCtx context_of(const Instance& v) const { return ToyCtx{v}; }
};

RuleSet single_rule(GroundLiteral lit) {
  RuleSet rs;
  Clause c;
  c.body = {lit};
  rs.clauses = {c};
  return rs;
}

GroundLiteral bit_is_one(int a) { return {Pred::Opposition, std::int16_t(a), 0, Cmp::Ge, 0}; }
GroundLiteral tautology() { return {Pred::Opposition, 0, 0, Cmp::Le, 0}; }

// Single-layer model over 6 code bits with one feature unit. Hidden unit 0 binds
// the feature to code bit 0: clamping the feature drives the bit to ~0.99, while
// the free chain collapses to ~0.01. Code bit 5 is biased permanently off.
DbnModel rigged_model() {
  Rng rng(1);
  DbnModel m = DbnModel::create({6, 2}, 1, 0.0f, rng);
  Rbm& t = m.layers.back();
  t.W(0, m.feature_unit(0)) = 16.0f;
  t.W(0, 0) = 10.0f;
  t.b(0) = -5.0f;
  t.b(m.feature_unit(0)) = -20.0f;
  t.b(5) = -50.0f;
  t.c(0) = -12.0f;
  return m;
}

}  // namespace

TEST_CASE("is_aligned is the union of clause success-sets") {
  ToyCtx ctx{BitVec{1, 0, 1, 0}};

  CHECK(!is_aligned(ctx, RuleSet{}));

  RuleSet rs;
  Clause both, miss;
  both.body = {bit_is_one(0), bit_is_one(2)};
  miss.body = {bit_is_one(1)};
  rs.clauses = {miss, both};
  CHECK(is_aligned(ctx, rs));  // second clause fires

  rs.clauses = {miss};
  CHECK(!is_aligned(ctx, rs));

  Clause partial;
  partial.body = {bit_is_one(0), bit_is_one(1)};  // one literal fails the conjunction
  rs.clauses = {partial};
  CHECK(!is_aligned(ctx, rs));
}

TEST_CASE("uniform_subset draws sorted distinct indices with full support") {
  Rng rng(0x737562736574ULL);
  CHECK(detail::uniform_subset(5, 0, rng).empty());
  CHECK(detail::uniform_subset(5, 5, rng) == std::vector<int>{0, 1, 2, 3, 4});

  std::map<std::vector<int>, int> hist;
  for (int i = 0; i < 4000; ++i) {
    auto s = detail::uniform_subset(5, 2, rng);
    REQUIRE(s.size() == 2);
    CHECK(s[0] < s[1]);
    CHECK(s[1] < 5);
    ++hist[s];
  }
  CHECK(hist.size() == 10);  // all C(5,2) pairs occur
  for (auto& [pair, count] : hist) CHECK(count > 4000 / 10 / 3);
}

TEST_CASE("clamps_for pins the chosen features and always the separator") {
  Rng rng(3);
  DbnModel m = DbnModel::create({6, 4}, 3, 0.01f, rng);
  ClampSet cs = detail::clamps_for(m, {0, 2});
  REQUIRE(cs.size() == 3);
  CHECK(cs[0] == std::pair<int, std::uint8_t>{m.feature_unit(0), 1});
  CHECK(cs[1] == std::pair<int, std::uint8_t>{m.feature_unit(2), 1});
  CHECK(cs[2] == std::pair<int, std::uint8_t>{m.separator_index(), 1});

  ClampSet bare = detail::clamps_for(m, {});
  REQUIRE(bare.size() == 1);
  CHECK(bare[0].first == m.separator_index());
}

TEST_CASE("pilot sweep picks the clamp count that maximizes the aligned fraction") {
  DbnModel m = rigged_model();
  RuleSet H = single_rule(bit_is_one(0));
  TrainConfig cfg;
  ToyDomain dom;

  Rng rng(17);
  auto [k_star, rep] = select_clamp_size(m, H, 200, dom, cfg, rng);
  REQUIRE(rep.pilot_fractions.size() == 2);
  CHECK(k_star == 1);
  CHECK(rep.k_star == 1);
  CHECK(rep.pilot_fractions[1] > rep.pilot_fractions[0]);
  CHECK(rep.pilot_fractions[1] > 0.9);
  CHECK(rep.pilot_fractions[0] < 0.2);

  // Identical seeds give identical pilots: each k runs on a split stream.
  Rng r1(99), r2(99);
  auto a = select_clamp_size(m, H, 50, dom, cfg, r1);
  auto b = select_clamp_size(m, H, 50, dom, cfg, r2);
  CHECK(a.second.pilot_fractions == b.second.pilot_fractions);
  CHECK(a.first == b.first);
}

TEST_CASE("ties in the pilot go to the smallest clamp count") {
  DbnModel m = rigged_model();
  TrainConfig cfg;
  ToyDomain dom;

  // Tautological rule: every k measures fraction 1.
  RuleSet always = single_rule(tautology());
  Rng rng(5);
  auto [k_all, rep_all] = select_clamp_size(m, always, 30, dom, cfg, rng);
  CHECK(k_all == 0);
  CHECK(rep_all.pilot_fractions == std::vector<double>{1.0, 1.0});

  // Impossible rule (code bit 5 is biased off): every k measures fraction 0.
  RuleSet never = single_rule(bit_is_one(5));
  Rng rng2(6);
  auto [k_none, rep_none] = select_clamp_size(m, never, 30, dom, cfg, rng2);
  CHECK(k_none == 0);
  CHECK(rep_none.pilot_fractions == std::vector<double>{0.0, 0.0});
}

TEST_CASE("strict mode returns only aligned instances, reporting its rejections") {
  DbnModel m = rigged_model();
  RuleSet H = single_rule(bit_is_one(0));
  TrainConfig cfg;
  ToyDomain dom;
  AlignedConfig acfg;  // strict by default

  Rng rng(23);
  auto out = sample_aligned(m, H, 40, cfg, acfg, dom, rng);
  CHECK(!out.failed);
  REQUIRE(out.instances.size() == 40);
  for (const auto& inst : out.instances) {
    CHECK(is_aligned(dom.context_of(inst), H));  // soundness, no exceptions
  }
  CHECK(out.report.k_star == 1);
  CHECK(out.report.final_aligned_fraction > 0.0);
  CHECK(out.report.final_aligned_fraction <= 1.0);
}

TEST_CASE("strict mode exhausts its budget on an unsatisfiable rule and says so") {
  DbnModel m = rigged_model();
  RuleSet H = single_rule(bit_is_one(5));
  TrainConfig cfg;
  ToyDomain dom;
  AlignedConfig acfg;
  acfg.retry_factor = 20;

  Rng rng(29);
  auto out = sample_aligned(m, H, 5, cfg, acfg, dom, rng);
  CHECK(out.failed);
  CHECK(out.instances.empty());
  // Budget 20 * 5 = 100 raws, every one rejected.
  CHECK(out.report.strict_rejections == 100);
  CHECK(out.report.final_aligned_fraction == 0.0);
}

TEST_CASE("lenient mode returns a full batch and reports the achieved fraction") {
  DbnModel m = rigged_model();
  RuleSet H = single_rule(bit_is_one(0));
  TrainConfig cfg;
  ToyDomain dom;
  AlignedConfig acfg;
  acfg.strict = false;

  int wins = 0, k_star_is_one = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    auto out = sample_aligned(m, H, 300, cfg, acfg, dom, rng);
    CHECK(!out.failed);
    REQUIRE(out.instances.size() == 300);
    wins += out.report.final_aligned_fraction >= out.report.pilot_fractions[0];
    k_star_is_one += out.report.k_star == 1;
  }
  // Clamping at k* must not lose to unclamped sampling on this model.
  CHECK(wins >= 4);
  CHECK(k_star_is_one >= 4);
}

TEST_CASE("an empty rule set degenerates to separator-only sampling") {
  DbnModel m = rigged_model();
  TrainConfig cfg;
  ToyDomain dom;
  AlignedConfig acfg;

  Rng rng(31);
  auto out = sample_aligned(m, RuleSet{}, 25, cfg, acfg, dom, rng);
  CHECK(!out.failed);
  CHECK(out.instances.size() == 25);
  CHECK(out.report.pilot_fractions.empty());
  CHECK(out.report.k_star == 0);
  CHECK(out.report.strict_rejections == 0);
}

TEST_CASE("alignment entry points validate their arguments") {
  DbnModel m = rigged_model();
  RuleSet H = single_rule(bit_is_one(0));
  TrainConfig cfg;
  ToyDomain dom;
  Rng rng(37);

  CHECK_THROWS_AS((void)select_clamp_size(m, RuleSet{}, 10, dom, cfg, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)select_clamp_size(m, H, 0, dom, cfg, rng), std::invalid_argument);

  // Two rules but only one feature unit on the model.
  RuleSet two = H;
  two.clauses.push_back(two.clauses[0]);
  CHECK_THROWS_AS((void)select_clamp_size(m, two, 10, dom, cfg, rng), std::invalid_argument);

  AlignedConfig acfg;
  CHECK_THROWS_AS((void)sample_aligned(m, H, 0, cfg, acfg, dom, rng), std::invalid_argument);
}
