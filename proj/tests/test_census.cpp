#include <gtest/gtest.h>

#include "support.hpp"

using namespace areal;
using areal::testing::v;

namespace {

EnumerationOptions threads(unsigned n) {
  EnumerationOptions o;
  o.threads = n;
  return o;
}

}  // namespace

TEST(PointSetTest, SortsAndDeduplicates) {
  const Ring r(RingSpec::prime_field(3));
  const PointSet e(r, {v(2, 1), v(0, 1), v(2, 1)});
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0], v(0, 1));
  EXPECT_TRUE(e.contains(v(2, 1)));
  EXPECT_FALSE(e.contains(v(1, 1)));
  EXPECT_THROW(PointSet(r, {v(3, 0)}), DomainMismatch);
}

TEST(CensusTest, FullPlaneF3PairsHaveThreeClasses) {
  const Ring r(RingSpec::prime_field(3));
  const auto c = count_classes(r, full_plane(r), 1);
  EXPECT_EQ(c.total_classes, 3u);
  EXPECT_EQ(c.total_tuples, BigInt(81));
}

TEST(CensusTest, FullPlaneF3TriplesDivideByGroupOrder) {
  const Ring r(RingSpec::prime_field(3));
  const auto c = count_classes(r, full_plane(r), 2);
  ASSERT_EQ(c.levels.size(), 2u);
  EXPECT_EQ(c.levels[0].tuples % 24, 0u);
  EXPECT_EQ(c.levels[0].classes, c.levels[0].tuples / 24);
  EXPECT_EQ(c.levels[1].classes, 1u);
}

TEST(CensusTest, EmptySetHasNoClasses) {
  const Ring r(RingSpec::prime_field(5));
  const PointSet e(r, {});
  for (std::size_t k = 1; k <= 3; ++k) EXPECT_EQ(count_classes(r, e, k).total_classes, 0u);
}

TEST(CensusTest, MatchesNaiveSignatureSet) {
  const std::vector<std::pair<RingSpec, std::size_t>> cases{{RingSpec::prime_field(3), 3},
                                                             {RingSpec::prime_field(5), 2},
                                                             {RingSpec::galois_field(3, 2), 1},
                                                             {RingSpec::mod_prime_power(3, 2), 1}};
  for (const auto& [spec, max_k] : cases) {
    const Ring r(spec);
    for (std::size_t k = 1; k <= max_k; ++k) {
      const auto e = full_plane(r);
      EXPECT_EQ(count_classes(r, e, k).total_classes, areal::testing::naive_class_count(r, e, k))
          << spec.name() << " k=" << k;
    }
  }
}

TEST(CensusTest, RandomSubsetsMatchNaiveSignatureSet) {
  const Ring r(RingSpec::mod_prime_power(3, 3));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto e = random_subset(r, 12, seed);
    for (std::size_t k = 1; k <= 3; ++k)
      EXPECT_EQ(count_classes(r, e, k).total_classes, areal::testing::naive_class_count(r, e, k));
  }
}

TEST(CensusTest, HashedStorageForLargeSignatureSpaces) {
  // 27^6 signatures exceed the dense tally; |E| keeps the walk short.
  const Ring r(RingSpec::mod_prime_power(3, 3));
  const auto e = random_subset(r, 9, 42);
  const auto tally = tally_signatures(r, e, 3);
  EXPECT_TRUE(std::holds_alternative<ClassTally::Keyed>(tally.counts));
  EXPECT_EQ(tally.class_count(), areal::testing::naive_class_count(r, e, 3));
}

TEST(CensusTest, EncodedStorageWhenIndexOverflows) {
  // 27^15 > 2^64: signatures are keyed by their byte encoding.
  const Ring r(RingSpec::mod_prime_power(3, 3));
  const auto e = random_subset(r, 3, 1);
  const auto tally = tally_signatures(r, e, 5);
  EXPECT_TRUE(std::holds_alternative<ClassTally::Encoded>(tally.counts));
  EXPECT_EQ(tally.class_count(), areal::testing::naive_class_count(r, e, 5));
}

TEST(CensusTest, IndependentOfThreadCount) {
  const Ring r(RingSpec::mod_prime_power(3, 2));
  const auto e = random_subset(r, 40, 3);
  const auto one = count_classes(r, e, 2, threads(1));
  for (unsigned t : {2u, 3u, 7u}) {
    const auto many = count_classes(r, e, 2, threads(t));
    ASSERT_EQ(many.levels.size(), one.levels.size());
    for (std::size_t m = 0; m < one.levels.size(); ++m) {
      EXPECT_EQ(many.levels[m].tuples, one.levels[m].tuples);
      EXPECT_EQ(many.levels[m].classes, one.levels[m].classes);
      EXPECT_EQ(many.levels[m].min_class_size, one.levels[m].min_class_size);
      EXPECT_EQ(many.levels[m].sum_sq_class_sizes, one.levels[m].sum_sq_class_sizes);
    }
    EXPECT_EQ(count_bad_tuples(r, e, 2, threads(t)).per_level, count_bad_tuples(r, e, 2, threads(1)).per_level);
  }
}

TEST(CensusTest, IndependentOfPointOrder) {
  const Ring r(RingSpec::prime_field(7));
  const auto e = random_subset(r, 15, 8);
  std::vector<Vec2> reversed(e.points().rbegin(), e.points().rend());
  const PointSet same(r, reversed);
  EXPECT_EQ(count_classes(r, same, 2).total_classes, count_classes(r, e, 2).total_classes);
}

TEST(CensusTest, BudgetIsEnforced) {
  const Ring r(RingSpec::galois_field(5, 2));
  EnumerationOptions opts;
  opts.budget = 10;
  try {
    count_classes(r, full_plane(r), 3, opts);
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& ex) {
    EXPECT_EQ(ex.required(), 152587890625u);  // 625^4 tuples of the plane
    EXPECT_EQ(ex.budget(), 10u);
  }
}

TEST(BadTupleTest, FullPlaneF3Pairs) {
  const Ring r(RingSpec::prime_field(3));
  const auto counts = count_bad_tuples(r, full_plane(r), 1);
  EXPECT_EQ(counts.bad(), 33u);
  EXPECT_EQ(counts.good(), 48u);
}

TEST(BadTupleTest, SinglePointIsBad) {
  const Ring r(RingSpec::prime_field(5));
  const PointSet e(r, {v(1, 0)});
  for (std::size_t k = 1; k <= 3; ++k) EXPECT_EQ(count_bad_tuples(r, e, k).bad(), 1u);
}

TEST(BadTupleTest, MatchesNaiveLevels) {
  const std::vector<std::pair<RingSpec, std::size_t>> cases{
      {RingSpec::prime_field(3), 3}, {RingSpec::prime_field(5), 2}, {RingSpec::mod_prime_power(3, 2), 1}};
  for (const auto& [spec, max_k] : cases) {
    const Ring r(spec);
    const auto e = full_plane(r);
    for (std::size_t k = 1; k <= max_k; ++k)
      EXPECT_EQ(count_bad_tuples(r, e, k).per_level, areal::testing::naive_level_counts(r, e, k)) << spec.name();
  }
}

TEST(BadTupleTest, FieldPairBoundConstant) {
  for (std::uint32_t q : {3u, 5u, 7u}) {
    const Ring r(RingSpec::prime_field(q));
    const auto e = full_plane(r);
    const auto rep = bad_tuple_bounds(r, e, 1, count_bad_tuples(r, e, 1));
    EXPECT_EQ(rep.bad_bound, BigInt(q) * q * q);
    EXPECT_TRUE(rep.holds()) << "q=" << q << " C=" << to_fraction(rep.bad_constant);
  }
}

TEST(NuTest, FullPlaneF3) {
  const Ring r(RingSpec::prime_field(3));
  const auto h = nu_histogram(r, full_plane(r));
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{33, 24, 24}));
  EXPECT_EQ(h.total(), 81u);
}

TEST(NuTest, OriginOnly) {
  const Ring r(RingSpec::prime_field(5));
  const auto h = nu_histogram(r, PointSet(r, {v(0, 0)}));
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{1, 0, 0, 0, 0}));
}

TEST(NuTest, SumsToPairCountAndMatchesPairClasses) {
  const Ring r(RingSpec::mod_prime_power(3, 2));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto e = random_subset(r, 5 + 7 * seed, seed);
    const auto h = nu_histogram(r, e);
    EXPECT_EQ(h.total(), e.size() * e.size());
    // k = 1 classes are exactly the area values.
    const auto c = count_classes(r, e, 1);
    BigInt sq = 0;
    for (const auto& lv : c.levels) sq += lv.sum_sq_class_sizes;
    EXPECT_EQ(h.sum_squares(), sq);
  }
}

TEST(FProfileTest, FullPlaneIsConstant) {
  const Ring r(RingSpec::prime_field(5));
  const auto group = enumerate_sl2(r);
  const auto p = f_profile(r, full_plane(r), group);
  for (auto f : p.f) EXPECT_EQ(f, 25u);
  EXPECT_EQ(p.residual(), Rational(0));
}

TEST(FProfileTest, PunctureSumMatchesTransitivity) {
  const Ring r(RingSpec::prime_field(3));
  std::vector<Vec2> pts;
  for (auto a : r.elements())
    for (auto b : r.elements())
      if (a != r.zero() || b != r.zero()) pts.push_back(Vec2{a, b});
  const PointSet e(r, pts);
  const auto group = enumerate_sl2(r);
  const auto p = f_profile(r, e, group);
  EXPECT_EQ(p.sum(), BigInt(192));
  // f(identity) = |E| and M <= |E|.
  const auto id = std::find(group.begin(), group.end(), SL2Elem::from_matrix(r, identity(r)));
  EXPECT_EQ(p.f[static_cast<std::size_t>(id - group.begin())], 8u);
  EXPECT_LE(p.max(), 8u);
}

TEST(FProfileTest, ResidualIsNonnegativeOnRandomSets) {
  const Ring r(RingSpec::prime_field(7));
  const auto group = enumerate_sl2(r);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = f_profile(r, random_subset(r, 10, seed), group);
    EXPECT_GE(p.residual(), Rational(0));
  }
}

TEST(MomentIdentityTest, FullPlaneF3) {
  const Ring r(RingSpec::prime_field(3));
  const auto group = enumerate_sl2(r);
  const auto rep = moment_identity_check(r, full_plane(r), group);
  ASSERT_TRUE(rep.quadruple_sum.has_value());
  EXPECT_EQ(*rep.quadruple_sum, rep.sum_f_squared);
  EXPECT_EQ(rep.sum_f_squared, rep.unit_area_part + rep.collinear_part);
  EXPECT_EQ(rep.sum_f_squared, BigInt(24) * 9 * 9);  // f = |E| = 9 everywhere
}

TEST(MomentIdentityTest, GoodPairAndEmpty) {
  const Ring r(RingSpec::prime_field(5));
  const auto group = enumerate_sl2(r);
  const auto pair = moment_identity_check(r, PointSet(r, {v(1, 0), v(0, 1)}), group);
  EXPECT_TRUE(pair.holds());
  EXPECT_TRUE(pair.quadruple_sum.has_value());
  const auto empty = moment_identity_check(r, PointSet(r, {}), group);
  EXPECT_TRUE(empty.holds());
  EXPECT_EQ(empty.sum_f_squared, BigInt(0));
}

TEST(MomentIdentityTest, RandomSubsetsOverZ9) {
  const Ring r(RingSpec::mod_prime_power(3, 2));
  const auto group = enumerate_sl2(r);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto rep = moment_identity_check(r, random_subset(r, 8, seed), group);
    EXPECT_TRUE(rep.holds());
    EXPECT_TRUE(rep.quadruple_sum.has_value());
  }
}

TEST(MomentLiftTest, ConstantTable) {
  std::vector<Rational> values(17, Rational(5));
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto rep = moment_lift_check(values, k);
    EXPECT_EQ(rep.residual, Rational(0));
    EXPECT_TRUE(rep.holds);
  }
}

TEST(MomentLiftTest, IndicatorTable) {
  const std::size_t s = 10;
  std::vector<Rational> values(s, Rational(0));
  values[3] = 1;
  const auto rep = moment_lift_check(values, 2);
  EXPECT_EQ(rep.lhs, Rational(1));
  EXPECT_EQ(rep.mean, Rational(1, 10));
  EXPECT_EQ(rep.residual, Rational(9, 10));
  EXPECT_EQ(rep.c_k, BigInt(16));
  EXPECT_TRUE(rep.holds);
}

TEST(MomentLiftTest, RandomTables) {
  auto g = areal::testing::rng(2024);
  for (int t = 0; t < 300; ++t) {
    const std::size_t size = 1 + g() % 200;
    const std::size_t k = 1 + g() % 4;
    const std::uint64_t cap = 1 + g() % 1000;
    std::vector<Rational> values;
    for (std::size_t i = 0; i < size; ++i) {
      // Mix sparse spikes with dense noise.
      const auto roll = g() % 4;
      values.emplace_back(roll == 0 ? BigInt(0) : BigInt(g() % (roll == 1 ? cap * 10 : cap + 1)));
    }
    const auto rep = moment_lift_check(values, k);
    ASSERT_TRUE(rep.holds) << "table " << t;
  }
}

TEST(MomentLiftTest, RejectsBadInput) {
  std::vector<Rational> empty;
  EXPECT_THROW(moment_lift_check(empty, 1), InvalidArgument);
  std::vector<Rational> negative{Rational(1), Rational(-1)};
  EXPECT_THROW(moment_lift_check(negative, 1), InvalidArgument);
}

TEST(TransitivityTest, FieldConstants) {
  for (const auto& [q, phi] : std::vector<std::pair<std::uint32_t, std::uint64_t>>{{3, 3}, {5, 5}, {7, 7}}) {
    const Ring r(RingSpec::prime_field(q));
    const auto group = enumerate_sl2(r);
    const auto rep = transitivity_constant(r, group);
    EXPECT_TRUE(rep.holds());
    EXPECT_EQ(rep.constant, phi);
    EXPECT_EQ(rep.set_size, std::uint64_t{q} * q - 1);
  }
}

TEST(TransitivityTest, UnitOrbitOverZ9) {
  const Ring r(RingSpec::mod_prime_power(3, 2));
  const auto group = enumerate_sl2(r);
  const auto rep = transitivity_constant(r, group);
  EXPECT_TRUE(rep.holds());
  EXPECT_EQ(rep.set_size, 72u);
  EXPECT_EQ(rep.constant, 9u);
}

TEST(TransitivityTest, NonTransitiveSetGivesCounterexample) {
  const Ring r(RingSpec::mod_prime_power(3, 2));
  const auto group = enumerate_sl2(r);
  const std::vector<Vec2> xs{v(1, 0), v(3, 0)};
  const auto rep = transitivity_constant(r, group, xs);
  EXPECT_FALSE(rep.holds());
  ASSERT_TRUE(rep.counterexample.has_value());
}

TEST(FLemmaTest, FullPlaneF3) {
  const Ring r(RingSpec::prime_field(3));
  const auto group = enumerate_sl2(r);
  for (std::size_t k = 1; k <= 2; ++k) {
    const auto rep = flemma_check(r, full_plane(r), k, group);
    EXPECT_TRUE(rep.holds());
    // Over the full plane every good class is one free orbit.
    EXPECT_EQ(rep.equivalent_good_pairs, rep.good_tuples * 24);
  }
}

TEST(FLemmaTest, LineHasNoGoodTuples) {
  const Ring r(RingSpec::prime_field(5));
  const auto group = enumerate_sl2(r);
  const auto rep = flemma_check(r, line_through_origin(r, v(1, 2)), 2, group);
  EXPECT_EQ(rep.good_tuples, BigInt(0));
  EXPECT_TRUE(rep.holds());
}

TEST(FLemmaTest, RandomSubsetsOverF5) {
  const Ring r(RingSpec::prime_field(5));
  const auto group = enumerate_sl2(r);
  for (std::uint64_t seed = 0; seed < 10; ++seed) EXPECT_TRUE(flemma_check(r, random_subset(r, 10, seed), 2, group).holds());
}

TEST(MBadTest, Z9PairsAndTriples) {
  const Ring r(RingSpec::mod_prime_power(3, 2));
  const auto rep = mbad_class_size_check(r, 2);
  EXPECT_TRUE(rep.holds());
  EXPECT_EQ(rep.census.levels[0].classes, 702u);
  EXPECT_EQ(rep.census.levels[0].min_class_size, 648u);
  EXPECT_EQ(rep.census.levels[1].min_class_size, 2592u);
  EXPECT_GE(rep.census.levels[1].min_class_size, 81u);
  EXPECT_EQ(BigInt(rep.census.levels[0].classes) * 648, BigInt(rep.census.levels[0].tuples));
  EXPECT_TRUE(mbad_class_size_check(r, 1).holds());
}

TEST(MBadTest, FieldsHaveOneBadClass) {
  for (std::uint32_t q : {3u, 5u}) {
    const Ring r(RingSpec::prime_field(q));
    for (std::size_t k = 1; k <= 2; ++k) {
      const auto rep = mbad_class_size_check(r, k);
      EXPECT_EQ(rep.census.bad_classes(), 1u);
      EXPECT_TRUE(rep.holds());
    }
  }
}

TEST(RecoveryTest, F3Exhaustive) {
  const Ring r(RingSpec::prime_field(3));
  const auto group = enumerate_sl2(r);
  for (std::size_t k = 1; k <= 2; ++k) {
    const auto rep = recovery_check(r, full_plane(r), k, group);
    EXPECT_TRUE(rep.holds());
    EXPECT_GT(rep.pairs_checked, 0u);
  }
}
