#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sqfr/fairness.hpp"

namespace {

using sqfr::Aggregator;
using sqfr::GroupedScores;
using sqfr::Measure;

GroupedScores make(std::map<std::string, std::vector<double>> groups) {
  return {"q", std::move(groups)};
}

TEST(MeanAggregate, HandSummation) {
  const auto agg = sqfr::mean_aggregate(make({{"A", {1, 2, 3}}, {"B", {10, 10}}}));
  EXPECT_EQ(agg.kind, Aggregator::mean);
  EXPECT_DOUBLE_EQ(agg.values.at("A"), 2.0);
  EXPECT_DOUBLE_EQ(agg.values.at("B"), 10.0);
}

TEST(MeanAggregate, Singleton) {
  const auto agg = sqfr::mean_aggregate(make({{"only", {5}}}));
  EXPECT_DOUBLE_EQ(agg.values.at("only"), 5.0);
}

TEST(MeanAggregate, EmptyGroupIsValidationError) {
  EXPECT_THROW(sqfr::mean_aggregate(make({{"A", {1}}, {"B", {}}})), sqfr::ValidationError);
  EXPECT_THROW(sqfr::mean_aggregate(make({})), sqfr::ValidationError);
}

TEST(MeanAggregate, NegativeScoreRejected) {
  EXPECT_THROW(sqfr::mean_aggregate(make({{"A", {1, -2}}})), sqfr::ValidationError);
  EXPECT_THROW(sqfr::mean_aggregate(make({{"A", {NAN}}})), sqfr::ValidationError);
}

TEST(MedianAggregate, OddEvenAndSingleton) {
  const auto agg = sqfr::median_aggregate(
      make({{"odd", {3, 1, 2}}, {"even", {1, 2, 100, 101}}, {"one", {7}}, {"half", {85, 86}}}));
  EXPECT_EQ(agg.kind, Aggregator::median);
  EXPECT_DOUBLE_EQ(agg.values.at("odd"), 2.0);
  EXPECT_DOUBLE_EQ(agg.values.at("even"), 51.0);
  EXPECT_DOUBLE_EQ(agg.values.at("one"), 7.0);
  EXPECT_DOUBLE_EQ(agg.values.at("half"), 85.5);
}

TEST(MedianAggregate, EmptyGroupIsValidationError) {
  EXPECT_THROW(sqfr::median_aggregate(make({{"A", {}}})), sqfr::ValidationError);
}

TEST(LwmAggregate, DegenerateSingleScore) {
  const auto agg = sqfr::lwm_aggregate(make({{"A", {50, 50}}, {"B", {50}}}));
  EXPECT_EQ(agg.kind, Aggregator::lwm);
  EXPECT_DOUBLE_EQ(agg.values.at("A"), 50.0);
  EXPECT_DOUBLE_EQ(agg.values.at("B"), 50.0);
}

TEST(LwmAggregate, MaximumGetsZeroWeight) {
  const auto agg = sqfr::lwm_aggregate(make({{"A", {0, 100}}, {"B", {0}}}));
  EXPECT_DOUBLE_EQ(agg.values.at("A"), 0.0);
  EXPECT_DOUBLE_EQ(agg.values.at("B"), 0.0);
}

TEST(LwmAggregate, ZeroWeightGroupFallsBackToMaximum) {
  const auto agg = sqfr::lwm_aggregate(make({{"A", {0, 50}}, {"B", {100, 100}}}));
  // (1 * 0 + 0.5 * 50) / 1.5
  EXPECT_NEAR(agg.values.at("A"), 16.666666666666668, 1e-12);
  EXPECT_DOUBLE_EQ(agg.values.at("B"), 100.0);
}

TEST(LwmAggregate, WeightsLowScoresMoreThanMean) {
  const auto scores = make({{"A", {60, 70, 80, 90}}, {"B", {75, 75}}});
  const auto lwm = sqfr::lwm_aggregate(scores);
  const auto mean = sqfr::mean_aggregate(scores);
  EXPECT_LT(lwm.values.at("A"), mean.values.at("A"));
  EXPECT_GE(lwm.values.at("A"), 60.0);
  EXPECT_DOUBLE_EQ(lwm.values.at("B"), 75.0);
}

TEST(Gini, FrozenOracleValues) {
  // Exact rational evaluation of the double-sum formula.
  EXPECT_NEAR(sqfr::gini_coefficient(std::vector<double>{81.3, 85.3, 86.1}),
              0.018994855559952513, 1e-15);
  EXPECT_NEAR(sqfr::gini_coefficient(std::vector<double>{35, 95, 89}),
              0.273972602739726, 1e-15);
  EXPECT_NEAR(sqfr::gini_coefficient(std::vector<double>{1, 2, 4, 8}),
              0.5111111111111111, 1e-15);
}

TEST(Gini, MatchesLiteralDoubleLoop) {
  const std::vector<double> v{12.5, 3.0, 99.0, 47.25, 47.25, 0.0, 63.0};
  EXPECT_TRUE(sqfr::oracle::rel_close(sqfr::gini_coefficient(v),
                                      sqfr::oracle::gini_literal(v), 1e-12));
}

TEST(Gini, EqualValuesGiveZero) {
  EXPECT_EQ(sqfr::gini_coefficient(std::vector<double>{4, 4, 4, 4}), 0.0);
  EXPECT_EQ(sqfr::gini_coefficient(std::vector<double>{0, 0}), 0.0);
  EXPECT_EQ(sqfr::gini_coefficient(std::vector<double>{87.5, 87.5, 87.5}), 0.0);
}

TEST(Gini, MaximalInequalityIsOne) {
  EXPECT_DOUBLE_EQ(sqfr::gini_coefficient(std::vector<double>{0, 0, 0, 10}), 1.0);
  EXPECT_DOUBLE_EQ(sqfr::gini_coefficient(std::vector<double>{0, 3}), 1.0);
}

TEST(Gini, DomainErrors) {
  EXPECT_THROW(sqfr::gini_coefficient(std::vector<double>{5}), sqfr::DomainError);
  EXPECT_THROW(sqfr::gini_coefficient(std::vector<double>{}), sqfr::DomainError);
  EXPECT_THROW(sqfr::gini_coefficient(std::vector<double>{1, -1}), sqfr::DomainError);
}

TEST(Gini, FromAggregates) {
  sqfr::GroupAggregates agg{Aggregator::mean, {{"A", 81.3}, {"B", 85.3}, {"C", 86.1}}};
  EXPECT_NEAR(sqfr::gini_coefficient(agg), 0.018994855559952513, 1e-15);
}

TEST(Sqfr, Values) {
  EXPECT_DOUBLE_EQ(sqfr::sqfr(0.0).value, 1.0);
  EXPECT_EQ(sqfr::sqfr(0.0).measure, Measure::mean_gc_sqfr);
  EXPECT_EQ(sqfr::sqfr(0.1, Aggregator::median).measure, Measure::median_gc_sqfr);
  EXPECT_EQ(sqfr::sqfr(0.1, Aggregator::lwm).measure, Measure::lwm_gc_sqfr);
  EXPECT_NEAR(sqfr::sqfr(sqfr::gini_coefficient(std::vector<double>{81.3, 85.3, 86.1})).value,
              0.98, 0.005);
  EXPECT_NEAR(sqfr::sqfr(sqfr::gini_coefficient(std::vector<double>{77, 90, 90})).value, 0.95,
              0.005);
}

TEST(Sqfr, OutOfRangeIsDomainError) {
  EXPECT_THROW(sqfr::sqfr(-0.01), sqfr::DomainError);
  EXPECT_THROW(sqfr::sqfr(1.01), sqfr::DomainError);
  EXPECT_THROW(sqfr::sqfr(NAN), sqfr::DomainError);
  EXPECT_THROW(sqfr::csqfr(2.0), sqfr::DomainError);
}

TEST(Csqfr, Values) {
  EXPECT_DOUBLE_EQ(sqfr::csqfr(0.0).value, 1.0);
  EXPECT_EQ(sqfr::csqfr(0.2).measure, Measure::mean_gc_csqfr);
  EXPECT_EQ(sqfr::csqfr(0.2, Aggregator::lwm).measure, Measure::lwm_gc_csqfr);
  EXPECT_EQ(sqfr::csqfr(0.2, Aggregator::median).measure, Measure::median_gc_csqfr);
  EXPECT_NEAR(sqfr::csqfr(sqfr::gini_coefficient(std::vector<double>{35, 95, 89})).value, 0.38,
              0.005);
  EXPECT_NEAR(sqfr::csqfr(sqfr::gini_coefficient(std::vector<double>{84, 89, 87})).value, 0.94,
              0.005);
  EXPECT_DOUBLE_EQ(sqfr::csqfr(0.5).value, 0.125);
}

TEST(RelevantThresholds, IntegerRange) {
  const auto t = sqfr::relevant_thresholds(make({{"A", {1, 3}}, {"B", {2}}}));
  EXPECT_EQ(t, (std::vector<double>{2, 3}));
}

TEST(RelevantThresholds, AllEqualIsEmpty) {
  EXPECT_TRUE(sqfr::relevant_thresholds(make({{"A", {5, 5}}, {"B", {5}}})).empty());
}

TEST(RelevantThresholds, NonIntegerRangeIsCappedAtMax) {
  const auto t = sqfr::relevant_thresholds(make({{"A", {10.0, 12.5}}, {"B", {11}}}));
  EXPECT_EQ(t, (std::vector<double>{11.0, 12.0, 12.5}));
}

TEST(RelevantThresholds, FractionalStepHasNoNearDuplicateAtMax) {
  const auto t = sqfr::relevant_thresholds(make({{"A", {0.1, 0.3}}, {"B", {0.2}}}), 0.1);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_NEAR(t[0], 0.2, 1e-15);
  EXPECT_EQ(t[1], 0.3);
}

TEST(RelevantThresholds, ObservedMode) {
  const auto t = sqfr::relevant_thresholds(make({{"A", {1, 7, 3}}, {"B", {3, 10}}}), 1.0,
                                           sqfr::ThresholdMode::observed);
  EXPECT_EQ(t, (std::vector<double>{3, 7, 10}));
}

TEST(RelevantThresholds, NonPositiveStepIsDomainError) {
  const auto s = make({{"A", {1, 3}}, {"B", {2}}});
  EXPECT_THROW(sqfr::relevant_thresholds(s, 0.0), sqfr::DomainError);
  EXPECT_THROW(sqfr::relevant_thresholds(s, -1.0), sqfr::DomainError);
}

TEST(DiscardCurve, HandCount) {
  const std::vector<double> thresholds{2, 3};
  const auto c = sqfr::discard_curve(make({{"A", {1, 3}}, {"B", {3, 3}}}), thresholds);
  EXPECT_EQ(c.thresholds, thresholds);
  EXPECT_EQ(c.fractions.at("A"), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(c.fractions.at("B"), (std::vector<double>{0.0, 0.0}));
}

TEST(DiscardCurve, ExtremeThresholds) {
  const std::vector<double> thresholds{0.5, 1, 9, 9.5};
  const auto c = sqfr::discard_curve(make({{"A", {1, 4, 9}}, {"B", {2}}}), thresholds);
  EXPECT_EQ(c.fractions.at("A").front(), 0.0);  // at or below the group minimum
  EXPECT_EQ(c.fractions.at("A")[1], 0.0);
  EXPECT_EQ(c.fractions.at("A").back(), 1.0);   // above the group maximum
  EXPECT_EQ(c.fractions.at("B")[2], 1.0);
}

TEST(DiscardCurve, UnsortedThresholdsRejected) {
  const std::vector<double> thresholds{3, 2};
  EXPECT_THROW(sqfr::discard_curve(make({{"A", {1}}, {"B", {2}}}), thresholds),
               sqfr::DomainError);
}

TEST(Mdg, GapMean) {
  sqfr::DiscardCurve c{{2, 3}, {{"A", {0.5, 0.5}}, {"B", {0, 0}}}};
  EXPECT_DOUBLE_EQ(sqfr::mdg(c).value(), 0.5);
}

TEST(Mdg, IdenticalCurvesGiveZero) {
  sqfr::DiscardCurve c{{1, 2, 3}, {{"A", {0.1, 0.4, 0.9}}, {"B", {0.1, 0.4, 0.9}}}};
  EXPECT_DOUBLE_EQ(sqfr::mdg(c).value(), 0.0);
}

TEST(Mdg, InteriorGroupIgnored) {
  sqfr::DiscardCurve outer{{1, 2, 3}, {{"A", {0.2, 0.6, 1.0}}, {"C", {0.0, 0.1, 0.5}}}};
  sqfr::DiscardCurve with_mid = outer;
  with_mid.fractions["B"] = {0.1, 0.3, 0.7};
  EXPECT_DOUBLE_EQ(sqfr::mdg(outer).value(), sqfr::mdg(with_mid).value());
}

TEST(Mdg, EmptyThresholdsSignalDegenerate) {
  sqfr::DiscardCurve c{{}, {{"A", {}}, {"B", {}}}};
  EXPECT_FALSE(sqfr::mdg(c).has_value());
}

TEST(Mdg, NeedsTwoAlignedGroups) {
  EXPECT_THROW(sqfr::mdg({{1}, {{"A", {0.5}}}}), sqfr::DomainError);
  EXPECT_THROW(sqfr::mdg({{1, 2}, {{"A", {0.5}}, {"B", {0, 1}}}}), sqfr::DomainError);
}

TEST(MdgSqfr, Examples) {
  EXPECT_DOUBLE_EQ(sqfr::mdg_sqfr(make({{"A", {1, 3}}, {"B", {3, 3}}})).value, 0.5);
  EXPECT_DOUBLE_EQ(sqfr::mdg_sqfr(make({{"A", {1, 5, 9}}, {"B", {9, 1, 5}}})).value, 1.0);
  EXPECT_DOUBLE_EQ(sqfr::mdg_sqfr(make({{"A", {7, 7}}, {"B", {7}}})).value, 1.0);
  EXPECT_EQ(sqfr::mdg_sqfr(make({{"A", {1}}, {"B", {2}}})).measure, Measure::mdg_sqfr);
}

TEST(MdgSqfr, MatchesBruteForce) {
  const std::map<std::string, std::vector<double>> groups{
      {"A", {50, 52, 60, 61, 70}}, {"B", {55, 58, 58, 90}}, {"C", {40, 75}}};
  EXPECT_NEAR(sqfr::mdg_sqfr(make(groups)).value, 1.0 - sqfr::oracle::mdg_bruteforce(groups),
              1e-12);
}

TEST(EvaluateComponent, AllEqualGivesOne) {
  const auto scores = sqfr::evaluate_component(make(
      {{"A", {87.5}}, {"B", {87.5}}, {"C", {87.5}}, {"D", {87.5}}, {"E", {87.5}}}));
  ASSERT_EQ(scores.size(), 6u);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    EXPECT_EQ(scores[i].measure, sqfr::kReportMeasures[i]);
    EXPECT_EQ(scores[i].value, 1.0);
  }
}

TEST(EvaluateComponent, OneStrongBiasMeans) {
  const auto scores = sqfr::evaluate_component(
      make({{"A", {31.4}}, {"B", {84.4}}, {"C", {84.9}}, {"D", {85.2}}, {"E", {86.8}}}));
  EXPECT_NEAR(scores[0].value, 0.85, 0.005);
  EXPECT_NEAR(scores[2].value, 0.61, 0.005);
}

TEST(EvaluateComponent, AgreesWithEvaluateMeasure) {
  const auto s = make({{"A", {60, 72, 73, 90}}, {"B", {80, 81, 99}}, {"C", {65, 66}}});
  const auto all = sqfr::evaluate_component(s);
  for (const auto& f : all) {
    EXPECT_DOUBLE_EQ(sqfr::evaluate_measure(s, f.measure).value, f.value);
  }
}

TEST(EvaluateComponent, SingleGroupIsDomainError) {
  EXPECT_THROW(sqfr::evaluate_component(make({{"A", {1, 2}}})), sqfr::DomainError);
}

TEST(MeasureNames, RoundTrip) {
  for (auto m : sqfr::kReportMeasures) {
    EXPECT_EQ(sqfr::parse_measure(sqfr::measure_name(m)), m);
  }
  EXPECT_EQ(sqfr::parse_measure("lwm-csqfr"), Measure::lwm_gc_csqfr);
  EXPECT_FALSE(sqfr::parse_measure("gini").has_value());
}

}  // namespace
