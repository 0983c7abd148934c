#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "monotest/calibration.hpp"
#include "monotest/gauss.hpp"
#include "monotest/hypothesis_tests.hpp"
#include "monotest/null_dists.hpp"
#include "monotest/random.hpp"
#include "test_support.hpp"

namespace {

using namespace monotest;

CoefficientField null_field(int levels, std::uint64_t seed) { return simulate_observation(CoefficientField(levels, 1.0), seed); }

TEST(SingleSimple, Boundary) {
  const double s = 2.5;
  EXPECT_FALSE(single_level_simple(0.0, s, 0.05).rejects());
  EXPECT_FALSE(single_level_simple(0.0, s, 0.49).rejects());
  EXPECT_TRUE(single_level_simple(-s * 1.6449, s, 0.05).rejects());
  EXPECT_FALSE(single_level_simple(-s * 1.6448, s, 0.05).rejects());
  const auto r = single_level_simple(-s * 1.6449, s, 0.05);
  EXPECT_NEAR(r.critical_value, 1.6448536269514722, 1e-12);
  EXPECT_NEAR(r.statistic, 1.6449, 1e-12);
  EXPECT_THROW(static_cast<void>(single_level_simple(1.0, 0.0, 0.05)), std::domain_error);
}

TEST(SingleSimple, ThresholdAndScoreFormsAgree) {
  Engine eng(17);
  std::uniform_real_distribution<double> a(1e-4, 0.5), z(-6.0, 6.0), s(0.01, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double alpha = a(eng), sigma = s(eng), theta = z(eng) * sigma;
    const double t = quantile(boost::math::normal(), 1.0 - alpha);
    TestReport r;
    ASSERT_NO_THROW(r = single_level_simple(theta, sigma, alpha));
    // skip draws within rounding of the boundary
    if (std::abs(theta / sigma + t) < 1e-9) continue;
    EXPECT_EQ(r.rejects(), theta / sigma <= -t) << theta << " " << sigma << " " << alpha;
  }
}

TEST(SingleMl, Values) {
  EXPECT_EQ(single_level_ml_statistic(0.0, 3.0), 1.0);
  EXPECT_NEAR(single_level_ml_statistic(-3.0, 3.0), std::exp(0.5), 1e-15);
  EXPECT_NEAR(single_level_ml_statistic(3.0, 3.0), std::exp(-0.5), 1e-15);
  double prev = std::numeric_limits<double>::infinity();
  for (double th = -10.0; th <= 10.0; th += 0.01) {
    const double v = single_level_ml_log_statistic(th, 1.3);
    EXPECT_LT(v, prev);
    prev = v;
  }
  // ML rejects above exp(t^2/2) exactly when the simple test rejects
  const double t = normal_quantile(0.95);
  for (double th = -4.0; th <= 4.0; th += 0.0173) {
    if (std::abs(th + t) < 1e-9) continue;
    EXPECT_EQ(single_level_ml_log_statistic(th, 1.0) >= 0.5 * t * t, single_level_simple(th, 1.0, 0.05).rejects());
  }
}

TEST(BayesLevel, ExactCases) {
  CoefficientField f(6, 1.0);
  for (int k = 1; k <= 6; ++k) {
    const auto b = bayes_level_statistic(f, k);
    EXPECT_NEAR(b.B, 1.0, 1e-15);
    EXPECT_NEAR(b.Z, 2.0 - std::log(static_cast<double>(grid_size(k))) - kEulerGamma, 1e-14);
  }
  f.at({1, 0}) = -1.7;
  EXPECT_NEAR(bayes_level_statistic(f, 1).B, score(-1.7 / f.sigma_h(1)).value(), 1e-12);
  auto deep = CoefficientField::with_level_scales(2, {1.0, 0.0});
  EXPECT_THROW(static_cast<void>(bayes_level_statistic(deep, 2)), std::domain_error);
}

TEST(BayesLevel, NullMatchesUniformRepresentation) {
  const int k = 11;  // n_h = 1024
  const std::size_t reps = 3000;
  std::vector<double> from_fields(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    CoefficientField f = CoefficientField::with_level_scales(k, std::vector<double>(k, 1.0));
    Engine eng = make_engine(404, r);
    std::normal_distribution<double> g;
    for (double& v : f.level(k)) v = g(eng);
    from_fields[r] = bayes_level_statistic(f, k).B;
  }
  const auto ref = simulate_B_null(1024, 20000, 405);
  EXPECT_LT(monotest::testing::ks_two_sample(from_fields, ref), monotest::testing::ks_two_sample_threshold(reps, ref.size(), 0.001));
}

TEST(MapLevel, ExactCasesAndArgmax) {
  CoefficientField f(5, 1.0);
  EXPECT_NEAR(map_level_statistic(f, 1).Z, 0.0, 1e-15);
  for (double& v : f.level(5)) v = 0.3;
  f.at({5, 11}) = -5.0 * f.sigma_h(5);
  const auto m = map_level_statistic(f, 5);
  EXPECT_EQ(m.position, 11u);
  EXPECT_NEAR(m.Z, score(-5.0).log_s - std::log(16.0), 1e-12);
  // ties go to the smallest position
  f.at({5, 3}) = f.at({5, 11});
  EXPECT_EQ(map_level_statistic(f, 5).position, 3u);
}

TEST(MapLevel, NullMaxIsInverseExponential) {
  const int k = 12;  // n_h = 2048
  const std::size_t reps = 3000;
  std::vector<double> v(reps);
  for (std::size_t r = 0; r < reps; ++r) v[r] = std::exp(map_level_statistic(null_field(k, 900 + r), k).Z);
  // P(1/kappa <= x) = exp(-1/x)
  const double d = monotest::testing::ks_one_sample(v, [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; });
  EXPECT_LT(d, monotest::testing::ks_one_sample_threshold(reps, 0.001));
}

CoefficientField scaled(const CoefficientField& f, double lambda) {
  std::vector<double> s;
  for (int k = 1; k <= f.max_level(); ++k) s.push_back(f.sigma_h(k) * lambda);
  auto out = CoefficientField::with_level_scales(f.max_level(), s);
  for (int k = 1; k <= f.max_level(); ++k) {
    for (std::size_t j = 0; j < f.level(k).size(); ++j) out.level(k)[j] = f.level(k)[j] * lambda;
  }
  return out;
}

TEST(Invariance, ScalingLeavesDecisionsAndArgmax) {
  const auto prior = PriorOnLevels::uniform(8);
  const auto w = adaptive_weights(1, 0.1, 8);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    CoefficientField f = null_field(8, 7000 + seed);
    f.at({static_cast<int>(seed % 8) + 1, 0}) -= 4.0 * f.sigma_h(static_cast<int>(seed % 8) + 1);
    const auto base_m = multilevel_map_test(f, prior, 0.05);
    const auto base_a = adaptive_map_test(f, w, 0.05);
    const auto base_b = multilevel_bayes_test(f, prior, 0.05, 3.0);
    for (double lambda : {0.125, 8.0, 3.7, 1e-3}) {
      const auto g = scaled(f, lambda);
      const auto m = multilevel_map_test(g, prior, 0.05);
      const auto a = adaptive_map_test(g, w, 0.05);
      const auto b = multilevel_bayes_test(g, prior, 0.05, 3.0);
      EXPECT_EQ(m.decision, base_m.decision);
      EXPECT_EQ(m.argmax, base_m.argmax);
      EXPECT_NEAR(m.statistic, base_m.statistic, 1e-9);
      EXPECT_EQ(a.decision, base_a.decision);
      EXPECT_EQ(a.argmax, base_a.argmax);
      EXPECT_EQ(b.decision, base_b.decision);
      EXPECT_NEAR(b.statistic, base_b.statistic, 1e-9 * std::max(1.0, std::abs(base_b.statistic)));
    }
  }
}

class WithStore : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    store_ = new CalibrationStore();
    for (double a : {0.01, 0.05, 0.1}) {
      store_->append(calibrate(CalibrationKind::bayes_single, 16, a, 200000, 31));
      store_->append(calibrate(CalibrationKind::map_single, 16, a, 200000, 33));
      store_->append(calibrate(CalibrationKind::zeta_circ, 10000, a, 20000, 32));
    }
  }
  static void TearDownTestSuite() {
    delete store_;
    store_ = nullptr;
  }
  static CalibrationStore* store_;
};
CalibrationStore* WithStore::store_ = nullptr;

TEST_F(WithStore, AlphaMonotonicity) {
  const auto prior = PriorOnLevels::uniform(5);
  const auto w = adaptive_weights(1, 0.1, 5);
  const std::vector<double> alphas = {0.01, 0.05, 0.1};
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    CoefficientField f = null_field(5, 100 + seed);
    f.at({5, seed % 16}) -= (seed % 7) * 0.6 * f.sigma_h(5);
    std::vector<std::vector<bool>> rej(6);
    for (double a : alphas) {
      rej[0].push_back(single_level_simple(f.at({5, 0}), f.sigma_h(5), a).rejects());
      rej[1].push_back(single_level_test(f, 5, a, SingleLevelKind::bayes, *store_).rejects());
      rej[2].push_back(single_level_test(f, 5, a, SingleLevelKind::map, *store_).rejects());
      rej[3].push_back(multilevel_map_test(f, prior, a).rejects());
      rej[4].push_back(multilevel_bayes_test(f, prior, a, *store_, 10000).rejects());
      rej[5].push_back(adaptive_map_test(f, w, a).rejects());
    }
    for (std::size_t t = 0; t < rej.size(); ++t) {
      for (std::size_t i = 1; i < alphas.size(); ++i) EXPECT_TRUE(!rej[t][i - 1] || rej[t][i]) << "test " << t;
    }
  }
}

TEST_F(WithStore, OnePointPriorReducesToSingleLevel) {
  const int k = 5;
  std::vector<double> wts(8, 0.0);
  wts[k - 1] = 1.0;
  const auto point = PriorOnLevels::from_weights(wts);
  const double q = exp_sup_quantile(0.05);
  const double zeta_q = store_->require(CalibrationKind::zeta_circ, 10000, 0.05).value;
  CalibrationStore matched;
  // B >= t  <=>  Z^B >= zeta_q
  const double n = 16.0;
  matched.append({CalibrationKind::bayes_single, 16, 0.05, 0, 0, zeta_q + std::log(n) + kEulerGamma - 1.0, 0.0});
  matched.append({CalibrationKind::map_single, 16, 0.05, 0, 0, std::exp(q), 0.0});
  int agree_m = 0, agree_b = 0, rejections = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    CoefficientField f = null_field(8, 300 + seed);
    f.at({k, seed % 16}) -= (seed % 5) * 1.2 * f.sigma_h(k);
    const auto mm = multilevel_map_test(f, point, 0.05);
    const auto sm = single_level_test(f, k, 0.05, SingleLevelKind::map, matched);
    agree_m += mm.decision == sm.decision;
    EXPECT_NEAR(mm.statistic, sm.statistic, 1e-12);
    EXPECT_EQ(mm.argmax, sm.argmax);
    const auto mb = multilevel_bayes_test(f, point, 0.05, zeta_q);
    const auto sb = single_level_test(f, k, 0.05, SingleLevelKind::bayes, matched);
    agree_b += mb.decision == sb.decision;
    rejections += mb.rejects();
    EXPECT_EQ(mb.per_level.size(), 1u);
  }
  EXPECT_EQ(agree_m, 400);
  EXPECT_EQ(agree_b, 400);
  EXPECT_GT(rejections, 20);
  EXPECT_LT(rejections, 380);
}

TEST_F(WithStore, NullRateOfSingleLevelTests) {
  const std::size_t reps = 10000;
  std::size_t rb = 0, rm = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const CoefficientField f = null_field(5, 50000 + r);
    rb += single_level_test(f, 5, 0.05, SingleLevelKind::bayes, *store_).rejects();
    rm += single_level_test(f, 5, 0.05, SingleLevelKind::map, *store_).rejects();
  }
  EXPECT_NEAR(static_cast<double>(rb) / reps, 0.05, 0.007);
  EXPECT_NEAR(static_cast<double>(rm) / reps, 0.05, 0.007);
}

TEST_F(WithStore, NonnegativeTruthIsConservative) {
  Engine eng(8);
  std::exponential_distribution<double> e(1.0);
  CoefficientField truth(5, 1.0);
  for (double& v : truth.level(5)) v = e(eng) * truth.sigma_h(5) * 0.3;
  const std::size_t reps = 10000;
  std::size_t rb = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    rb += single_level_test(simulate_observation(truth, 80000 + r), 5, 0.05, SingleLevelKind::bayes, *store_).rejects();
  }
  EXPECT_LE(static_cast<double>(rb) / reps, 0.05 + 0.007);
}

TEST_F(WithStore, DeepSignalIsFound) {
  CoefficientField truth(5, 1.0);
  truth.at({5, 6}) = -8.0 * truth.sigma_h(5);
  std::size_t rb = 0, rm = 0;
  for (std::size_t r = 0; r < 1000; ++r) {
    const auto f = simulate_observation(truth, 90000 + r);
    rb += single_level_test(f, 5, 0.05, SingleLevelKind::bayes, *store_).rejects();
    rm += single_level_test(f, 5, 0.05, SingleLevelKind::map, *store_).rejects();
  }
  EXPECT_GE(rb, 990u);
  EXPECT_GE(rm, 990u);
}

TEST_F(WithStore, MissingCalibrationNamesCommand) {
  const CoefficientField f(6, 1.0);
  try {
    static_cast<void>(single_level_test(f, 6, 0.05, SingleLevelKind::bayes, *store_));
    FAIL() << "expected CalibrationMissing";
  } catch (const CalibrationMissing& e) {
    EXPECT_NE(std::string(e.what()).find("--kind bayes_single --nh 32"), std::string::npos) << e.what();
  }
  EXPECT_THROW(static_cast<void>(multilevel_bayes_test(f, PriorOnLevels::uniform(6), 0.05, *store_)),
               CalibrationMissing);
}

TEST(MultilevelMap, NullRateMeasured) {
  // asymptotic critical value; finite levels are conservative or close
  const auto prior = PriorOnLevels::uniform(8);
  const std::size_t reps = 4000;
  std::size_t rej = 0;
  for (std::size_t r = 0; r < reps; ++r) rej += multilevel_map_test(null_field(8, 123456 + r), prior, 0.05).rejects();
  const double rate = static_cast<double>(rej) / reps;
  EXPECT_LE(rate, 0.05 + 0.02);
  EXPECT_GE(rate, 0.02);
}

TEST(MultilevelMap, PriorTruncationReported) {
  const auto prior = PriorOnLevels::uniform(10);
  const auto f = null_field(6, 3);
  const auto r = multilevel_map_test(f, prior, 0.05);
  EXPECT_NEAR(r.discarded_prior_mass, 0.4, 1e-12);
  EXPECT_EQ(r.per_level.size(), 6u);
  for (const auto& [k, v] : r.per_level) {
    EXPECT_GE(k, 1);
    EXPECT_LE(k, 6);
  }
  EXPECT_EQ(r.rejects(), r.statistic >= r.critical_value);
  EXPECT_DOUBLE_EQ(r.critical_value, exp_sup_quantile(0.05));
}

TEST(Adaptive, UsesUnnormalizedWeights) {
  const auto f = null_field(6, 4);
  const auto w = adaptive_weights(1, 0.1, 100);
  const auto r = adaptive_map_test(f, w, 0.05);
  EXPECT_EQ(r.per_level.size(), 6u);
  for (const auto& [k, v] : r.per_level) EXPECT_NEAR(v, map_level_statistic(f, k).Z + w.log_pi(k), 1e-12);
  EXPECT_NEAR(r.discarded_prior_mass, std::pow(iterated_log(1, 7.0), -0.1), 1e-12);
}

TEST(CriticalSnr, Values) {
  const double q = 2.9702, omega = 64.0;
  const std::uint64_t n = 1024;
  // written independently: 2a - log 4 - log pi - log a
  const double a = q + 10.0 * std::log(2.0) + 6.0 * std::log(2.0);
  const double ref = 2.0 * a - std::log(4.0) - std::log(kPi) - std::log(a);
  EXPECT_NEAR(critical_snr(SnrKind::R, n, q, std::log(omega)), ref, 1e-12);
  EXPECT_NEAR(critical_snr(SnrKind::R, n, q, std::log(omega)) - critical_snr(SnrKind::R_tilde, n, q, omega), 0.0,
              1e-12);
  EXPECT_NEAR(critical_snr(SnrKind::R_plus, n, q, omega) - critical_snr(SnrKind::R_tilde, n, q, omega),
              std::log(std::log(omega)), 1e-12);
  EXPECT_THROW(static_cast<void>(critical_snr(SnrKind::R, 1, -5.0, 0.0)), std::domain_error);
  EXPECT_THROW(static_cast<void>(critical_snr(SnrKind::R_tilde, 8, 1.0, 1.0)), std::domain_error);
  EXPECT_THROW(static_cast<void>(critical_snr(SnrKind::R, 0, 1.0, 1.0)), std::domain_error);
}

TEST(Report, Record) {
  CoefficientField f(3, 1.0);
  f.at({2, 1}) = -9.0 * f.sigma_h(2);
  const auto r = multilevel_map_test(f, PriorOnLevels::uniform(3), 0.05);
  ASSERT_TRUE(r.rejects());
  const std::string rec = r.to_record();
  EXPECT_EQ(rec.rfind("kind=multilevel_map\ndecision=reject_H0\nstatistic=", 0), 0u) << rec;
  EXPECT_NE(rec.find("argmax_level=2\nargmax_position=1\nargmax_t=0.75\n"), std::string::npos) << rec;
  EXPECT_NE(rec.find("level.3="), std::string::npos);
  EXPECT_EQ(rec.back(), '\n');
}

}  // namespace
