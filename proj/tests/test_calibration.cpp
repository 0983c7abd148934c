#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "monotest/calibration.hpp"

namespace {

using namespace monotest;
namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("monotest_" + name + "_" + std::to_string(::getpid()));
  fs::remove(p);
  return p;
}

TEST(Calibrate, ExpSupIsClosedForm) {
  CalibrationDiagnostics d;
  const auto e = calibrate(CalibrationKind::exp_sup, 123, 0.05, 999, 7, {}, &d);
  EXPECT_EQ(d.route, "closed_form");
  EXPECT_DOUBLE_EQ(e.value, exp_sup_quantile(0.05));
  EXPECT_EQ(e.mc_stderr, 0.0);
  EXPECT_EQ(e.reps, 0u);
  EXPECT_EQ(e.seed, 0u);
  EXPECT_EQ(e.n_h, 0u);
}

TEST(Calibrate, EstimabilityGuard) {
  try {
    static_cast<void>(calibrate(CalibrationKind::bayes_single, 64, 0.05, 1000, 1));
    FAIL() << "expected EstimabilityError";
  } catch (const EstimabilityError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("reps >= 2000"), std::string::npos) << msg;
    EXPECT_NE(msg.find("zeta_circ"), std::string::npos) << msg;
  }
  EXPECT_NO_THROW(static_cast<void>(calibrate(CalibrationKind::bayes_single, 4, 0.05, 2000, 1)));
  EXPECT_THROW(static_cast<void>(calibrate(CalibrationKind::bayes_single, 4, 1.5, 2000, 1)), std::domain_error);
}

TEST(Calibrate, DeterministicWithStderr) {
  const auto a = calibrate(CalibrationKind::bayes_single, 16, 0.1, 20000, 3);
  const auto b = calibrate(CalibrationKind::bayes_single, 16, 0.1, 20000, 3);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.mc_stderr, b.mc_stderr);
  EXPECT_GT(a.mc_stderr, 0.0);
  EXPECT_EQ(a.reps, 20000u);
  EXPECT_EQ(a.seed, 3u);
}

TEST(Calibrate, BayesMatchesZetaCouplingAt1024) {
  const std::uint64_t n = 1024;
  const auto b = calibrate(CalibrationKind::bayes_single, n, 0.05, 100000, 11);
  const auto z = calibrate(CalibrationKind::zeta_circ, 100000, 0.05, 100000, 12);
  // B - log n + gamma  ~  zeta_circ + 2 gamma - 1
  const double coupled = z.value + std::log(static_cast<double>(n)) + kEulerGamma - 1.0;
  EXPECT_NEAR(b.value, coupled, 3.0 * std::hypot(b.mc_stderr, z.mc_stderr));
}

TEST(Calibrate, MapSingleMonteCarloVsExact) {
  const std::uint64_t n = 64;
  const auto mc = calibrate(CalibrationKind::map_single, n, 0.01, 200000, 5);
  EXPECT_NEAR(mc.value, map_single_exact_quantile(n, 0.01), 3.0 * mc.mc_stderr);

  // forcing the closed-form route above its usual cutoff
  CalibrationOptions opt;
  opt.extreme_alpha = 0.02;
  CalibrationDiagnostics d;
  const auto cf = calibrate(CalibrationKind::map_single, n, 0.01, 200000, 5, opt, &d);
  EXPECT_EQ(d.route, "closed_form");
  EXPECT_NEAR(cf.value, mc.value, 3.0 * mc.mc_stderr);
  EXPECT_EQ(cf.reps, 0u);
}

TEST(Calibrate, TailCouplingAgreesWithMonteCarlo) {
  const std::uint64_t K = 100000;
  const double alpha = 0.005;
  const auto mc = calibrate(CalibrationKind::zeta_circ, K, alpha, 200000, 21);
  CalibrationOptions opt;
  opt.extreme_alpha = 0.01;
  CalibrationDiagnostics d;
  const auto tail = calibrate(CalibrationKind::zeta_circ, K, alpha, 50000, 22, opt, &d);
  EXPECT_EQ(d.route, "tail_coupling");
  EXPECT_GT(tail.mc_stderr, 0.0);
  EXPECT_NEAR(tail.value, mc.value, 3.0 * std::hypot(tail.mc_stderr, mc.mc_stderr));
}

TEST(Calibrate, ExtremeAlphaRoutes) {
  CalibrationDiagnostics d;
  const auto m = calibrate(CalibrationKind::map_single, 1024, 1e-7, 0, 0, {}, &d);
  EXPECT_EQ(d.route, "closed_form");
  EXPECT_NEAR(m.value, map_single_exact_quantile(1024, 1e-7), 0.0);

  const auto b = calibrate(CalibrationKind::bayes_single, 1024, 1e-5, 20000, 3, {}, &d);
  EXPECT_EQ(d.route, "tail_coupling");
  // far tail of zeta is P{zeta_circ > x} ~ 1/x
  EXPECT_NEAR((b.value - std::log(1024.0) - kEulerGamma + 1.0) * 1e-5, 1.0, 0.05);
}

TEST(Calibrate, TruncationDriftReported) {
  CalibrationDiagnostics d;
  const auto z = calibrate(CalibrationKind::zeta_circ, 100000, 0.05, 20000, 4, {}, &d);
  EXPECT_EQ(d.route, "monte_carlo");
  EXPECT_TRUE(std::isfinite(d.truncation_drift));
  EXPECT_LT(std::abs(d.truncation_drift), 5.0 * z.mc_stderr + 0.1);
  // n_h = 0 means the default truncation
  EXPECT_EQ(calibration_key(CalibrationKind::zeta_circ, 0, 0.05, 1, 1).n_h, 1000000u);
}

TEST(CacheRecord, RoundTrip) {
  CalibrationEntry e;
  e.kind = CalibrationKind::bayes_single;
  e.n_h = 1024;
  e.alpha = 0.05;
  e.reps = 100000;
  e.seed = 18446744073709551615ull;
  e.value = 22.123456789012345;
  e.mc_stderr = 0.1 / 3.0;
  const std::string line = CalibrationStore::format_record(e);
  EXPECT_EQ(line.substr(0, 18), "bayes_single,1024,");
  const auto back = CalibrationStore::parse_record(line);
  ASSERT_TRUE(back);
  EXPECT_EQ(back->kind, e.kind);
  EXPECT_EQ(back->n_h, e.n_h);
  EXPECT_EQ(back->alpha, e.alpha);
  EXPECT_EQ(back->reps, e.reps);
  EXPECT_EQ(back->seed, e.seed);
  EXPECT_EQ(back->value, e.value);
  EXPECT_EQ(back->mc_stderr, e.mc_stderr);

  EXPECT_FALSE(CalibrationStore::parse_record("# comment"));
  EXPECT_FALSE(CalibrationStore::parse_record("bayes_single,1024,0.05,1,1,2"));
  EXPECT_FALSE(CalibrationStore::parse_record("bayes_single,1024,0.05,1,1,2,3,4"));
  EXPECT_FALSE(CalibrationStore::parse_record("nope,1024,0.05,1,1,2,3"));
  EXPECT_FALSE(CalibrationStore::parse_record("map_single,x,0.05,1,1,2,3"));
}

TEST(CacheStore, FileRoundTripAndPartialLine) {
  const fs::path p = temp_file("cache");
  {
    CalibrationStore s(p);
    const auto e = calibrate_cached(s, CalibrationKind::exp_sup, 0, 0.05, 0, 0);
    const auto m = calibrate_cached(s, CalibrationKind::map_single, 8, 0.1, 2000, 9);
    EXPECT_EQ(s.entries().size(), 2u);
    CalibrationDiagnostics d;
    const auto again = calibrate_cached(s, CalibrationKind::map_single, 8, 0.1, 2000, 9, {}, &d);
    EXPECT_EQ(d.route, "cache");
    EXPECT_EQ(again.value, m.value);
    EXPECT_EQ(s.entries().size(), 2u);
    EXPECT_DOUBLE_EQ(e.value, exp_sup_quantile(0.05));
  }
  {
    std::ofstream out(p, std::ios::app | std::ios::binary);
    out << "bayes_single,4,0.05,1000,1,3.5";  // torn write, no newline
  }
  CalibrationStore r(p);
  ASSERT_EQ(r.entries().size(), 2u);
  EXPECT_TRUE(r.find(CalibrationKind::map_single, 8, 0.1));
  EXPECT_FALSE(r.find(CalibrationKind::bayes_single, 4, 0.05));
  std::ifstream in(p);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first.front(), '#');
  fs::remove(p);
}

TEST(CacheStore, FindPrefersExactThenMostReps) {
  CalibrationStore s;
  CalibrationEntry a{CalibrationKind::bayes_single, 64, 0.05, 1000, 1, 5.0, 0.2};
  CalibrationEntry b{CalibrationKind::bayes_single, 64, 0.05, 50000, 2, 5.1, 0.02};
  CalibrationEntry c{CalibrationKind::bayes_single, 64, 0.05, 0, 0, 5.05, 0.0};
  s.append(a);
  s.append(b);
  EXPECT_EQ(s.find(CalibrationKind::bayes_single, 64, 0.05)->reps, 50000u);
  s.append(c);
  EXPECT_EQ(s.find(CalibrationKind::bayes_single, 64, 0.05)->reps, 0u);
  EXPECT_EQ(s.find_exact(CalibrationKind::bayes_single, 64, 0.05, 1000, 1)->value, 5.0);
  EXPECT_FALSE(s.find(CalibrationKind::bayes_single, 128, 0.05));
}

TEST(CacheStore, MissingEntryCarriesCommand) {
  CalibrationStore s;
  try {
    static_cast<void>(s.require(CalibrationKind::zeta_circ, 1000000, 0.05));
    FAIL() << "expected CalibrationMissing";
  } catch (const CalibrationMissing& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("monotest calibrate --kind zeta_circ --nh 1000000 --alpha 0.05"), std::string::npos) << msg;
  }
}

TEST(CacheStore, ConcurrentAppendsStayWhole) {
  const fs::path p = temp_file("concurrent");
  {
    CalibrationStore s(p);
    auto writer = [&](std::uint64_t base) {
      for (std::uint64_t i = 0; i < 200; ++i) {
        s.append(CalibrationEntry{CalibrationKind::map_single, base + i, 0.05, 1000, i, 1.0 + i, 0.1});
      }
    };
    std::thread t1(writer, 0), t2(writer, 1000);
    t1.join();
    t2.join();
  }
  CalibrationStore r(p);
  EXPECT_EQ(r.entries().size(), 400u);
  fs::remove(p);
}

}  // namespace
