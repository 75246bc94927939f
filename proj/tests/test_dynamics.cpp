#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hebbdual/duality.hpp"
#include "hebbdual/dynamics.hpp"
#include "hebbdual/errors.hpp"
#include "hebbdual/rng.hpp"
#include "test_support.hpp"

using namespace hebbdual;

TEST_CASE("scalar relaxation on affine fields") {
  DynamicsConfig cfg;
  SUBCASE("converges to the drive") {
    cfg.step = 0.5;
    const auto fp = relax_scalar([](double z) { return 3.0 - z; }, 0.0, cfg);
    CHECK(fp.z == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(fp.residual <= cfg.tol);
    CHECK(fp.iters > 0);
  }
  SUBCASE("pure decay") {
    const auto fp = relax_scalar([](double z) { return -z; }, 5.0, cfg);
    CHECK(fp.z == doctest::Approx(0.0).epsilon(1e-8));
  }
  SUBCASE("already settled points return untouched") {
    const auto fp = relax_scalar([](double z) { return 2.0 - z; }, 2.0, cfg);
    CHECK(fp.z == 2.0);
    CHECK(fp.iters == 0);
  }
  SUBCASE("random contractions for any stable step") {
    Xoshiro256 rng(41);
    for (int rep = 0; rep < 100; ++rep) {
      DynamicsConfig c;
      c.step = rng.uniform(0.01, 1.9);
      const double a = rng.uniform(-5.0, 5.0);
      const double z0 = rng.uniform(-5.0, 5.0);
      const auto fp = relax_scalar([a](double z) { return a - z; }, z0, c);
      CHECK(std::abs(fp.z - a) < 10.0 * c.tol);
    }
  }
  SUBCASE("no fixed point means a convergence error with the residual") {
    try {
      relax_scalar([](double) { return 1.0; }, 0.0, cfg);
      FAIL("constant field was accepted");
    } catch (const convergence_error& e) {
      CHECK(e.residual == doctest::Approx(1.0));
    }
  }
  SUBCASE("non-finite fields are rejected") {
    CHECK_THROWS_AS(relax_scalar(
                        [](double) { return std::numeric_limits<double>::quiet_NaN(); },
                        0.0, cfg),
                    numerical_error);
  }
  SUBCASE("config validation") {
    DynamicsConfig bad;
    bad.step = 0.0;
    CHECK_THROWS_AS(relax_scalar([](double z) { return -z; }, 1.0, bad),
                    std::invalid_argument);
  }
}

TEST_CASE("vector relaxation with projection") {
  DynamicsConfig cfg;
  auto field = [](const Vec& z) {
    return Vec{1.0 - z[0], -1.0 - z[1]};
  };
  const auto free = relax(field, Vec{0.0, -5.0}, cfg);
  CHECK(free.z[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(free.z[1] == doctest::Approx(-1.0).epsilon(1e-7));
  // a clamp that only binds on the way in: same fixed point, fewer steps,
  // which shows the projection hook ran after each Euler update
  const auto clamped = relax(field, Vec{0.0, -5.0}, cfg,
                             [](Vec& z) { z[1] = std::max(z[1], -1.5); });
  CHECK(clamped.z[1] == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(clamped.iters < free.iters);
}

TEST_CASE("ridge field") {
  CHECK(ridge_field({0.0, 0.0}, {1.0, 1.0}, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(ridge_field({0.5, 0.0}, {1.0, 0.0}, 2.0, 0.0) == doctest::Approx(1.5));
  // at the fixed point the field vanishes
  CHECK(ridge_field({0.5, 0.0}, {1.0, 0.0}, 2.0, 1.5) == doctest::Approx(0.0));
  const auto fp = relax_ridge({0.0}, {1.0}, 2.0, DynamicsConfig{});
  CHECK(fp.z == doctest::Approx(2.0).epsilon(1e-7));
  // settled prediction -> zero activity, no iterations
  const auto quiet = relax_ridge({2.0}, {1.0}, 2.0, DynamicsConfig{});
  CHECK(quiet.z == 0.0);
  CHECK(quiet.iters == 0);
  CHECK_THROWS_AS(ridge_field({1.0}, {1.0, 2.0}, 0.0, 0.0), dimension_error);
}

TEST_CASE("logistic field and relaxation") {
  // midpoint activity with no drive: field vanishes
  CHECK(logistic_field({0.0}, {1.0}, 1.0, 0.5) == doctest::Approx(0.0));
  // z = 1/4 with margin log 3 sits exactly at the fixed point
  CHECK(logistic_field({std::log(3.0)}, {1.0}, 1.0, 0.25) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // with no drive the field is the barrier slope, positive below 1/2
  CHECK(logistic_field({0.0}, {1.0}, 1.0, 0.25) == doctest::Approx(std::log(3.0)));
  CHECK_THROWS_AS(logistic_field({0.0}, {1.0}, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(logistic_field({0.0}, {1.0}, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(logistic_field({0.0}, {1.0}, 0.3, 0.5), invalid_label_error);

  // the settled activity is the sigmoid of the negated margin, for any margin
  Xoshiro256 rng(42);
  for (int rep = 0; rep < 200; ++rep) {
    const double y = (rng.next() & 1) ? 1.0 : -1.0;
    const Vec x{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    const Vec w{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
    const auto fp = relax_logistic(w, x, y, DynamicsConfig{});
    const double want = sigmoid(-y * dot(w, x));
    CHECK(std::abs(fp.z - want) < 1e-6);
    // the relaxed activity should zero the field it integrated
    if (fp.z > 0.0 && fp.z < 1.0)
      CHECK(std::abs(logistic_field(w, x, y, fp.z)) < 1e-6);
  }
  // extreme margins stay converged and clamped
  const auto hot = relax_logistic({40.0}, {1.0}, 1.0, DynamicsConfig{});
  CHECK(hot.z >= kLogisticClamp);
  CHECK(hot.z <= 2e-12);
}

TEST_CASE("svm activation") {
  CHECK(svm_activation({0.0, 0.0}, {1.0, 1.0}, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(svm_activation({0.3, 0.0}, {1.0, 0.0}, 1.0, 1.0) == doctest::Approx(0.7));
  CHECK(svm_activation({0.3, 0.0}, {1.0, 0.0}, 1.0, 2.0) == doctest::Approx(0.35));
  CHECK(svm_activation({2.0}, {1.0}, 1.0, 1.0) == 0.0);  // margin met exactly, off
  CHECK_THROWS_AS(svm_activation({0.0}, {1.0}, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(svm_activation({0.0}, {1.0}, 0.7, 1.0), invalid_label_error);

  Xoshiro256 rng(43);
  for (int rep = 0; rep < 200; ++rep) {
    const double y = (rng.next() & 1) ? 1.0 : -1.0;
    const Vec x{rng.gaussian(), rng.gaussian()};
    const Vec w{rng.gaussian(), rng.gaussian()};
    const double kappa = rng.uniform(0.2, 3.0);
    const double z = svm_activation(w, x, y, kappa);
    CHECK(z >= 0.0);
    const double margin = y * dot(w, x);
    if (margin >= 1.0) CHECK(z == 0.0);
    if (margin < 1.0) CHECK(z == doctest::Approx((1.0 - margin) / kappa));
    // the iterative circuit computes the same value
    const auto fp = svm_activation_relaxed(w, x, y, kappa, DynamicsConfig{});
    CHECK(std::abs(fp.z - z) < 1e-6);
  }
}

TEST_CASE("similarity-matching field and relaxation") {
  Mat w_ff(2, 2);
  w_ff(0, 0) = 1.0; w_ff(1, 1) = 1.0;
  const Mat m_id = Mat::identity(2);

  // with identity lateral weights the drive is W x
  const Vec g = sm_field(w_ff, m_id, {1.0, 2.0}, {0.0, 0.0});
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(2.0));
  // at z = M^{-1} W x the field vanishes
  const Vec g0 = sm_field(w_ff, m_id, {1.0, 2.0}, {1.0, 2.0});
  CHECK(norm_inf(g0) == doctest::Approx(0.0));

  Mat m2 = Mat::identity(2);
  m2(0, 0) = 2.0; m2(1, 1) = 2.0;
  const auto fp = relax_sm(w_ff, m2, {1.0, 0.0}, DynamicsConfig{});
  CHECK(fp.z[0] == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(fp.z[1] == doctest::Approx(0.0).epsilon(1e-7));

  Mat bad(2, 2);
  bad(0, 0) = 1.0; bad(1, 1) = -1.0;
  CHECK_THROWS_AS(sm_field(w_ff, bad, {1.0, 0.0}, {0.0, 0.0}), stability_error);
  Mat asym = Mat::identity(2);
  asym(0, 1) = 0.3;
  CHECK_THROWS_AS(relax_sm(w_ff, asym, {1.0, 0.0}, DynamicsConfig{}), stability_error);
  CHECK_THROWS_AS(sm_field(w_ff, m_id, {1.0}, {0.0, 0.0}), dimension_error);

  // relaxed activity matches the direct linear solve within 10x tolerance
  Xoshiro256 rng(44);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t m = 2 + rng.next() % 3;
    const std::size_t n = m + rng.next() % 3;
    Mat wf(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) wf(i, j) = rng.gaussian();
    // SPD lateral matrix: A A^T + 0.5 I
    Mat a(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) a(i, j) = 0.5 * rng.gaussian();
    Mat lat = matmul(a, transpose(a));
    for (std::size_t i = 0; i < m; ++i) lat(i, i) += 0.5;
    const Vec x = testsupport::random_vec(rng, n, -2.0, 2.0);
    const auto settled = relax_sm(wf, lat, x, DynamicsConfig{});
    const Vec direct = solve(lat, matvec(wf, x));
    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      err = std::max(err, std::abs(settled.z[i] - direct[i]));
    CHECK(err < 1e-7);
    CHECK(settled.residual <= DynamicsConfig{}.tol);
  }
}
