#include "hebbdual/datagen.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hebbdual/errors.hpp"
#include "hebbdual/rng.hpp"

namespace hebbdual {

namespace {

void require_shape(std::size_t n, std::size_t t, const char* who) {
  if (n == 0 || t == 0)
    throw dimension_error(std::string(who) + ": n and t must be positive");
}

Vec draw_normal(Xoshiro256& rng, std::size_t n) {
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.gaussian();
  return v;
}

}  // namespace

Dataset gen_regression(std::size_t n, std::size_t t, double noise,
                       std::uint64_t seed, bool positive_w) {
  require_shape(n, t, "gen_regression");
  if (noise < 0.0)
    throw std::domain_error("gen_regression: noise must be nonnegative");
  Xoshiro256 rng(seed);

  Vec wstar = draw_normal(rng, n);
  if (positive_w)
    for (double& v : wstar) v = std::abs(v) + 0.1;

  Dataset d;
  d.meta = {"regression", n, t, seed, noise, positive_w, {}, {}, {}};
  d.x.reserve(t);
  Vec y(t);
  for (std::size_t s = 0; s < t; ++s) {
    Vec xs = draw_normal(rng, n);
    const double eps = rng.gaussian();
    y[s] = dot(wstar, xs) + noise * eps;
    d.x.push_back(std::move(xs));
  }
  d.y = std::move(y);
  DatasetTruth truth;
  truth.w = std::move(wstar);
  d.truth = std::move(truth);
  return d;
}

Dataset gen_classification(std::size_t n, std::size_t t, double margin,
                           std::uint64_t seed) {
  require_shape(n, t, "gen_classification");
  if (margin <= 0.0)
    throw std::domain_error("gen_classification: margin must be positive");
  Xoshiro256 rng(seed);

  Vec wstar = draw_normal(rng, n);
  const double nrm = norm2(wstar);
  if (nrm < 1e-12) throw numerical_error("gen_classification: degenerate direction");
  for (double& v : wstar) v /= nrm;

  Dataset d;
  d.meta = {"classification", n, t, seed, {}, {}, margin, {}, {}};
  d.x.reserve(t);
  Vec y(t);
  for (std::size_t s = 0; s < t; ++s) {
    const double label = (s % 2 == 0) ? 1.0 : -1.0;
    Vec xs = draw_normal(rng, n);
    double proj = dot(wstar, xs);
    if (label * proj < 0.0) {
      // reflect across the separating hyperplane
      axpy(-2.0 * proj, wstar, xs);
      proj = -proj;
    }
    const double m = label * proj;
    if (m < margin) axpy((margin - m) * label, wstar, xs);
    y[s] = label;
    d.x.push_back(std::move(xs));
  }
  d.y = std::move(y);
  DatasetTruth truth;
  truth.w = std::move(wstar);
  truth.margin = margin;
  d.truth = std::move(truth);
  return d;
}

Dataset gen_spiked(std::size_t n, std::size_t t, std::size_t m, double gap,
                   std::uint64_t seed) {
  require_shape(n, t, "gen_spiked");
  if (m == 0 || m >= n)
    throw dimension_error("gen_spiked: need 0 < m < n, got m=" +
                          std::to_string(m) + " n=" + std::to_string(n));
  if (gap <= 1.0)
    throw std::domain_error("gen_spiked: gap must exceed 1");
  Xoshiro256 rng(seed);

  Mat a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.gaussian();
  const Mat q = orthonormalize_columns(a);

  const double amp = std::sqrt(gap);
  Dataset d;
  d.meta = {"spiked", n, t, seed, {}, {}, {}, m, gap};
  d.x.reserve(t);
  for (std::size_t s = 0; s < t; ++s) {
    const Vec g = draw_normal(rng, n);
    Vec xs(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double c = (j < m ? amp : 1.0) * g[j];
      for (std::size_t i = 0; i < n; ++i) xs[i] += c * q(i, j);
    }
    d.x.push_back(std::move(xs));
  }
  Mat basis(n, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) basis(i, j) = q(i, j);
  DatasetTruth truth;
  truth.basis = std::move(basis);
  d.truth = std::move(truth);
  return d;
}

Dataset regenerate(const DatasetMeta& meta) {
  if (meta.kind == "regression")
    return gen_regression(meta.n, meta.t, meta.noise.value_or(0.0), meta.seed,
                          meta.positive_w.value_or(false));
  if (meta.kind == "classification")
    return gen_classification(meta.n, meta.t, meta.margin.value_or(1.0), meta.seed);
  if (meta.kind == "spiked")
    return gen_spiked(meta.n, meta.t, meta.m.value_or(1), meta.gap.value_or(2.0),
                      meta.seed);
  throw std::invalid_argument("regenerate: unknown dataset kind '" + meta.kind + "'");
}

}  // namespace hebbdual
