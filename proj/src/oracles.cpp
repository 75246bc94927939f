#include "hebbdual/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hebbdual/errors.hpp"

namespace hebbdual {

namespace {

void require_samples(const std::vector<Vec>& x, const char* who) {
  if (x.empty()) throw dimension_error(std::string(who) + ": no samples");
  for (const Vec& xt : x)
    if (xt.size() != x.front().size())
      throw dimension_error(std::string(who) + ": ragged sample lengths");
}

constexpr double kBoundaryClamp = 1e-12;  // logistic dual iterates kept interior

}  // namespace

Mat gram(const std::vector<Vec>& x) {
  require_samples(x, "gram");
  const std::size_t t = x.size();
  Mat g(t, t);
  for (std::size_t a = 0; a < t; ++a) {
    g(a, a) = dot(x[a], x[a]);
    for (std::size_t b = a + 1; b < t; ++b) {
      const double v = dot(x[a], x[b]);
      g(a, b) = v;
      g(b, a) = v;
    }
  }
  return g;
}

Mat second_moment(const std::vector<Vec>& x) {
  require_samples(x, "second_moment");
  const std::size_t n = x.front().size();
  const double inv_t = 1.0 / static_cast<double>(x.size());
  Mat c(n, n);
  for (const Vec& xt : x)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) += xt[i] * xt[j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c(i, j) *= inv_t;
  return c;
}

Vec ridge_closed_form(const std::vector<Vec>& x, const Vec& y, double lambda) {
  require_samples(x, "ridge_closed_form");
  if (y.size() != x.size())
    throw dimension_error("ridge_closed_form: sample/target count mismatch");
  if (lambda <= 0.0)
    throw std::domain_error("ridge_closed_form: lambda must be positive");
  const std::size_t n = x.front().size();
  Mat a = second_moment(x);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += lambda;
  Vec b(n, 0.0);
  const double inv_t = 1.0 / static_cast<double>(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) axpy(inv_t * y[t], x[t], b);
  return solve(std::move(a), std::move(b));
}

double scaled_dual_objective(DualModel model, const Vec& z,
                             const std::vector<Vec>& x, const Vec& y,
                             double lambda, double kappa) {
  require_samples(x, "scaled_dual_objective");
  if (lambda <= 0.0)
    throw std::domain_error("scaled_dual_objective: lambda must be positive");
  const double t = static_cast<double>(x.size());
  // dividing each sample by sqrt(lambda T) scales exactly the Gram part of
  // the unit-scale dual, which is the whole difference between conventions
  const double s = 1.0 / std::sqrt(lambda * t);
  std::vector<Vec> xs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xs[i] = scaled(x[i], s);
  return dual_objective(model, z, xs, y, kappa) / t;
}

namespace {

struct DualProblem {
  DualModel model;
  Mat q;          // scaled quadratic kernel
  Vec y;
  double kappa;
  double t;

  double value(const Vec& z) const {
    const Vec qz = matvec(q, z);
    double v = -0.5 * dot(z, qz);
    switch (model) {
      case DualModel::Ridge:
        for (std::size_t i = 0; i < z.size(); ++i)
          v += z[i] * y[i] - 0.5 * z[i] * z[i];
        break;
      case DualModel::Svm:
        for (double zi : z) v += zi - 0.5 * kappa * zi * zi;
        break;
      case DualModel::Logistic:
        for (double zi : z) v += entropy_barrier(zi).value;
        break;
    }
    return v;
  }

  Vec gradient(const Vec& z) const {
    Vec g = matvec(q, z);
    for (double& gi : g) gi = -gi;
    switch (model) {
      case DualModel::Ridge:
        for (std::size_t i = 0; i < z.size(); ++i) g[i] += y[i] - z[i];
        break;
      case DualModel::Svm:
        for (std::size_t i = 0; i < z.size(); ++i) g[i] += 1.0 - kappa * z[i];
        break;
      case DualModel::Logistic:
        for (std::size_t i = 0; i < z.size(); ++i)
          g[i] += entropy_barrier(z[i]).derivative;
        break;
    }
    return g;
  }

  void project(Vec& z) const {
    switch (model) {
      case DualModel::Ridge:
        break;
      case DualModel::Svm:
        for (double& zi : z) zi = std::max(0.0, zi);
        break;
      case DualModel::Logistic:
        for (double& zi : z)
          zi = std::clamp(zi, kBoundaryClamp, 1.0 - kBoundaryClamp);
        break;
    }
  }

  // Infinity norm of the gradient with components pointing out of the
  // feasible set at an active bound zeroed.
  double kkt_residual(const Vec& z, const Vec& g) const {
    double r = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      double gi = g[i];
      if (model == DualModel::Svm && z[i] <= 0.0) gi = std::max(gi, 0.0);
      if (model == DualModel::Logistic) {
        if (z[i] <= kBoundaryClamp) gi = std::max(gi, 0.0);
        if (z[i] >= 1.0 - kBoundaryClamp) gi = std::min(gi, 0.0);
      }
      r = std::max(r, std::abs(gi));
    }
    return r;
  }
};

}  // namespace

DualSolveResult batch_dual_solve(DualModel model, const std::vector<Vec>& x,
                                 const Vec& y, double lambda, double kappa,
                                 int max_iters, double tol) {
  require_samples(x, "batch_dual_solve");
  if (y.size() != x.size())
    throw dimension_error("batch_dual_solve: sample/target count mismatch");
  if (lambda <= 0.0)
    throw std::domain_error("batch_dual_solve: lambda must be positive");
  if (model == DualModel::Svm && kappa <= 0.0)
    throw std::domain_error("batch_dual_solve: kappa must be positive");
  const std::size_t count = x.size();
  const double t = static_cast<double>(count);

  DualProblem p;
  p.model = model;
  p.y = y;
  p.kappa = kappa;
  p.t = t;
  p.q = gram(x);
  const double inv_lt = 1.0 / (lambda * t);
  for (std::size_t a = 0; a < count; ++a)
    for (std::size_t b = 0; b < count; ++b) {
      const double sign = model == DualModel::Ridge ? 1.0 : y[a] * y[b];
      p.q(a, b) *= inv_lt * sign;
    }
  if (model != DualModel::Ridge)
    for (double lab : y)
      if (lab != 1.0 && lab != -1.0)
        throw invalid_label_error("batch_dual_solve: labels must be -1 or +1");

  // Per-coordinate curvature of the separable part; the entropy barrier's
  // curvature blows up near the boundary, so for the logistic model it is
  // re-evaluated at the current iterate instead of bounded once globally.
  const double curvature_floor =
      model == DualModel::Ridge ? 1.0 : (model == DualModel::Svm ? kappa : 4.0);

  Vec z(count, model == DualModel::Logistic ? 0.5 : 0.0);
  double gval = p.value(z);
  double mult = 1.0;
  int it = 0;
  double kkt = 0.0;
  Vec dir(count);
  for (;; ++it) {
    const Vec grad = p.gradient(z);
    kkt = p.kkt_residual(z, grad);
    if (kkt <= tol) break;
    if (it >= max_iters)
      throw convergence_error("batch_dual_solve: projected gradient " +
                                  std::to_string(kkt) + " above tolerance after " +
                                  std::to_string(max_iters) + " iterations",
                              kkt);
    for (std::size_t i = 0; i < count; ++i) {
      double c = p.q(i, i) + curvature_floor;
      if (model == DualModel::Logistic) {
        const double zi = z[i];
        c = p.q(i, i) + 1.0 / (zi * (1.0 - zi));
      }
      dir[i] = grad[i] / c;
    }
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      Vec zc = z;
      axpy(mult, dir, zc);
      p.project(zc);
      const double gc = p.value(zc);
      // Near the maximum the true improvement per step falls below one ulp of
      // the objective and the value comparison turns into rounding noise, so a
      // step that strictly shrinks the projected gradient is also accepted;
      // the problems are strictly concave, so gradient-norm descent still
      // converges to the unique maximizer.
      const bool value_ok = gc >= gval - 4e-16 * (1.0 + std::abs(gval));
      const bool residual_ok =
          !value_ok && p.kkt_residual(zc, p.gradient(zc)) < kkt;
      if (value_ok || residual_ok) {
        z = std::move(zc);
        gval = gc;
        accepted = true;
        break;
      }
      mult *= 0.5;
    }
    if (!accepted)
      throw step_size_error("batch_dual_solve: backtracking failed to find an "
                            "ascent step");
    mult = std::min(1.0, mult * 1.5);
  }

  DualSolveResult out;
  out.z = std::move(z);
  out.objective = gval / t;
  out.iters = it;
  out.kkt_residual = kkt;
  return out;
}

EigResult symmetric_eig(const Mat& a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw dimension_error("symmetric_eig: matrix must be square and nonempty");
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > 1e-10)
        throw std::invalid_argument("symmetric_eig: matrix is not symmetric");

  Vec values;
  Mat vectors;
  if (!jacobi_symmetric(a, values, vectors, 1e-12, 100))
    throw numerical_error("symmetric_eig: jacobi sweeps did not converge");

  const std::size_t n = a.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });

  EigResult out;
  out.values.resize(n);
  out.vectors = Mat(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = values[order[k]];
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::abs(vectors(i, order[k]));
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    const double flip = vectors(arg, order[k]) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i)
      out.vectors(i, k) = flip * vectors(i, order[k]);
  }
  return out;
}

SubspaceBasis pca_subspace(const std::vector<Vec>& x, std::size_t m) {
  require_samples(x, "pca_subspace");
  const std::size_t n = x.front().size();
  if (m == 0 || m > n)
    throw dimension_error("pca_subspace: need 0 < m <= n, got m=" +
                          std::to_string(m) + " n=" + std::to_string(n));
  const EigResult eig = symmetric_eig(second_moment(x));
  SubspaceBasis out;
  out.basis = Mat(n, m);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < n; ++i) out.basis(i, k) = eig.vectors(i, k);
  out.degenerate_gap = m < n && (eig.values[m - 1] - eig.values[m]) < 1e-10;
  return out;
}

double duality_gap(DualModel model, const std::vector<Vec>& x, const Vec& y,
                   const Vec& w, const Vec& z, double lambda, double kappa) {
  require_samples(x, "duality_gap");
  if (y.size() != x.size())
    throw dimension_error("duality_gap: sample/target count mismatch");
  if (w.size() != x.front().size())
    throw dimension_error("duality_gap: weight length mismatch");
  if (lambda <= 0.0)
    throw std::domain_error("duality_gap: lambda must be positive");

  double primal = 0.0;
  switch (model) {
    case DualModel::Ridge:
      primal = primal_objective(Loss::square(), Regularizer::l2(lambda), w, x, y);
      break;
    case DualModel::Logistic:
      primal = primal_objective(Loss::logistic(), Regularizer::l2(lambda), w, x, y);
      break;
    case DualModel::Svm: {
      if (kappa <= 0.0)
        throw std::domain_error("duality_gap: kappa must be positive");
      // smoothed hinge: the conjugate partner of the kappa-quadratic dual
      double s = 0.0;
      for (std::size_t t = 0; t < x.size(); ++t) {
        const double h = std::max(0.0, 1.0 - y[t] * dot(w, x[t]));
        s += h * h / (2.0 * kappa);
      }
      primal = s / static_cast<double>(x.size()) + lambda * 0.5 * dot(w, w);
      break;
    }
  }
  return primal - scaled_dual_objective(model, z, x, y, lambda, kappa);
}

double span_residual(const Vec& w, const std::vector<Vec>& x) {
  require_samples(x, "span_residual");
  const std::size_t n = x.front().size();
  if (w.size() != n) throw dimension_error("span_residual: weight length mismatch");
  const EigResult eig = symmetric_eig(second_moment(x));
  const double lmax = eig.values.empty() ? 0.0 : std::max(eig.values[0], 0.0);
  Vec proj(n, 0.0);
  if (lmax > 0.0) {
    for (std::size_t k = 0; k < n; ++k) {
      if (eig.values[k] <= 1e-10 * lmax) continue;
      const Vec vk = eig.vectors.col(k);
      axpy(dot(vk, w), vk, proj);
    }
  }
  const Vec r = sub(w, proj);
  return norm2(r) / std::max(norm2(w), 1e-30);
}

double subspace_error(const Mat& b1, const Mat& b2) {
  if (b1.rows() != b2.rows() || b1.cols() != b2.cols())
    throw dimension_error("subspace_error: basis shapes differ");
  if (b1.cols() == 0 || b1.cols() > b1.rows())
    throw dimension_error("subspace_error: need 0 < m <= n");
  for (const Mat* b : {&b1, &b2}) {
    for (std::size_t i = 0; i < b->cols(); ++i)
      for (std::size_t j = i; j < b->cols(); ++j) {
        const double v = dot(b->col(i), b->col(j)) - (i == j ? 1.0 : 0.0);
        if (std::abs(v) > 1e-8)
          throw std::invalid_argument("subspace_error: basis is not orthonormal");
      }
  }
  const std::size_t n = b1.rows();
  const std::size_t m = b1.cols();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < m; ++k)
        d += b1(i, k) * b1(j, k) - b2(i, k) * b2(j, k);
      s += d * d;
    }
  return std::sqrt(s) / std::sqrt(2.0 * static_cast<double>(m));
}

double finite_diff_check(const std::function<double(double)>& f,
                         const std::function<double(double)>& g,
                         const std::vector<double>& points) {
  const double h = 1e-6;
  double worst = 0.0;
  for (double p : points) {
    const double fd = (f(p + h) - f(p - h)) / (2.0 * h);
    const double gv = g(p);
    worst = std::max(worst, std::abs(fd - gv) / std::max(1.0, std::abs(gv)));
  }
  return worst;
}

double finite_diff_check_vec(const std::function<double(const Vec&)>& f,
                             const std::function<Vec(const Vec&)>& g,
                             const std::vector<Vec>& points) {
  const double h = 1e-6;
  double worst = 0.0;
  for (const Vec& p : points) {
    const Vec gv = g(p);
    if (gv.size() != p.size())
      throw dimension_error("finite_diff_check_vec: gradient length mismatch");
    for (std::size_t k = 0; k < p.size(); ++k) {
      Vec hi = p, lo = p;
      hi[k] += h;
      lo[k] -= h;
      const double fd = (f(hi) - f(lo)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - gv[k]) / std::max(1.0, std::abs(gv[k])));
    }
  }
  return worst;
}

}  // namespace hebbdual
