#include "hebbdual/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hebbdual/errors.hpp"

namespace hebbdual {

namespace {

void require_label(double y, const char* who) {
  if (y != 1.0 && y != -1.0)
    throw invalid_label_error(std::string(who) + ": label must be -1 or +1, got " +
                              std::to_string(y));
}

void require_samples(const std::vector<Vec>& x, const Vec& y, const char* who) {
  if (x.empty()) throw dimension_error(std::string(who) + ": no samples");
  if (x.size() != y.size())
    throw dimension_error(std::string(who) + ": " + std::to_string(x.size()) +
                          " samples vs " + std::to_string(y.size()) + " targets");
  for (const Vec& xt : x)
    if (xt.size() != x.front().size())
      throw dimension_error(std::string(who) + ": ragged sample lengths");
}

}  // namespace

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double loss_value(const Loss& loss, double y, double u) {
  switch (loss.kind) {
    case LossKind::Square: {
      const double r = y - u;
      return 0.5 * r * r;
    }
    case LossKind::HingeMargin:
      require_label(y, "hinge loss");
      return std::max(0.0, 1.0 - y * u);
    case LossKind::Logistic: {
      require_label(y, "logistic loss");
      const double s = y * u;
      // log(1 + exp(-s)) without overflow on either tail
      return s >= 0.0 ? std::log1p(std::exp(-s)) : -s + std::log1p(std::exp(s));
    }
  }
  throw std::logic_error("loss_value: bad kind");
}

double loss_subgradient(const Loss& loss, double y, double u) {
  switch (loss.kind) {
    case LossKind::Square:
      return u - y;
    case LossKind::HingeMargin:
      require_label(y, "hinge loss");
      return y * u < 1.0 ? -y : 0.0;
    case LossKind::Logistic:
      require_label(y, "logistic loss");
      return -y * sigmoid(-y * u);
  }
  throw std::logic_error("loss_subgradient: bad kind");
}

double dual_optimal_z(const Loss& loss, double y, double u) {
  return -loss_subgradient(loss, y, u);
}

double square_conjugate(double y, double v) { return y * v + 0.5 * v * v; }

BarrierPoint entropy_barrier(double z) {
  if (!(z >= 0.0 && z <= 1.0))
    throw std::domain_error("entropy_barrier: z must lie in [0,1], got " +
                            std::to_string(z));
  if (z == 0.0) return {0.0, std::numeric_limits<double>::infinity()};
  if (z == 1.0) return {0.0, -std::numeric_limits<double>::infinity()};
  const double value = -z * std::log(z) - (1.0 - z) * std::log1p(-z);
  const double derivative = std::log1p(-z) - std::log(z);
  return {value, derivative};
}

Vec reg_conjugate_gradient(const Regularizer& reg, const Vec& v) {
  if (reg.kind == RegKind::L2) return v;
  if (v.size() != reg.mu.size())
    throw dimension_error("reg_conjugate_gradient: drive has " +
                          std::to_string(v.size()) + " entries, prior has " +
                          std::to_string(reg.mu.size()));
  Vec w(v.size());
  for (std::size_t k = 0; k < v.size(); ++k)
    w[k] = reg.mu[k] * std::exp(v[k] - 1.0);
  return w;
}

Vec weights_from_duals(const Regularizer& reg, const Vec& z,
                       const std::vector<Vec>& x, double lambda) {
  if (lambda <= 0.0)
    throw std::domain_error("weights_from_duals: lambda must be positive");
  if (x.empty()) throw dimension_error("weights_from_duals: no samples");
  if (z.size() != x.size())
    throw dimension_error("weights_from_duals: " + std::to_string(z.size()) +
                          " duals vs " + std::to_string(x.size()) + " samples");
  const std::size_t n = x.front().size();
  Vec v(n, 0.0);
  const double scale = 1.0 / (lambda * static_cast<double>(x.size()));
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (x[t].size() != n)
      throw dimension_error("weights_from_duals: ragged sample lengths");
    axpy(scale * z[t], x[t], v);
  }
  return reg_conjugate_gradient(reg, v);
}

double regularizer_value(const Regularizer& reg, const Vec& w) {
  if (reg.kind == RegKind::L2) return 0.5 * dot(w, w);
  if (w.size() != reg.mu.size())
    throw dimension_error("regularizer_value: weight/prior length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] < 0.0)
      throw std::domain_error("regularizer_value: entropy needs w_k >= 0, got " +
                              std::to_string(w[k]) + " at component " +
                              std::to_string(k));
    if (reg.mu[k] <= 0.0)
      throw std::domain_error("regularizer_value: prior must be positive");
    if (w[k] > 0.0) s += w[k] * std::log(w[k] / reg.mu[k]);
    // w_k == 0 contributes 0 (limit of w ln w)
  }
  return s;
}

double primal_objective(const Loss& loss, const Regularizer& reg, const Vec& w,
                        const std::vector<Vec>& x, const Vec& y) {
  require_samples(x, y, "primal_objective");
  if (w.size() != x.front().size())
    throw dimension_error("primal_objective: weight length " +
                          std::to_string(w.size()) + " vs feature length " +
                          std::to_string(x.front().size()));
  double s = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t)
    s += loss_value(loss, y[t], dot(w, x[t]));
  return s / static_cast<double>(x.size()) +
         reg.lambda * regularizer_value(reg, w);
}

double dual_objective(DualModel model, const Vec& z, const std::vector<Vec>& x,
                      const Vec& y, double kappa) {
  require_samples(x, y, "dual_objective");
  const std::size_t tt = x.size();
  if (z.size() != tt)
    throw dimension_error("dual_objective: dual vector length mismatch");

  if (model == DualModel::Svm) {
    if (kappa <= 0.0)
      throw std::domain_error("dual_objective: kappa must be positive");
    for (std::size_t t = 0; t < tt; ++t)
      if (z[t] < 0.0)
        throw std::domain_error("dual_objective: svm needs z >= 0, got " +
                                std::to_string(z[t]) + " at index " +
                                std::to_string(t));
  }
  if (model == DualModel::Logistic) {
    for (std::size_t t = 0; t < tt; ++t)
      if (!(z[t] >= 0.0 && z[t] <= 1.0))
        throw std::domain_error("dual_objective: logistic needs z in [0,1], got " +
                                std::to_string(z[t]) + " at index " +
                                std::to_string(t));
  }
  if (model != DualModel::Ridge)
    for (std::size_t t = 0; t < tt; ++t) require_label(y[t], "dual_objective");

  // signed quadratic: ridge uses the plain Gram matrix, classifiers the
  // label-signed one
  double quad = 0.0;
  for (std::size_t t = 0; t < tt; ++t) {
    const double st = model == DualModel::Ridge ? 1.0 : y[t];
    quad += st * st * z[t] * z[t] * dot(x[t], x[t]);
    for (std::size_t s = t + 1; s < tt; ++s) {
      const double ss = model == DualModel::Ridge ? 1.0 : y[s];
      quad += 2.0 * st * ss * z[t] * z[s] * dot(x[t], x[s]);
    }
  }

  double value = -0.5 * quad;
  switch (model) {
    case DualModel::Ridge:
      for (std::size_t t = 0; t < tt; ++t)
        value += z[t] * y[t] - 0.5 * z[t] * z[t];
      break;
    case DualModel::Svm:
      for (std::size_t t = 0; t < tt; ++t)
        value += z[t] - 0.5 * kappa * z[t] * z[t];
      break;
    case DualModel::Logistic:
      for (std::size_t t = 0; t < tt; ++t)
        value += entropy_barrier(z[t]).value;
      break;
  }
  return value;
}

}  // namespace hebbdual
