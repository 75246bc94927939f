#include "hebbdual/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hebbdual/duality.hpp"
#include "hebbdual/errors.hpp"

namespace hebbdual {

namespace {

void validate_config(const DynamicsConfig& cfg) {
  if (!(cfg.step > 0.0) || !(cfg.tol > 0.0) || cfg.max_iters < 1)
    throw std::invalid_argument("dynamics: step and tol must be positive, max_iters >= 1");
}

void require_label(double y, const char* who) {
  if (y != 1.0 && y != -1.0)
    throw invalid_label_error(std::string(who) + ": label must be -1 or +1, got " +
                              std::to_string(y));
}

void require_finite(double v, const char* who) {
  if (!std::isfinite(v))
    throw numerical_error(std::string(who) + ": field value is not finite");
}

}  // namespace

FixedPoint relax(const VecField& field, Vec z0, const DynamicsConfig& cfg,
                 const Projection& project) {
  validate_config(cfg);
  Vec z = std::move(z0);
  Vec g = field(z);
  if (g.size() != z.size())
    throw dimension_error("relax: field output length mismatch");
  for (double v : g) require_finite(v, "relax");
  double res = norm_inf(g);
  int it = 0;
  while (res > cfg.tol) {
    if (it >= cfg.max_iters)
      throw convergence_error("relax: residual " + std::to_string(res) +
                                  " above tolerance after " +
                                  std::to_string(cfg.max_iters) + " iterations",
                              res);
    axpy(cfg.step, g, z);
    if (project) project(z);
    ++it;
    g = field(z);
    for (double v : g) require_finite(v, "relax");
    res = norm_inf(g);
  }
  return {std::move(z), it, res};
}

ScalarFixedPoint relax_scalar(const ScalarField& field, double z0,
                              const DynamicsConfig& cfg) {
  validate_config(cfg);
  double z = z0;
  double g = field(z);
  require_finite(g, "relax_scalar");
  int it = 0;
  while (std::abs(g) > cfg.tol) {
    if (it >= cfg.max_iters)
      throw convergence_error("relax_scalar: residual " + std::to_string(std::abs(g)) +
                                  " above tolerance after " +
                                  std::to_string(cfg.max_iters) + " iterations",
                              std::abs(g));
    z += cfg.step * g;
    ++it;
    g = field(z);
    require_finite(g, "relax_scalar");
  }
  return {z, it, std::abs(g)};
}

double ridge_field(const Vec& w, const Vec& x, double y, double z) {
  return (y - dot(w, x)) - z;
}

double logistic_field(const Vec& w, const Vec& x, double y, double z) {
  require_label(y, "logistic_field");
  if (!(z > 0.0 && z < 1.0))
    throw std::domain_error("logistic_field: z must lie strictly inside (0,1), got " +
                            std::to_string(z));
  return entropy_barrier(z).derivative - y * dot(w, x);
}

Vec sm_field(const Mat& w_ff, const Mat& m_lat, const Vec& x, const Vec& z) {
  const std::size_t m = w_ff.rows();
  if (m_lat.rows() != m || m_lat.cols() != m)
    throw dimension_error("sm_field: lateral matrix must be m x m");
  if (w_ff.cols() != x.size())
    throw dimension_error("sm_field: input length mismatch");
  if (z.size() != m) throw dimension_error("sm_field: activity length mismatch");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (std::abs(m_lat(i, j) - m_lat(j, i)) > 1e-10)
        throw stability_error("sm_field: lateral matrix is not symmetric");
  if (min_eigenvalue_symmetric(m_lat) < kEpsPd)
    throw stability_error("sm_field: lateral matrix is not positive definite");
  Vec g = matvec(w_ff, x);
  axpy(-1.0, matvec(m_lat, z), g);
  return g;
}

double svm_activation(const Vec& w, const Vec& x, double y, double kappa) {
  require_label(y, "svm_activation");
  if (kappa <= 0.0)
    throw std::invalid_argument("svm_activation: kappa must be positive");
  return std::max(0.0, 1.0 - y * dot(w, x)) / kappa;
}

ScalarFixedPoint svm_activation_relaxed(const Vec& w, const Vec& x, double y,
                                        double kappa, const DynamicsConfig& cfg) {
  require_label(y, "svm_activation_relaxed");
  if (kappa <= 0.0)
    throw std::invalid_argument("svm_activation_relaxed: kappa must be positive");
  validate_config(cfg);
  const double drive = (1.0 - y * dot(w, x)) / kappa;
  double z = 0.0;
  int it = 0;
  // Projected residual: distance moved by one projected Euler step, per unit
  // step.  The raw field does not vanish at z = 0 when the drive is negative.
  auto residual = [&](double zz) {
    const double znext = std::max(0.0, zz + cfg.step * (drive - zz));
    return std::abs(znext - zz) / cfg.step;
  };
  double res = residual(z);
  require_finite(res, "svm_activation_relaxed");
  while (res > cfg.tol) {
    if (it >= cfg.max_iters)
      throw convergence_error("svm_activation_relaxed: residual " +
                                  std::to_string(res) + " above tolerance",
                              res);
    z = std::max(0.0, z + cfg.step * (drive - z));
    ++it;
    res = residual(z);
  }
  return {z, it, res};
}

ScalarFixedPoint relax_ridge(const Vec& w, const Vec& x, double y,
                             const DynamicsConfig& cfg) {
  const double drive = y - dot(w, x);
  return relax_scalar([drive](double z) { return drive - z; }, 0.0, cfg);
}

ScalarFixedPoint relax_logistic(const Vec& w, const Vec& x, double y,
                                const DynamicsConfig& cfg) {
  require_label(y, "relax_logistic");
  const double drive = y * dot(w, x);
  require_finite(drive, "relax_logistic");
  // theta = log(z/(1-z)); the field in theta is affine with fixed point -drive
  auto fp = relax_scalar([drive](double th) { return -drive - th; }, 0.0, cfg);
  const double z = std::clamp(sigmoid(fp.z), kLogisticClamp, 1.0 - kLogisticClamp);
  return {z, fp.iters, fp.residual};
}

FixedPoint relax_sm(const Mat& w_ff, const Mat& m_lat, const Vec& x,
                    const DynamicsConfig& cfg) {
  validate_config(cfg);
  const std::size_t m = w_ff.rows();
  if (m_lat.rows() != m || m_lat.cols() != m)
    throw dimension_error("relax_sm: lateral matrix must be m x m");
  if (w_ff.cols() != x.size())
    throw dimension_error("relax_sm: input length mismatch");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (std::abs(m_lat(i, j) - m_lat(j, i)) > 1e-10)
        throw stability_error("relax_sm: lateral matrix is not symmetric");
  if (min_eigenvalue_symmetric(m_lat) < kEpsPd)
    throw stability_error("relax_sm: lateral matrix is not positive definite");

  const Vec b = matvec(w_ff, x);
  DynamicsConfig local = cfg;
  const double rs = row_sum_norm(m_lat);
  if (rs > 0.0) local.step = std::min(cfg.step, 1.0 / rs);
  auto field = [&](const Vec& z) {
    Vec g = b;
    axpy(-1.0, matvec(m_lat, z), g);
    return g;
  };
  return relax(field, Vec(m, 0.0), local);
}

}  // namespace hebbdual
