#pragma once

#include <functional>

#include "hebbdual/linalg.hpp"

namespace hebbdual {

// Neural relaxation: every learner computes its per-sample dual variable by
// integrating a field dz/dt = field(z) to its fixed point with explicit Euler
// steps, then applies a local weight update with the settled activity.

struct DynamicsConfig {
  double step = 0.1;
  double tol = 1e-8;     // infinity norm of the field at the accepted point
  int max_iters = 10000;
};

struct FixedPoint {
  Vec z;
  int iters = 0;
  double residual = 0.0;
};

struct ScalarFixedPoint {
  double z = 0.0;
  int iters = 0;
  double residual = 0.0;
};

using VecField = std::function<Vec(const Vec&)>;
using ScalarField = std::function<double(double)>;
using Projection = std::function<void(Vec&)>;

// Euler-integrates `field` from z0 until |field|_inf <= tol.  The residual is
// checked before stepping, so a starting point already at the fixed point is
// returned untouched with iters == 0.  Throws convergence_error past
// max_iters and numerical_error on non-finite field values.
FixedPoint relax(const VecField& field, Vec z0, const DynamicsConfig& cfg,
                 const Projection& project = {});
ScalarFixedPoint relax_scalar(const ScalarField& field, double z0,
                              const DynamicsConfig& cfg);

// Per-model fields.  Fixed points: ridge z* = y - w.x, logistic
// z* = sigmoid(-y w.x), similarity matching z* = M^{-1} W x.
double ridge_field(const Vec& w, const Vec& x, double y, double z);
double logistic_field(const Vec& w, const Vec& x, double y, double z);
Vec sm_field(const Mat& w_ff, const Mat& m_lat, const Vec& x, const Vec& z);

// The svm activation has a closed form, z = max(0, 1 - y w.x)/kappa; the
// relaxed variant computes the same value by projected Euler integration of
// z' = (1 - y w.x)/kappa - z, for when an iterative circuit is wanted.
double svm_activation(const Vec& w, const Vec& x, double y, double kappa);
ScalarFixedPoint svm_activation_relaxed(const Vec& w, const Vec& x, double y,
                                        double kappa, const DynamicsConfig& cfg);

// Relaxation drivers used by the learners.
ScalarFixedPoint relax_ridge(const Vec& w, const Vec& x, double y,
                             const DynamicsConfig& cfg);
// Integrates the logistic field in the pre-sigmoid potential theta with
// z = sigmoid(theta); the field value log((1-z)/z) - y w.x equals -theta - y w.x,
// so the Euler iteration is a uniform contraction regardless of the margin.
ScalarFixedPoint relax_logistic(const Vec& w, const Vec& x, double y,
                                const DynamicsConfig& cfg);
// Caps the Euler step at 1/|M|_inf so the lateral loop stays stable even when
// the lateral matrix has grown large.  Validates M (symmetric, positive
// definite above kEpsPd) before integrating.
FixedPoint relax_sm(const Mat& w_ff, const Mat& m_lat, const Vec& x,
                    const DynamicsConfig& cfg);

inline constexpr double kLogisticClamp = 1e-12;  // activity kept in [c, 1-c]
inline constexpr double kEpsPd = 1e-8;  // minimum eigenvalue for lateral matrices

}  // namespace hebbdual
