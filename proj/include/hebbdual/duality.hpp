#pragma once

#include <vector>

#include "hebbdual/linalg.hpp"

namespace hebbdual {

// Convex losses with tractable conjugates.  Each supervised learner in this
// project is the gradient flow of one of these paired with a regularizer; the
// conjugate view is what turns the batch objective into a per-sample dual
// variable that a single neuron can relax to.

enum class LossKind { Square, HingeMargin, Logistic };

struct Loss {
  LossKind kind = LossKind::Square;
  double kappa = 1.0;  // HingeMargin softness; unused otherwise

  static Loss square() { return {LossKind::Square, 1.0}; }
  static Loss hinge_margin(double kappa) { return {LossKind::HingeMargin, kappa}; }
  static Loss logistic() { return {LossKind::Logistic, 1.0}; }
};

enum class RegKind { L2, UnnormalizedEntropy };

struct Regularizer {
  RegKind kind = RegKind::L2;
  double lambda = 1.0;
  Vec mu;  // entropy prior weights, one per coordinate; empty for L2

  static Regularizer l2(double lambda) { return {RegKind::L2, lambda, {}}; }
  static Regularizer entropy(double lambda, Vec mu) {
    return {RegKind::UnnormalizedEntropy, lambda, std::move(mu)};
  }
};

enum class DualModel { Ridge, Svm, Logistic };

double sigmoid(double t);  // overflow-safe

double loss_value(const Loss& loss, double y, double u);

// A subgradient of u -> loss(y, u); returns 0 at the hinge kink.
double loss_subgradient(const Loss& loss, double y, double u);

// The maximizer of z*v - conj_loss... equivalently -loss_subgradient: the
// per-sample dual variable that is optimal when the prediction is u.
double dual_optimal_z(const Loss& loss, double y, double u);

// Fenchel conjugate of the square loss in its prediction argument.
double square_conjugate(double y, double v);

// Binary entropy barrier F(z) = -z ln z - (1-z) ln(1-z) and its derivative
// log((1-z)/z); the logistic loss is the conjugate of this barrier.
struct BarrierPoint {
  double value;
  double derivative;
};
BarrierPoint entropy_barrier(double z);

// Gradient of the regularizer's conjugate: the map from accumulated dual
// drive to weights.  L2 is the identity; unnormalized entropy gives
// w_k = mu_k * exp(v_k - 1), which is what makes the entropy learner
// multiplicative and sign-preserving.
Vec reg_conjugate_gradient(const Regularizer& reg, const Vec& v);

// w = reg_conjugate_gradient((1/(lambda T)) sum_t z_t x_t): recovers primal
// weights from dual variables.  `x` holds T samples of equal length.
Vec weights_from_duals(const Regularizer& reg, const Vec& z,
                       const std::vector<Vec>& x, double lambda);

double regularizer_value(const Regularizer& reg, const Vec& w);

// (1/T) sum_t loss(y_t, w.x_t) + lambda * regularizer(w)
double primal_objective(const Loss& loss, const Regularizer& reg, const Vec& w,
                        const std::vector<Vec>& x, const Vec& y);

// Model dual objectives in the unit-scale convention (lambda*T == 1):
//   Ridge:    sum z_t y_t - 1/2 z^T G z - 1/2 |z|^2,      G_ts = x_t.x_s
//   Svm:      -1/2 z^T K z + sum(z_t - kappa/2 z_t^2),    z >= 0
//   Logistic: -1/2 z^T K z + sum F(z_t),                  0 <= z <= 1
// with K_ts = y_t y_s x_t.x_s.  See oracles for the lambda-aware version.
double dual_objective(DualModel model, const Vec& z, const std::vector<Vec>& x,
                      const Vec& y, double kappa = 1.0);

}  // namespace hebbdual
