#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hebbdual/datagen.hpp"
#include "hebbdual/duality.hpp"
#include "hebbdual/dynamics.hpp"
#include "hebbdual/linalg.hpp"

namespace hebbdual {

// Online learners in a shared shape: relax an activity to the fixed point of
// the model's field, then update each weight from quantities local to it
// (its input, the settled activity, and the weight itself).

enum class SupervisedModel { Ridge, Svm, Logistic, ExpGrad };

struct SupervisedState {
  SupervisedModel model = SupervisedModel::Ridge;
  Vec w;
  double eta = 0.1;
  double kappa = 1.0;       // Svm softness
  double lambda_eff = 0.0;  // Ridge decay toward the regularized solution
  Vec mu;                   // ExpGrad prior; also the initial weights
  bool normalize = false;   // ExpGrad: renormalize to the mu-simplex each step
  DynamicsConfig dynamics;

  static SupervisedState ridge(std::size_t n, double eta, double lambda_eff = 0.0);
  static SupervisedState svm(std::size_t n, double eta, double kappa = 1.0);
  static SupervisedState logistic(std::size_t n, double eta);
  static SupervisedState expgrad(std::size_t n, double eta, Vec mu,
                                 bool normalize = false);
};

struct SmState {
  Mat W;  // m x n feedforward
  Mat M;  // m x m lateral, symmetric positive definite
  double eta_w = 0.05;
  double eta_m = 0.05;
  DynamicsConfig dynamics;

  // W uniform in [-0.1, 0.1] (row-major draw order from Xoshiro256(seed)),
  // M = I.
  static SmState init(std::size_t m, std::size_t n, double eta_w, double eta_m,
                      std::uint64_t seed);
};

struct StepOutcome {
  Vec z;  // settled activity; length 1 for the supervised learners
  double update_norm = 0.0;
  int dynamics_iters = 0;
  double dynamics_residual = 0.0;
};

// eta_scale multiplies the state's base rate for this one step (used by the
// epoch schedules in train).
StepOutcome ridge_step(SupervisedState& s, const Vec& x, double y,
                       double eta_scale = 1.0);
StepOutcome svm_step(SupervisedState& s, const Vec& x, double y,
                     double eta_scale = 1.0);
StepOutcome logistic_step(SupervisedState& s, const Vec& x, double y,
                          double eta_scale = 1.0);
StepOutcome expgrad_step(SupervisedState& s, const Vec& x, double y,
                         double eta_scale = 1.0);
StepOutcome supervised_step(SupervisedState& s, const Vec& x, double y,
                            double eta_scale = 1.0);
StepOutcome sm_step(SmState& s, const Vec& x, double eta_scale = 1.0);

// The per-synapse update the models apply once the activity has settled:
// component k depends only on (x_k, z, w_k).  Additive models return the
// increment; ExpGrad returns the log-ratio exponents.  Exposed so the
// locality of the rules can be tested directly.
Vec local_update(const SupervisedState& s, const Vec& x, double y, double z,
                 double eta_scale = 1.0);

// Orthonormalized learned filters (rows of M^{-1} W) as columns of an n x m
// matrix, comparable against a principal subspace basis.
Mat sm_filter_basis(const SmState& s);

enum class ScheduleKind { Constant, InverseTime };

struct Schedule {
  ScheduleKind kind = ScheduleKind::Constant;
  double decay = 1.0;
  // Multiplier for (0-based) epoch e: 1 for Constant, 1/(1 + decay*e) for
  // InverseTime.
  double factor(int epoch) const;
};

struct TrainRow {
  int epoch = 0;
  std::optional<double> primal_objective;
  std::optional<double> smoothed_primal;  // Svm: conjugate-pair primal value
  std::optional<double> train_error;
  std::optional<double> mean_update_norm;
  std::optional<double> max_update_norm;
  std::optional<double> update_density;
  double max_dynamics_residual = 0.0;
  Vec duals;                        // supervised, epochs >= 1
  std::optional<Mat> filter_basis;  // similarity matching
};

struct TrainTrace {
  std::vector<TrainRow> rows;  // rows[0] is the initial snapshot
};

// Runs `epochs` in-order sweeps over the dataset.  lambda_report only affects
// the recorded primal objective (loss average plus lambda_report times the
// model's regularizer); pass the lambda the run will be compared against.
// Step errors are rethrown as train_abort_error tagged with epoch and sample.
TrainTrace train(SupervisedState& s, const Dataset& data, int epochs,
                 const Schedule& schedule, double lambda_report = 0.0);
TrainTrace train(SmState& s, const Dataset& data, int epochs,
                 const Schedule& schedule);

double mean_squared_error(const Vec& w, const Dataset& data);
double misclassification_rate(const Vec& w, const Dataset& data);

}  // namespace hebbdual
