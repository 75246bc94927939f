#include "hebbdual/learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hebbdual/errors.hpp"
#include "hebbdual/rng.hpp"

namespace hebbdual {

namespace {

constexpr double kDensityFloor = 1e-12;  // update smaller than this counts as none
constexpr double kMaxExponent = 50.0;    // expgrad per-step exponent guard

void require_finite_vec(const Vec& v, const char* who) {
  for (double u : v)
    if (!std::isfinite(u))
      throw numerical_error(std::string(who) + ": weights left the finite range");
}

void require_positive(const Vec& w, const char* who) {
  for (std::size_t k = 0; k < w.size(); ++k)
    if (!(w[k] > 0.0))
      throw std::domain_error(std::string(who) + ": weight " + std::to_string(k) +
                              " must stay positive, got " + std::to_string(w[k]));
}

void require_input(const SupervisedState& s, const Vec& x) {
  if (x.size() != s.w.size())
    throw dimension_error("step: input length " + std::to_string(x.size()) +
                          " vs weight length " + std::to_string(s.w.size()));
}

Loss trace_loss(const SupervisedState& s) {
  switch (s.model) {
    case SupervisedModel::Ridge:
    case SupervisedModel::ExpGrad:
      return Loss::square();
    case SupervisedModel::Svm:
      return Loss::hinge_margin(s.kappa);
    case SupervisedModel::Logistic:
      return Loss::logistic();
  }
  throw std::logic_error("trace_loss: bad model");
}

double trace_regularizer(const SupervisedState& s) {
  if (s.model == SupervisedModel::ExpGrad) {
    Regularizer reg = Regularizer::entropy(1.0, s.mu);
    return regularizer_value(reg, s.w);
  }
  return 0.5 * dot(s.w, s.w);
}

}  // namespace

SupervisedState SupervisedState::ridge(std::size_t n, double eta, double lambda_eff) {
  SupervisedState s;
  s.model = SupervisedModel::Ridge;
  s.w.assign(n, 0.0);
  s.eta = eta;
  s.lambda_eff = lambda_eff;
  return s;
}

SupervisedState SupervisedState::svm(std::size_t n, double eta, double kappa) {
  if (kappa <= 0.0) throw std::invalid_argument("svm: kappa must be positive");
  SupervisedState s;
  s.model = SupervisedModel::Svm;
  s.w.assign(n, 0.0);
  s.eta = eta;
  s.kappa = kappa;
  return s;
}

SupervisedState SupervisedState::logistic(std::size_t n, double eta) {
  SupervisedState s;
  s.model = SupervisedModel::Logistic;
  s.w.assign(n, 0.0);
  s.eta = eta;
  return s;
}

SupervisedState SupervisedState::expgrad(std::size_t n, double eta, Vec mu,
                                         bool normalize) {
  if (mu.size() != n) throw dimension_error("expgrad: prior length mismatch");
  for (double m : mu)
    if (!(m > 0.0)) throw std::domain_error("expgrad: prior must be positive");
  SupervisedState s;
  s.model = SupervisedModel::ExpGrad;
  s.w = mu;  // positive initialization inside the representable cone
  s.mu = std::move(mu);
  s.eta = eta;
  s.normalize = normalize;
  return s;
}

SmState SmState::init(std::size_t m, std::size_t n, double eta_w, double eta_m,
                      std::uint64_t seed) {
  if (m == 0 || n == 0 || m > n)
    throw dimension_error("sm init: need 0 < m <= n");
  SmState s;
  s.W = Mat(m, n);
  Xoshiro256 rng(seed);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) s.W(i, j) = rng.uniform(-0.1, 0.1);
  s.M = Mat::identity(m);
  s.eta_w = eta_w;
  s.eta_m = eta_m;
  return s;
}

StepOutcome ridge_step(SupervisedState& s, const Vec& x, double y,
                       double eta_scale) {
  require_input(s, x);
  const auto fp = relax_ridge(s.w, x, y, s.dynamics);
  const double eta = s.eta * eta_scale;
  double nrm2 = 0.0;
  for (std::size_t k = 0; k < s.w.size(); ++k) {
    const double d = eta * (fp.z * x[k] - s.lambda_eff * s.w[k]);
    s.w[k] += d;
    nrm2 += d * d;
  }
  require_finite_vec(s.w, "ridge_step");
  return {{fp.z}, std::sqrt(nrm2), fp.iters, fp.residual};
}

StepOutcome svm_step(SupervisedState& s, const Vec& x, double y,
                     double eta_scale) {
  require_input(s, x);
  const double z = svm_activation(s.w, x, y, s.kappa);
  if (z == 0.0) return {{0.0}, 0.0, 0, 0.0};  // passive: no update at all
  const double gain = s.eta * eta_scale * z * y;
  double nrm2 = 0.0;
  for (std::size_t k = 0; k < s.w.size(); ++k) {
    const double d = gain * x[k];
    s.w[k] += d;
    nrm2 += d * d;
  }
  require_finite_vec(s.w, "svm_step");
  return {{z}, std::sqrt(nrm2), 0, 0.0};
}

StepOutcome logistic_step(SupervisedState& s, const Vec& x, double y,
                          double eta_scale) {
  require_input(s, x);
  const auto fp = relax_logistic(s.w, x, y, s.dynamics);
  const double gain = s.eta * eta_scale * fp.z * y;
  double nrm2 = 0.0;
  for (std::size_t k = 0; k < s.w.size(); ++k) {
    const double d = gain * x[k];
    s.w[k] += d;
    nrm2 += d * d;
  }
  require_finite_vec(s.w, "logistic_step");
  return {{fp.z}, std::sqrt(nrm2), fp.iters, fp.residual};
}

StepOutcome expgrad_step(SupervisedState& s, const Vec& x, double y,
                         double eta_scale) {
  require_input(s, x);
  require_positive(s.w, "expgrad_step");
  const auto fp = relax_ridge(s.w, x, y, s.dynamics);
  const double eta = s.eta * eta_scale;
  // validate first so a failed step leaves the state untouched
  for (std::size_t k = 0; k < s.w.size(); ++k) {
    const double e = eta * fp.z * x[k];
    if (std::abs(e) > kMaxExponent)
      throw step_size_error("expgrad_step: exponent " + std::to_string(e) +
                            " at component " + std::to_string(k) +
                            " would overflow; lower eta");
  }
  Vec w_old = s.w;
  for (std::size_t k = 0; k < s.w.size(); ++k)
    s.w[k] *= std::exp(eta * fp.z * x[k]);
  if (s.normalize) {
    double total = 0.0;
    for (double v : s.w) total += v;
    if (!(total > 0.0) || !std::isfinite(total))
      throw numerical_error("expgrad_step: normalization sum is degenerate");
    for (double& v : s.w) v /= total;
  }
  require_finite_vec(s.w, "expgrad_step");
  double nrm2 = 0.0;
  for (std::size_t k = 0; k < s.w.size(); ++k) {
    const double d = s.w[k] - w_old[k];
    nrm2 += d * d;
  }
  return {{fp.z}, std::sqrt(nrm2), fp.iters, fp.residual};
}

StepOutcome supervised_step(SupervisedState& s, const Vec& x, double y,
                            double eta_scale) {
  switch (s.model) {
    case SupervisedModel::Ridge:
      return ridge_step(s, x, y, eta_scale);
    case SupervisedModel::Svm:
      return svm_step(s, x, y, eta_scale);
    case SupervisedModel::Logistic:
      return logistic_step(s, x, y, eta_scale);
    case SupervisedModel::ExpGrad:
      return expgrad_step(s, x, y, eta_scale);
  }
  throw std::logic_error("supervised_step: bad model");
}

StepOutcome sm_step(SmState& s, const Vec& x, double eta_scale) {
  auto fp = relax_sm(s.W, s.M, x, s.dynamics);
  const double ew = s.eta_w * eta_scale;
  const double em = s.eta_m * eta_scale;
  double wn2 = 0.0;
  for (std::size_t i = 0; i < s.W.rows(); ++i)
    for (std::size_t j = 0; j < s.W.cols(); ++j) {
      const double d = ew * (fp.z[i] * x[j] - s.W(i, j));
      s.W(i, j) += d;
      wn2 += d * d;
    }
  double mn2 = 0.0;
  for (std::size_t i = 0; i < s.M.rows(); ++i)
    for (std::size_t j = 0; j < s.M.cols(); ++j) {
      const double d = em * (fp.z[i] * fp.z[j] - s.M(i, j));
      s.M(i, j) += d;
      mn2 += d * d;
    }
  if (min_eigenvalue_symmetric(s.M) < kEpsPd)
    throw stability_error("sm_step: lateral matrix lost positive definiteness");
  return {std::move(fp.z), std::sqrt(wn2) + std::sqrt(mn2), fp.iters, fp.residual};
}

Vec local_update(const SupervisedState& s, const Vec& x, double y, double z,
                 double eta_scale) {
  require_input(s, x);
  const double eta = s.eta * eta_scale;
  Vec out(x.size());
  switch (s.model) {
    case SupervisedModel::Ridge:
      for (std::size_t k = 0; k < x.size(); ++k)
        out[k] = eta * (z * x[k] - s.lambda_eff * s.w[k]);
      break;
    case SupervisedModel::Svm:
    case SupervisedModel::Logistic:
      for (std::size_t k = 0; k < x.size(); ++k) out[k] = eta * z * y * x[k];
      break;
    case SupervisedModel::ExpGrad:
      for (std::size_t k = 0; k < x.size(); ++k) out[k] = eta * z * x[k];
      break;
  }
  return out;
}

Mat sm_filter_basis(const SmState& s) {
  const std::size_t m = s.W.rows();
  const std::size_t n = s.W.cols();
  // filters = rows of M^{-1} W, solved column by column
  Mat filters(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vec fj = solve(s.M, s.W.col(j));
    for (std::size_t i = 0; i < m; ++i) filters(i, j) = fj[i];
  }
  Mat basis(n, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) basis(j, i) = filters(i, j);
  return orthonormalize_columns(std::move(basis));
}

double Schedule::factor(int epoch) const {
  if (epoch < 0) throw std::invalid_argument("schedule: epoch must be >= 0");
  switch (kind) {
    case ScheduleKind::Constant:
      return 1.0;
    case ScheduleKind::InverseTime:
      if (decay < 0.0) throw std::invalid_argument("schedule: decay must be >= 0");
      return 1.0 / (1.0 + decay * static_cast<double>(epoch));
  }
  throw std::logic_error("schedule: bad kind");
}

namespace {

double supervised_train_error(const SupervisedState& s, const Dataset& data) {
  if (s.model == SupervisedModel::Svm || s.model == SupervisedModel::Logistic)
    return misclassification_rate(s.w, data);
  return mean_squared_error(s.w, data);
}

double trace_primal(const SupervisedState& s, const Dataset& data,
                    double lambda_report) {
  const Loss loss = trace_loss(s);
  double sum = 0.0;
  for (std::size_t t = 0; t < data.t(); ++t)
    sum += loss_value(loss, (*data.y)[t], dot(s.w, data.x[t]));
  return sum / static_cast<double>(data.t()) +
         lambda_report * trace_regularizer(s);
}

// The smoothed hinge (1/(2 kappa)) max(0, 1 - y u)^2 is the loss whose
// conjugate the svm dual actually uses; its primal pairs with that dual in a
// weak-duality statement, the plain hinge does not.
double svm_smoothed_primal(const SupervisedState& s, const Dataset& data,
                           double lambda_report) {
  double sum = 0.0;
  for (std::size_t t = 0; t < data.t(); ++t) {
    const double h = std::max(0.0, 1.0 - (*data.y)[t] * dot(s.w, data.x[t]));
    sum += h * h / (2.0 * s.kappa);
  }
  return sum / static_cast<double>(data.t()) +
         lambda_report * 0.5 * dot(s.w, s.w);
}

void validate_training_data(const SupervisedState& s, const Dataset& data) {
  if (data.x.empty()) throw dimension_error("train: dataset has no samples");
  if (!data.y)
    throw dimension_error("train: supervised model needs labeled data");
  if (data.y->size() != data.x.size())
    throw dimension_error("train: sample/target count mismatch");
  if (data.n() != s.w.size())
    throw dimension_error("train: feature length " + std::to_string(data.n()) +
                          " vs weight length " + std::to_string(s.w.size()));
  if (s.model == SupervisedModel::Svm || s.model == SupervisedModel::Logistic)
    for (double y : *data.y)
      if (y != 1.0 && y != -1.0)
        throw invalid_label_error("train: classifier needs labels in {-1,+1}");
}

}  // namespace

TrainTrace train(SupervisedState& s, const Dataset& data, int epochs,
                 const Schedule& schedule, double lambda_report) {
  if (epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
  validate_training_data(s, data);
  const std::size_t count = data.t();

  TrainTrace trace;
  TrainRow first;
  first.epoch = 0;
  first.primal_objective = trace_primal(s, data, lambda_report);
  if (s.model == SupervisedModel::Svm)
    first.smoothed_primal = svm_smoothed_primal(s, data, lambda_report);
  first.train_error = supervised_train_error(s, data);
  trace.rows.push_back(std::move(first));

  for (int e = 1; e <= epochs; ++e) {
    const double f = schedule.factor(e - 1);
    TrainRow row;
    row.epoch = e;
    row.duals.resize(count);
    double sum_norm = 0.0, max_norm = 0.0, max_res = 0.0;
    std::size_t active = 0;
    for (std::size_t t = 0; t < count; ++t) {
      StepOutcome out;
      try {
        out = supervised_step(s, data.x[t], (*data.y)[t], f);
      } catch (const std::exception& ex) {
        throw train_abort_error("train: epoch " + std::to_string(e) + " sample " +
                                    std::to_string(t) + ": " + ex.what(),
                                e, t);
      }
      row.duals[t] = out.z[0];
      sum_norm += out.update_norm;
      max_norm = std::max(max_norm, out.update_norm);
      max_res = std::max(max_res, out.dynamics_residual);
      if (out.update_norm > kDensityFloor) ++active;
    }
    row.mean_update_norm = sum_norm / static_cast<double>(count);
    row.max_update_norm = max_norm;
    row.update_density = static_cast<double>(active) / static_cast<double>(count);
    row.max_dynamics_residual = max_res;
    row.primal_objective = trace_primal(s, data, lambda_report);
    if (s.model == SupervisedModel::Svm)
      row.smoothed_primal = svm_smoothed_primal(s, data, lambda_report);
    row.train_error = supervised_train_error(s, data);
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

TrainTrace train(SmState& s, const Dataset& data, int epochs,
                 const Schedule& schedule) {
  if (epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
  if (data.x.empty()) throw dimension_error("train: dataset has no samples");
  if (data.n() != s.W.cols())
    throw dimension_error("train: feature length " + std::to_string(data.n()) +
                          " vs filter length " + std::to_string(s.W.cols()));
  const std::size_t count = data.t();

  TrainTrace trace;
  TrainRow first;
  first.epoch = 0;
  first.filter_basis = sm_filter_basis(s);
  trace.rows.push_back(std::move(first));

  for (int e = 1; e <= epochs; ++e) {
    const double f = schedule.factor(e - 1);
    TrainRow row;
    row.epoch = e;
    double sum_norm = 0.0, max_norm = 0.0, max_res = 0.0;
    std::size_t active = 0;
    for (std::size_t t = 0; t < count; ++t) {
      StepOutcome out;
      try {
        out = sm_step(s, data.x[t], f);
      } catch (const std::exception& ex) {
        throw train_abort_error("train: epoch " + std::to_string(e) + " sample " +
                                    std::to_string(t) + ": " + ex.what(),
                                e, t);
      }
      sum_norm += out.update_norm;
      max_norm = std::max(max_norm, out.update_norm);
      max_res = std::max(max_res, out.dynamics_residual);
      if (out.update_norm > kDensityFloor) ++active;
    }
    row.mean_update_norm = sum_norm / static_cast<double>(count);
    row.max_update_norm = max_norm;
    row.update_density = static_cast<double>(active) / static_cast<double>(count);
    row.max_dynamics_residual = max_res;
    row.filter_basis = sm_filter_basis(s);
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

double mean_squared_error(const Vec& w, const Dataset& data) {
  if (!data.y) throw dimension_error("mean_squared_error: unlabeled data");
  double s = 0.0;
  for (std::size_t t = 0; t < data.t(); ++t) {
    const double r = (*data.y)[t] - dot(w, data.x[t]);
    s += r * r;
  }
  return s / static_cast<double>(data.t());
}

double misclassification_rate(const Vec& w, const Dataset& data) {
  if (!data.y) throw dimension_error("misclassification_rate: unlabeled data");
  std::size_t wrong = 0;
  for (std::size_t t = 0; t < data.t(); ++t)
    if ((*data.y)[t] * dot(w, data.x[t]) <= 0.0) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(data.t());
}

}  // namespace hebbdual
