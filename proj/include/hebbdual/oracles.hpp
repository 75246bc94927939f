#pragma once

#include <functional>
#include <vector>

#include "hebbdual/duality.hpp"
#include "hebbdual/linalg.hpp"

namespace hebbdual {

// Independent batch references the online learners are checked against:
// direct linear-system and eigenvalue solves, a projected-gradient dual
// solver, and finite-difference derivative checks.  Everything here is
// deliberately boring numerics with pinned tolerances.

// Solves ((1/T) X X^T + lambda I) w = (1/T) X y; requires lambda > 0.
Vec ridge_closed_form(const std::vector<Vec>& x, const Vec& y, double lambda);

// The model duals of duality_core evaluated in the scaling that matches the
// primal (1/T) sum loss + lambda * reg: Gram entries are divided by
// lambda * T and the whole objective by T.  With this scaling
// weights_from_duals(maximizer) solves the primal and primal - dual is a
// true duality gap.
double scaled_dual_objective(DualModel model, const Vec& z,
                             const std::vector<Vec>& x, const Vec& y,
                             double lambda, double kappa = 1.0);

struct DualSolveResult {
  Vec z;
  double objective = 0.0;      // scaled_dual_objective at z
  int iters = 0;
  double kkt_residual = 0.0;   // infinity norm of the projected gradient
};

// Maximizes the scaled dual by projected gradient ascent with monotone
// backtracking.  Feasible sets: none (Ridge), z >= 0 (Svm), z in [0,1]
// (Logistic).
DualSolveResult batch_dual_solve(DualModel model, const std::vector<Vec>& x,
                                 const Vec& y, double lambda,
                                 double kappa = 1.0, int max_iters = 100000,
                                 double tol = 1e-10);

struct EigResult {
  Vec values;   // descending
  Mat vectors;  // orthonormal columns, vectors.col(k) matches values[k]
};

// Cyclic Jacobi diagonalization.  Requires symmetry within 1e-10; iterates
// until the off-diagonal Frobenius norm is below 1e-12.  Each eigenvector's
// largest-magnitude component is made positive so results are reproducible.
EigResult symmetric_eig(const Mat& a);

struct SubspaceBasis {
  Mat basis;  // n x m, orthonormal columns
  bool degenerate_gap = false;  // eigengap at the cut below 1e-10
};

// Top-m eigenvectors of the sample second moment (1/T) X X^T.
SubspaceBasis pca_subspace(const std::vector<Vec>& x, std::size_t m);

// primal_objective - scaled_dual_objective for (w, z), both under lambda.
// For Svm the primal side uses the smoothed hinge (1/(2 kappa)) max(0,.)^2,
// the actual conjugate partner of the kappa dual, so weak duality holds.
double duality_gap(DualModel model, const std::vector<Vec>& x, const Vec& y,
                   const Vec& w, const Vec& z, double lambda,
                   double kappa = 1.0);

// |w - P w| / max(|w|, 1e-30) with P the orthogonal projector onto the span
// of the samples (rank cut at 1e-10 relative to the top eigenvalue).
double span_residual(const Vec& w, const std::vector<Vec>& x);

// |B1 B1^T - B2 B2^T|_F / sqrt(2 m) for orthonormal n x m bases: 0 for equal
// subspaces, 1 for orthogonal ones.  Validates orthonormality within 1e-8.
double subspace_error(const Mat& b1, const Mat& b2);

// Max over points of |central difference of f - g| / max(1, |g|), step 1e-6.
double finite_diff_check(const std::function<double(double)>& f,
                         const std::function<double(double)>& g,
                         const std::vector<double>& points);
double finite_diff_check_vec(const std::function<double(const Vec&)>& f,
                             const std::function<Vec(const Vec&)>& g,
                             const std::vector<Vec>& points);

Mat gram(const std::vector<Vec>& x);              // T x T
Mat second_moment(const std::vector<Vec>& x);     // (1/T) X X^T, n x n

}  // namespace hebbdual
