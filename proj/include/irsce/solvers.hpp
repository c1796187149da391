#pragma once

#include <stdexcept>
#include <vector>

#include "irsce/cascade.hpp"

namespace irsce {

struct SparseEstimate {
  Eigen::VectorXcd x_hat;
  std::vector<Eigen::Index> support;
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
  std::vector<double> residual_history;  // per-iteration, diagnostics
};

/// Greedy selection by maximal normalized correlation with a least-squares
/// refit on the running support each iteration. Stops when the residual drops
/// below residual_tol_rel * ||y|| or max_support atoms are selected
/// (max_support is clamped to the number of measurements). Zero-norm columns
/// are never selected. converged reflects the residual criterion.
SparseEstimate omp(const SensingOperator& phi, const Eigen::VectorXcd& y,
                   int max_support = 32, double residual_tol_rel = 1e-6);

struct GampConfig {
  int max_iters = 200;
  double tol = 1e-6;
  double damping = 0.9;
  double init_sparsity = 0.01;
  double init_noise_fraction = 0.1;  // noise_var init = frac * ||y||^2 / T
  int max_restarts = 3;
};

/// Sum-product GAMP with scalar variances and a Bernoulli-Gaussian input
/// prior; prior parameters (sparsity rate, active mean/variance) and the
/// noise variance are re-estimated by EM between sweeps. Divergence triggers
/// a halved-step restart, up to max_restarts; the best iterate seen is
/// returned either way.
SparseEstimate gamp_em_bg(const SensingOperator& phi, const Eigen::VectorXcd& y,
                          const GampConfig& config = {});

/// Least squares restricted to the given support columns, zero elsewhere.
/// A rank-deficient restriction yields the minimum-norm solution and is
/// flagged through converged = false.
SparseEstimate oracle_ls(const SensingOperator& phi, const Eigen::VectorXcd& y,
                         const std::vector<Eigen::Index>& support);

struct UnderdeterminedError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Minimum-residual solution of y = w_v * vec(h) via Householder QR.
/// Requires rows >= cols; anything underdetermined throws
/// UnderdeterminedError.
Eigen::VectorXcd conventional_ls(const Eigen::MatrixXcd& w_v, const Eigen::VectorXcd& y);

/// Surrogate "true support" for channels that need not lie on the grid:
/// greedy projection of h onto the representation's atoms with a
/// least-squares refit per step, at most k atoms. Stops early once h is
/// represented, so on-grid channels yield exactly the nonzero set of their
/// merged coefficient matrix.
std::vector<Eigen::Index> oracle_support_from_truth(const Eigen::MatrixXcd& h_true,
                                                    const Eigen::MatrixXcd& d_u,
                                                    const DictionarySet& dicts, int k);

}  // namespace irsce
