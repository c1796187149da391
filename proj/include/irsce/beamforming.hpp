#pragma once

#include <cstdint>
#include <vector>

#include "irsce/rng.hpp"

#include <Eigen/Dense>

namespace irsce {

struct PhaseOptConfig {
  int restarts = 8;       // random initializations besides the all-ones start
  int max_iters = 200;
  double obj_tol = 1e-10;  // relative objective-change stopping threshold
  std::uint64_t seed = 0;
};

struct BeamformingResult {
  Eigen::VectorXcd v_opt;  // unit-modulus IRS phases
  Eigen::VectorXcd w_opt;  // unit-norm precoder
  double objective = 0.0;  // ||v_opt^H h||^2
  int restarts_used = 0;
  bool degenerate = false;  // zero channel or zero effective channel
};

/// Approximate maximizer of v^H (h h^H) v over unit-modulus v via the
/// projected power iteration v <- exp(j arg(h h^H v)), best over the all-ones
/// start, `restarts` random starts and an optional warm start. The iteration
/// is monotone in the objective. h = 0 returns the all-ones vector.
Eigen::VectorXcd optimize_phases(const Eigen::MatrixXcd& h,
                                 const PhaseOptConfig& config = {},
                                 const Eigen::VectorXcd* warm_start = nullptr);

/// Objective trajectory of a single run started at v0; used to check
/// monotonicity. Returns the per-iteration values of v^H (h h^H) v.
std::vector<double> phase_iteration_trace(const Eigen::MatrixXcd& h,
                                          const Eigen::VectorXcd& v0, int max_iters);

/// w = (v^H h)^H / ||v^H h||; e_1 when the effective channel vanishes.
Eigen::VectorXcd mrt_precoder(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& v);

BeamformingResult joint_beamforming(const Eigen::MatrixXcd& h,
                                    const PhaseOptConfig& config = {});

/// Single-trial ||h_hat - h_true||_F^2 / ||h_true||_F^2; rejects a zero true
/// channel.
double nmse(const Eigen::MatrixXcd& h_hat, const Eigen::MatrixXcd& h_true);

/// Receive-power ratio ||v^H h_true||^2 / ||v*^H h_true||^2 with v optimized
/// on h_hat and v* on h_true; the estimate-derived v seeds the true-channel
/// optimization as an extra candidate, so the ratio never exceeds 1.
double arspr(const Eigen::MatrixXcd& h_hat, const Eigen::MatrixXcd& h_true,
             const PhaseOptConfig& config = {});

}  // namespace irsce
