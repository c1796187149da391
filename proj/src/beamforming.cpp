#include "irsce/beamforming.hpp"

#include <cmath>
#include <stdexcept>

namespace irsce {

namespace {

// One projected power-iteration run; returns the final objective and leaves
// the iterate in v.
double run_phase_iteration(const Eigen::MatrixXcd& a, Eigen::VectorXcd& v, int max_iters,
                           double obj_tol, std::vector<double>* trace = nullptr) {
  double obj = std::real(v.dot(a * v));
  if (trace) trace->push_back(obj);
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::VectorXcd av = a * v;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double mag = std::abs(av(i));
      if (mag > 0.0) v(i) = av(i) / mag;  // zero entries keep their phase
    }
    const double next = std::real(v.dot(a * v));
    if (trace) trace->push_back(next);
    const bool done = std::abs(next - obj) <= obj_tol * std::max(1.0, std::abs(next));
    obj = next;
    if (done) break;
  }
  return obj;
}

}  // namespace

std::vector<double> phase_iteration_trace(const Eigen::MatrixXcd& h,
                                          const Eigen::VectorXcd& v0, int max_iters) {
  const Eigen::MatrixXcd a = h * h.adjoint();
  Eigen::VectorXcd v = v0;
  std::vector<double> trace;
  run_phase_iteration(a, v, max_iters, 0.0, &trace);
  return trace;
}

Eigen::VectorXcd optimize_phases(const Eigen::MatrixXcd& h, const PhaseOptConfig& config,
                                 const Eigen::VectorXcd* warm_start) {
  const Eigen::Index m = h.rows();
  if (h.norm() == 0.0) return Eigen::VectorXcd::Ones(m);

  const Eigen::MatrixXcd a = h * h.adjoint();
  Rng rng(seed_mix({config.seed, fnv1a("phase-restarts")}));

  Eigen::VectorXcd best;
  double best_obj = -1.0;
  auto consider = [&](Eigen::VectorXcd v0) {
    const double obj = run_phase_iteration(a, v0, config.max_iters, config.obj_tol);
    if (obj > best_obj) {
      best_obj = obj;
      best = v0;
    }
  };

  consider(Eigen::VectorXcd::Ones(m));
  for (int r = 0; r < config.restarts; ++r) {
    Eigen::VectorXcd v0(m);
    for (Eigen::Index i = 0; i < m; ++i) v0(i) = rng.unit_phase();
    consider(std::move(v0));
  }
  if (warm_start != nullptr) consider(*warm_start);
  return best;
}

Eigen::VectorXcd mrt_precoder(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd effective = h.adjoint() * v;  // (v^H h)^H
  const double norm = effective.norm();
  if (norm == 0.0) {
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(h.cols());
    w(0) = 1.0;
    return w;
  }
  return effective / norm;
}

BeamformingResult joint_beamforming(const Eigen::MatrixXcd& h,
                                    const PhaseOptConfig& config) {
  BeamformingResult out;
  out.v_opt = optimize_phases(h, config);
  out.w_opt = mrt_precoder(h, out.v_opt);
  out.objective = (out.v_opt.adjoint() * h).squaredNorm();
  out.restarts_used = config.restarts;
  out.degenerate = out.objective == 0.0;
  return out;
}

double nmse(const Eigen::MatrixXcd& h_hat, const Eigen::MatrixXcd& h_true) {
  if (h_hat.rows() != h_true.rows() || h_hat.cols() != h_true.cols())
    throw std::invalid_argument("nmse: shape mismatch");
  const double denom = h_true.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("nmse: zero reference channel");
  return (h_hat - h_true).squaredNorm() / denom;
}

double arspr(const Eigen::MatrixXcd& h_hat, const Eigen::MatrixXcd& h_true,
             const PhaseOptConfig& config) {
  if (h_hat.rows() != h_true.rows() || h_hat.cols() != h_true.cols())
    throw std::invalid_argument("arspr: shape mismatch");
  if (h_true.norm() == 0.0) throw std::invalid_argument("arspr: zero reference channel");

  const Eigen::VectorXcd v_est = optimize_phases(h_hat, config);
  const Eigen::VectorXcd v_ideal = optimize_phases(h_true, config, &v_est);
  const double actual = (v_est.adjoint() * h_true).squaredNorm();
  const double ideal = (v_ideal.adjoint() * h_true).squaredNorm();
  return actual / ideal;
}

}  // namespace irsce
