#include "irsce/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace irsce {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

// Nearest point of the periodic grid {2*pi*i/size}, returned as 2*pi*i/size
// with i in [0, size).
double snap_freq(double freq, int size) {
  double cell = freq * size / kTwoPi;
  long i = std::lround(cell);
  i %= size;
  if (i < 0) i += size;
  return kTwoPi * i / size;
}
}  // namespace

std::vector<PathComponent> sample_paths(Rng& rng, int count, double rician_k_db,
                                        double tx_spacing) {
  if (count < 1) throw std::invalid_argument("path count must be >= 1");

  const double kappa = std::pow(10.0, rician_k_db / 10.0);
  // LOS power kappa/(1+kappa), remainder split equally across NLOS paths;
  // total mean power 1. A single path degenerates to unit-magnitude LOS.
  const double los_mag = (count == 1) ? 1.0 : std::sqrt(kappa / (1.0 + kappa));
  const double nlos_std =
      (count == 1) ? 0.0 : std::sqrt(1.0 / ((1.0 + kappa) * (count - 1)));

  std::vector<PathComponent> paths(count);
  for (int l = 0; l < count; ++l) {
    PathComponent& p = paths[l];
    p.is_los = (l == 0);
    p.gain = p.is_los ? los_mag * rng.unit_phase() : nlos_std * rng.cgaussian();
    p.azimuth = rng.uniform(-kHalfPi, kHalfPi);
    p.elevation = rng.uniform(-kHalfPi, kHalfPi);
    p.aod = rng.uniform(-kHalfPi, kHalfPi);
    std::tie(p.u, p.v) = angles_to_spatial_freq(p.azimuth, p.elevation, kDefaultSpacing);
    p.tx_freq = ula_spatial_freq(p.aod, tx_spacing);
  }
  return paths;
}

void snap_paths_to_grid(std::vector<PathComponent>& paths, const GridSpec& grid,
                        bool has_tx_side) {
  for (PathComponent& p : paths) {
    p.u = snap_freq(p.u, grid.m_grid_x);
    p.v = snap_freq(p.v, grid.m_grid_y);
    if (has_tx_side) p.tx_freq = snap_freq(p.tx_freq, grid.n_grid_tx);
  }
}

Eigen::MatrixXcd assemble_g(const std::vector<PathComponent>& paths, const UlaSpec& ula,
                            const UpaSpec& upa, double pathloss_g) {
  if (paths.empty()) throw std::invalid_argument("assemble_g: no paths");
  const double scale =
      std::sqrt(ula.n_antennas * static_cast<double>(upa.elements()) / pathloss_g);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(upa.elements(), ula.n_antennas);
  for (const PathComponent& p : paths) {
    const Eigen::VectorXcd ar = upa_steering(upa, p.u, p.v);
    const Eigen::VectorXcd at = ula_steering(ula, p.tx_freq);
    g.noalias() += (scale * p.gain) * ar * at.adjoint();
  }
  return g;
}

Eigen::VectorXcd assemble_hr(const std::vector<PathComponent>& paths, const UpaSpec& upa,
                             double pathloss_hr) {
  if (paths.empty()) throw std::invalid_argument("assemble_hr: no paths");
  const double scale = std::sqrt(upa.elements() / pathloss_hr);
  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(upa.elements());
  for (const PathComponent& p : paths)
    h.noalias() += (scale * p.gain) * upa_steering(upa, p.u, p.v);
  return h;
}

Eigen::MatrixXcd cascade(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& h_r) {
  if (g.rows() != h_r.size())
    throw std::invalid_argument("cascade: dimension mismatch");
  return h_r.conjugate().asDiagonal() * g;
}

std::complex<double> received_sample(const Eigen::MatrixXcd& h_cascade,
                                     const Eigen::VectorXcd& w,
                                     const Eigen::VectorXcd& v_phase, double noise_std,
                                     Rng& rng) {
  if (h_cascade.rows() != v_phase.size() || h_cascade.cols() != w.size())
    throw std::invalid_argument("received_sample: dimension mismatch");
  for (Eigen::Index m = 0; m < v_phase.size(); ++m)
    if (std::abs(std::abs(v_phase(m)) - 1.0) > 1e-9)
      throw std::invalid_argument("received_sample: v_phase entry off the unit circle");
  std::complex<double> y = v_phase.dot(h_cascade * w);  // dot conjugates the left side
  if (noise_std > 0.0) y += noise_std * rng.cgaussian();
  return y;
}

ChannelRealization sample_channel(Rng& rng, const ChannelStatistics& stats,
                                  const UlaSpec& ula, const UpaSpec& upa) {
  ChannelRealization c;
  c.paths_g = sample_paths(rng, stats.l_paths, stats.rician_k_db, ula.spacing);
  c.paths_hr = sample_paths(rng, stats.lprime_paths, stats.rician_k_db);
  c.g = assemble_g(c.paths_g, ula, upa, stats.pathloss_g);
  c.h_r = assemble_hr(c.paths_hr, upa, stats.pathloss_hr);
  c.h_cascade = cascade(c.g, c.h_r);
  return c;
}

ChannelRealization sample_channel_on_grid(Rng& rng, const ChannelStatistics& stats,
                                          const UlaSpec& ula, const UpaSpec& upa,
                                          const GridSpec& grid) {
  ChannelRealization c;
  c.paths_g = sample_paths(rng, stats.l_paths, stats.rician_k_db, ula.spacing);
  c.paths_hr = sample_paths(rng, stats.lprime_paths, stats.rician_k_db);
  snap_paths_to_grid(c.paths_g, grid, true);
  snap_paths_to_grid(c.paths_hr, grid, false);
  c.g = assemble_g(c.paths_g, ula, upa, stats.pathloss_g);
  c.h_r = assemble_hr(c.paths_hr, upa, stats.pathloss_hr);
  c.h_cascade = cascade(c.g, c.h_r);
  return c;
}

namespace {
int grid_index(double freq, int size, const char* what) {
  const double cell = freq * size / kTwoPi;
  long i = std::lround(cell);
  if (std::abs(cell - i) > 1e-9 * size)
    throw std::logic_error(std::string("off-grid frequency for ") + what);
  i %= size;
  if (i < 0) i += size;
  return static_cast<int>(i);
}
}  // namespace

Eigen::VectorXcd grid_alpha(const std::vector<PathComponent>& paths_hr,
                            const UpaSpec& upa, const GridSpec& grid,
                            double pathloss_hr) {
  Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(grid.m_grid());
  const double scale = std::sqrt(upa.elements() / pathloss_hr);
  for (const PathComponent& p : paths_hr) {
    const int ix = grid_index(p.u, grid.m_grid_x, "u");
    const int iy = grid_index(p.v, grid.m_grid_y, "v");
    alpha(ix * grid.m_grid_y + iy) += scale * p.gain;
  }
  return alpha;
}

Eigen::MatrixXcd grid_sigma(const std::vector<PathComponent>& paths_g, const UlaSpec& ula,
                            const UpaSpec& upa, const GridSpec& grid,
                            double pathloss_g) {
  Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(grid.m_grid(), grid.n_grid_tx);
  const double scale =
      std::sqrt(ula.n_antennas * static_cast<double>(upa.elements()) / pathloss_g);
  for (const PathComponent& p : paths_g) {
    const int ix = grid_index(p.u, grid.m_grid_x, "u");
    const int iy = grid_index(p.v, grid.m_grid_y, "v");
    const int it = grid_index(p.tx_freq, grid.n_grid_tx, "tx_freq");
    sigma(ix * grid.m_grid_y + iy, it) += scale * p.gain;
  }
  return sigma;
}

}  // namespace irsce
