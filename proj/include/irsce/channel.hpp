#pragma once

#include <complex>
#include <vector>

#include "irsce/arrays.hpp"
#include "irsce/rng.hpp"

namespace irsce {

/// One geometric propagation path. Angles are kept for bookkeeping; assembly
/// uses the stored spatial frequencies, which sampling fills from the angles
/// and on-grid snapping overwrites with exact grid points.
struct PathComponent {
  std::complex<double> gain;
  double azimuth = 0.0;    // arrival azimuth at the IRS
  double elevation = 0.0;  // arrival elevation at the IRS
  double aod = 0.0;        // departure angle at the BS (BS-IRS paths only)
  double u = 0.0;          // UPA x-axis spatial frequency
  double v = 0.0;          // UPA y-axis spatial frequency
  double tx_freq = 0.0;    // ULA spatial frequency (BS-IRS paths only)
  bool is_los = false;
};

struct ChannelStatistics {
  double rician_k_db = 13.2;
  int l_paths = 3;        // L
  int lprime_paths = 3;   // L'
  double pathloss_g = 1.0;   // rho
  double pathloss_hr = 1.0;  // epsilon
};

struct ChannelRealization {
  Eigen::MatrixXcd g;          // M x N
  Eigen::VectorXcd h_r;        // M
  Eigen::MatrixXcd h_cascade;  // M x N, diag(h_r^H) g
  std::vector<PathComponent> paths_g;
  std::vector<PathComponent> paths_hr;
};

/// One LOS path (deterministic magnitude, uniform phase) plus count-1 NLOS
/// paths with equal-variance circular Gaussian gains. Mean total power is 1
/// and the LOS/NLOS power ratio is 10^(rician_k_db/10). Angles are drawn
/// uniformly from [-pi/2, pi/2]; spatial frequencies are filled with
/// spacing = tx_spacing for the ULA side and the default for the UPA side.
std::vector<PathComponent> sample_paths(Rng& rng, int count, double rician_k_db,
                                        double tx_spacing = kDefaultSpacing);

/// Replace stored frequencies by the nearest periodic grid points.
void snap_paths_to_grid(std::vector<PathComponent>& paths, const GridSpec& grid,
                        bool has_tx_side);

/// G = sqrt(N*M/rho) * sum_l gain_l * a_r(u_l, v_l) a_t(tx_freq_l)^H.
Eigen::MatrixXcd assemble_g(const std::vector<PathComponent>& paths, const UlaSpec& ula,
                            const UpaSpec& upa, double pathloss_g = 1.0);

/// h_r = sqrt(M/eps) * sum_l gain_l * a_r(u_l, v_l).
Eigen::VectorXcd assemble_hr(const std::vector<PathComponent>& paths, const UpaSpec& upa,
                             double pathloss_hr = 1.0);

/// Row m of the result is conj(h_r(m)) * g(m, :).
Eigen::MatrixXcd cascade(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& h_r);

/// y = v_phase^H * H * w + noise. Rejects v_phase entries off the unit circle
/// (tolerance 1e-9). noise_std is the total standard deviation of the
/// circular Gaussian noise term.
std::complex<double> received_sample(const Eigen::MatrixXcd& h_cascade,
                                     const Eigen::VectorXcd& w,
                                     const Eigen::VectorXcd& v_phase, double noise_std,
                                     Rng& rng);

ChannelRealization sample_channel(Rng& rng, const ChannelStatistics& stats,
                                  const UlaSpec& ula, const UpaSpec& upa);

/// As sample_channel, but path frequencies are snapped to the grid so the
/// realization admits an exact grid-domain representation.
ChannelRealization sample_channel_on_grid(Rng& rng, const ChannelStatistics& stats,
                                          const UlaSpec& ula, const UpaSpec& upa,
                                          const GridSpec& grid);

/// Grid-domain coefficients of an on-grid realization: h_r = f_p * alpha.
/// Throws std::logic_error when a path frequency is off the grid.
Eigen::VectorXcd grid_alpha(const std::vector<PathComponent>& paths_hr,
                            const UpaSpec& upa, const GridSpec& grid,
                            double pathloss_hr = 1.0);

/// Grid-domain coefficients of an on-grid realization: g = f_p * sigma * f_l^H.
Eigen::MatrixXcd grid_sigma(const std::vector<PathComponent>& paths_g, const UlaSpec& ula,
                            const UpaSpec& upa, const GridSpec& grid,
                            double pathloss_g = 1.0);

}  // namespace irsce
