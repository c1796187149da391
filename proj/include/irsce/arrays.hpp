#pragma once

#include <Eigen/Dense>
#include <utility>

namespace irsce {

inline constexpr double kDefaultSpacing = 0.5;  // element spacing d / lambda

/// Base-station uniform linear array.
struct UlaSpec {
  int n_antennas = 1;
  double spacing = kDefaultSpacing;
};

/// IRS uniform planar array, m_x * m_y reflecting elements.
struct UpaSpec {
  int m_x = 1;
  int m_y = 1;
  int elements() const { return m_x * m_y; }
};

/// Uniform spatial-frequency grids, points {2*pi*i/size}, first point at 0.
/// Anchoring the grids at frequency zero makes the difference set of any two
/// grid points land back on the grid, which is what collapses the redundant
/// columns of the cascade dictionary onto its leading block.
struct GridSpec {
  int n_grid_tx = 1;  // N_G
  int m_grid_x = 1;   // M_{G,x}
  int m_grid_y = 1;   // M_{G,y}

  int m_grid() const { return m_grid_x * m_grid_y; }
  double tx_freq(int i) const;
  double u_freq(int i) const;
  double v_freq(int i) const;
};

/// Grid steering dictionaries. f_p = f_x kron f_y, so column
/// q_x * m_grid_y + q_y is the UPA steering vector at (u[q_x], v[q_y]).
struct DictionarySet {
  UlaSpec ula;
  UpaSpec upa;
  GridSpec grid;
  Eigen::MatrixXcd f_l;  // N   x N_G
  Eigen::MatrixXcd f_x;  // M_x x M_{G,x}
  Eigen::MatrixXcd f_y;  // M_y x M_{G,y}
  Eigen::MatrixXcd f_p;  // M   x M_G
};

/// Entry k = exp(j*k*spatial_freq)/sqrt(N).
Eigen::VectorXcd ula_steering(const UlaSpec& spec, double spatial_freq);

/// a_x(u) kron a_y(v); entry (k_x*M_y + k_y) = exp(j*(k_x*u + k_y*v))/sqrt(M).
Eigen::VectorXcd upa_steering(const UpaSpec& spec, double u, double v);

/// UPA spatial frequencies of a ray: u = 2*pi*spacing*cos(elevation),
/// v = 2*pi*spacing*sin(elevation)*cos(azimuth).
std::pair<double, double> angles_to_spatial_freq(double azimuth, double elevation,
                                                 double spacing);

/// ULA spatial frequency of a departure ray, 2*pi*spacing*sin(angle).
double ula_spatial_freq(double angle, double spacing);

/// Throws std::invalid_argument when a grid is smaller than its array.
DictionarySet build_dictionaries(const UlaSpec& ula, const UpaSpec& upa,
                                 const GridSpec& grid);

}  // namespace irsce
