#include "irsce/arrays.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace irsce {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::complex<double> cis(double phase) { return {std::cos(phase), std::sin(phase)}; }
}  // namespace

double GridSpec::tx_freq(int i) const { return kTwoPi * i / n_grid_tx; }
double GridSpec::u_freq(int i) const { return kTwoPi * i / m_grid_x; }
double GridSpec::v_freq(int i) const { return kTwoPi * i / m_grid_y; }

Eigen::VectorXcd ula_steering(const UlaSpec& spec, double spatial_freq) {
  const int n = spec.n_antennas;
  Eigen::VectorXcd a(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) a(k) = scale * cis(k * spatial_freq);
  return a;
}

Eigen::VectorXcd upa_steering(const UpaSpec& spec, double u, double v) {
  Eigen::VectorXcd a(spec.elements());
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.elements()));
  for (int kx = 0; kx < spec.m_x; ++kx)
    for (int ky = 0; ky < spec.m_y; ++ky)
      a(kx * spec.m_y + ky) = scale * cis(kx * u + ky * v);
  return a;
}

std::pair<double, double> angles_to_spatial_freq(double azimuth, double elevation,
                                                 double spacing) {
  const double u = kTwoPi * spacing * std::cos(elevation);
  const double v = kTwoPi * spacing * std::sin(elevation) * std::cos(azimuth);
  return {u, v};
}

double ula_spatial_freq(double angle, double spacing) {
  return kTwoPi * spacing * std::sin(angle);
}

DictionarySet build_dictionaries(const UlaSpec& ula, const UpaSpec& upa,
                                 const GridSpec& grid) {
  if (ula.n_antennas < 1 || upa.m_x < 1 || upa.m_y < 1)
    throw std::invalid_argument("array dimensions must be positive");
  if (grid.n_grid_tx < ula.n_antennas)
    throw std::invalid_argument("n_grid_tx must be >= n_antennas");
  if (grid.m_grid_x < upa.m_x) throw std::invalid_argument("m_grid_x must be >= m_x");
  if (grid.m_grid_y < upa.m_y) throw std::invalid_argument("m_grid_y must be >= m_y");

  DictionarySet d;
  d.ula = ula;
  d.upa = upa;
  d.grid = grid;

  d.f_l.resize(ula.n_antennas, grid.n_grid_tx);
  for (int i = 0; i < grid.n_grid_tx; ++i) d.f_l.col(i) = ula_steering(ula, grid.tx_freq(i));

  const UlaSpec ax{upa.m_x, kDefaultSpacing};
  const UlaSpec ay{upa.m_y, kDefaultSpacing};
  d.f_x.resize(upa.m_x, grid.m_grid_x);
  for (int i = 0; i < grid.m_grid_x; ++i) d.f_x.col(i) = ula_steering(ax, grid.u_freq(i));
  d.f_y.resize(upa.m_y, grid.m_grid_y);
  for (int i = 0; i < grid.m_grid_y; ++i) d.f_y.col(i) = ula_steering(ay, grid.v_freq(i));

  // f_p = f_x kron f_y, column-by-column so each column is an exact
  // upa_steering evaluation at the grid frequencies.
  d.f_p.resize(upa.elements(), grid.m_grid());
  for (int qx = 0; qx < grid.m_grid_x; ++qx)
    for (int qy = 0; qy < grid.m_grid_y; ++qy)
      d.f_p.col(qx * grid.m_grid_y + qy) =
          upa_steering(upa, grid.u_freq(qx), grid.v_freq(qy));
  return d;
}

}  // namespace irsce
