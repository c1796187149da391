// Independent brute-force references used by the test suites. Everything here
// is written with plain scalar loops, deliberately avoiding the library's
// code paths.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

inline std::complex<double> cis(double phase) {
  return {std::cos(phase), std::sin(phase)};
}

// Column k of an N x n_grid DFT-grid steering dictionary.
inline Eigen::VectorXcd dft_grid_column(int n, int n_grid, int k) {
  Eigen::VectorXcd col(n);
  for (int row = 0; row < n; ++row)
    col(row) = cis(2.0 * kPi * row * k / n_grid) / std::sqrt(static_cast<double>(n));
  return col;
}

// Elementwise planar steering entry e^{j(kx u + ky v)} / sqrt(mx my).
inline Eigen::VectorXcd upa_elementwise(int mx, int my, double u, double v) {
  Eigen::VectorXcd a(mx * my);
  for (int kx = 0; kx < mx; ++kx)
    for (int ky = 0; ky < my; ++ky)
      a(kx * my + ky) = cis(kx * u + ky * v) / std::sqrt(static_cast<double>(mx * my));
  return a;
}

// Explicit Kronecker product.
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Eigen::VectorXcd vec(const Eigen::MatrixXcd& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

struct PathParams {
  std::complex<double> gain;
  double u, v, tx_freq;
};

// Entrywise triple-loop evaluation of the BS-IRS channel.
inline Eigen::MatrixXcd assemble_g_loops(const std::vector<PathParams>& paths, int n,
                                         int mx, int my, double pathloss) {
  const int m = mx * my;
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m, n);
  const double scale = std::sqrt(n * static_cast<double>(m) / pathloss);
  for (const PathParams& p : paths)
    for (int kx = 0; kx < mx; ++kx)
      for (int ky = 0; ky < my; ++ky)
        for (int col = 0; col < n; ++col) {
          const std::complex<double> ar =
              cis(kx * p.u + ky * p.v) / std::sqrt(static_cast<double>(m));
          const std::complex<double> at =
              cis(col * p.tx_freq) / std::sqrt(static_cast<double>(n));
          g(kx * my + ky, col) += scale * p.gain * ar * std::conj(at);
        }
  return g;
}

inline Eigen::VectorXcd assemble_hr_loops(const std::vector<PathParams>& paths, int mx,
                                          int my, double pathloss) {
  const int m = mx * my;
  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(m);
  const double scale = std::sqrt(m / pathloss);
  for (const PathParams& p : paths)
    for (int kx = 0; kx < mx; ++kx)
      for (int ky = 0; ky < my; ++ky)
        h(kx * my + ky) +=
            scale * p.gain * cis(kx * p.u + ky * p.v) / std::sqrt(static_cast<double>(m));
  return h;
}

// Full redundant cascade dictionary, scalar loops: column (p, q) has entries
// conj(f_p(m, p)) * f_p(m, q).
inline Eigen::MatrixXcd cascade_dictionary_loops(const Eigen::MatrixXcd& f_p) {
  const Eigen::Index m = f_p.rows(), mg = f_p.cols();
  Eigen::MatrixXcd d(m, mg * mg);
  for (Eigen::Index p = 0; p < mg; ++p)
    for (Eigen::Index q = 0; q < mg; ++q)
      for (Eigen::Index row = 0; row < m; ++row)
        d(row, p * mg + q) = std::conj(f_p(row, p)) * f_p(row, q);
  return d;
}

// MIMO-side redundant dictionary, scalar loops: row (r, s) has entries
// f_p(m, r) * conj(f_p(m, s)).
inline Eigen::MatrixXcd mimo_dictionary_loops(const Eigen::MatrixXcd& f_p) {
  const Eigen::Index m = f_p.rows(), mg = f_p.cols();
  Eigen::MatrixXcd d(mg * mg, m);
  for (Eigen::Index r = 0; r < mg; ++r)
    for (Eigen::Index s = 0; s < mg; ++s)
      for (Eigen::Index col = 0; col < m; ++col)
        d(r * mg + s, col) = f_p(col, r) * std::conj(f_p(col, s));
  return d;
}

// Representatives of the distinct columns under max-abs tolerance.
inline std::vector<Eigen::Index> distinct_columns(const Eigen::MatrixXcd& m, double tol) {
  std::vector<Eigen::Index> reps;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    bool fresh = true;
    for (Eigen::Index r : reps)
      if ((m.col(c) - m.col(r)).cwiseAbs().maxCoeff() <= tol) {
        fresh = false;
        break;
      }
    if (fresh) reps.push_back(c);
  }
  return reps;
}

}  // namespace oracle
