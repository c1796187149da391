#include "irsce/cascade.hpp"

#include <cmath>
#include <stdexcept>

namespace irsce {

std::vector<int> MergeMap::class_table() const {
  std::vector<int> table(static_cast<std::size_t>(pair_count()));
  const int mg = m_grid();
  for (int p = 0; p < mg; ++p)
    for (int q = 0; q < mg; ++q)
      table[static_cast<std::size_t>(p) * mg + q] = class_of_pair(p, q);
  return table;
}

MergeMap build_merge_map(const GridSpec& grid) {
  return MergeMap{grid.m_grid_x, grid.m_grid_y};
}

Eigen::MatrixXcd build_d_u(const DictionarySet& dicts) {
  const Eigen::Index m = dicts.f_p.rows();
  const Eigen::Index mg = dicts.f_p.cols();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));

  // Elementwise form conj(f_p(:,0)) .* f_p(:,q) ...
  Eigen::MatrixXcd d_u(m, mg);
  const Eigen::VectorXcd first = dicts.f_p.col(0).conjugate();
  for (Eigen::Index q = 0; q < mg; ++q)
    d_u.col(q) = first.cwiseProduct(dicts.f_p.col(q));

  // ... must agree with the zero-anchored shortcut f_p / sqrt(M).
  const double err = (d_u - inv_sqrt_m * dicts.f_p).cwiseAbs().maxCoeff();
  if (err > 1e-12)
    throw std::logic_error("build_d_u: grid is not anchored at frequency zero");
  return d_u;
}

Eigen::MatrixXcd merge_coefficients(const Eigen::VectorXcd& alpha,
                                    const Eigen::MatrixXcd& sigma,
                                    const MergeMap& merge) {
  const int mg = merge.m_grid();
  if (alpha.size() != mg || sigma.rows() != mg)
    throw std::invalid_argument("merge_coefficients: dimension mismatch");

  Eigen::MatrixXcd lambda = Eigen::MatrixXcd::Zero(mg, sigma.cols());
  // Only nonzero alpha entries and nonzero sigma rows contribute.
  std::vector<int> sigma_rows;
  for (int q = 0; q < mg; ++q)
    if (sigma.row(q).cwiseAbs().maxCoeff() > 0.0) sigma_rows.push_back(q);
  for (int p = 0; p < mg; ++p) {
    if (alpha(p) == std::complex<double>(0.0, 0.0)) continue;
    const std::complex<double> a = std::conj(alpha(p));
    for (int q : sigma_rows) lambda.row(merge.class_of_pair(p, q)) += a * sigma.row(q);
  }
  return lambda;
}

Eigen::VectorXcd sensing_row(const Eigen::VectorXcd& w, const Eigen::VectorXcd& v_phase,
                             const DictionarySet& dicts, const Eigen::MatrixXcd& d_u) {
  const Eigen::VectorXcd a = dicts.f_l.adjoint() * w;           // (w^T f_l^*)^T
  const Eigen::VectorXcd b = d_u.transpose() * v_phase.conjugate();  // (v^H d_u)^T
  const Eigen::Index ng = a.size(), mg = b.size();
  Eigen::VectorXcd row(ng * mg);
  for (Eigen::Index j = 0; j < ng; ++j) row.segment(j * mg, mg) = a(j) * b;
  return row;
}

Eigen::MatrixXcd reconstruct_h(const Eigen::MatrixXcd& lambda_hat,
                               const Eigen::MatrixXcd& d_u, const DictionarySet& dicts) {
  if (lambda_hat.rows() != d_u.cols() || lambda_hat.cols() != dicts.f_l.cols())
    throw std::invalid_argument("reconstruct_h: dimension mismatch");
  return d_u * lambda_hat * dicts.f_l.adjoint();
}

CascadeRepresentation build_cascade_representation(const DictionarySet& dicts) {
  CascadeRepresentation rep;
  rep.d_u = build_d_u(dicts);
  rep.merge = build_merge_map(dicts.grid);
  return rep;
}

CascadeRepresentation build_cascade_representation(const DictionarySet& dicts,
                                                   const ChannelRealization& on_grid,
                                                   const ChannelStatistics& stats) {
  CascadeRepresentation rep = build_cascade_representation(dicts);
  const Eigen::VectorXcd alpha =
      grid_alpha(on_grid.paths_hr, dicts.upa, dicts.grid, stats.pathloss_hr);
  const Eigen::MatrixXcd sigma =
      grid_sigma(on_grid.paths_g, dicts.ula, dicts.upa, dicts.grid, stats.pathloss_g);
  rep.lambda = merge_coefficients(alpha, sigma, rep.merge);
  rep.x = Eigen::Map<const Eigen::VectorXcd>(rep.lambda.data(), rep.lambda.size());
  return rep;
}

DenseSensingOperator::DenseSensingOperator(Eigen::MatrixXcd phi) : phi_(std::move(phi)) {
  col_norms_sq_ = phi_.cwiseAbs2().colwise().sum();
  frob_sq_ = col_norms_sq_.sum();
}

FactoredSensingOperator::FactoredSensingOperator(Eigen::MatrixXcd a_rows,
                                                 Eigen::MatrixXcd b_rows)
    : a_rows_(std::move(a_rows)), b_rows_(std::move(b_rows)) {
  if (a_rows_.rows() != b_rows_.rows())
    throw std::invalid_argument("factored operator: row count mismatch");
  // |col (j,i)|^2 = sum_t |a(t,j)|^2 |b(t,i)|^2
  Eigen::MatrixXd norms = b_rows_.cwiseAbs2().transpose() * a_rows_.cwiseAbs2();
  col_norms_sq_ = Eigen::Map<Eigen::VectorXd>(norms.data(), norms.size());
  frob_sq_ = col_norms_sq_.sum();
}

Eigen::VectorXcd FactoredSensingOperator::apply(const Eigen::VectorXcd& x) const {
  const Eigen::Index mg = b_rows_.cols();
  const Eigen::Index ng = a_rows_.cols();
  Eigen::Map<const Eigen::MatrixXcd> xm(x.data(), mg, ng);
  // y(t) = b(t)^T Xm a(t)
  Eigen::MatrixXcd g = b_rows_ * xm;  // T x N_G
  return g.cwiseProduct(a_rows_).rowwise().sum();
}

Eigen::VectorXcd FactoredSensingOperator::apply_adjoint(const Eigen::VectorXcd& r) const {
  // Xm(i,j) = sum_t conj(b(t,i)) conj(a(t,j)) r(t)
  Eigen::MatrixXcd scaled = r.asDiagonal() * a_rows_.conjugate();  // T x N_G
  Eigen::MatrixXcd xm = b_rows_.adjoint() * scaled;                // M_G x N_G
  return Eigen::Map<Eigen::VectorXcd>(xm.data(), xm.size());
}

Eigen::VectorXcd FactoredSensingOperator::column(Eigen::Index c) const {
  const Eigen::Index mg = b_rows_.cols();
  return a_rows_.col(c / mg).cwiseProduct(b_rows_.col(c % mg));
}

SensingProblem assemble_problem(const ChannelRealization& channel, int t_pilots, Rng& rng,
                                double noise_std, const DictionarySet& dicts,
                                const Eigen::MatrixXcd& d_u, OperatorMode mode) {
  if (t_pilots < 1) throw std::invalid_argument("assemble_problem: t_pilots must be >= 1");
  const int n = dicts.ula.n_antennas;
  const int m = dicts.upa.elements();
  const double w_scale = 1.0 / std::sqrt(static_cast<double>(n));

  SensingProblem prob;
  prob.noise_std = noise_std;
  prob.precoders.reserve(t_pilots);
  prob.phase_vectors.reserve(t_pilots);
  Eigen::MatrixXcd a_rows(t_pilots, dicts.grid.n_grid_tx);
  Eigen::MatrixXcd b_rows(t_pilots, dicts.grid.m_grid());
  prob.y.resize(t_pilots);

  for (int t = 0; t < t_pilots; ++t) {
    Eigen::VectorXcd w(n), v(m);
    for (int i = 0; i < n; ++i) w(i) = w_scale * rng.unit_phase();
    for (int i = 0; i < m; ++i) v(i) = rng.unit_phase();
    a_rows.row(t) = (dicts.f_l.adjoint() * w).transpose();
    b_rows.row(t) = (d_u.transpose() * v.conjugate()).transpose();
    prob.y(t) = received_sample(channel.h_cascade, w, v, noise_std, rng);
    prob.precoders.push_back(std::move(w));
    prob.phase_vectors.push_back(std::move(v));
  }

  if (mode == OperatorMode::factored) {
    prob.phi = std::make_shared<FactoredSensingOperator>(std::move(a_rows),
                                                         std::move(b_rows));
  } else {
    const Eigen::Index mg = b_rows.cols(), ng = a_rows.cols();
    Eigen::MatrixXcd phi(t_pilots, mg * ng);
    for (Eigen::Index j = 0; j < ng; ++j)
      phi.middleCols(j * mg, mg) = a_rows.col(j).asDiagonal() * b_rows;
    prob.phi = std::make_shared<DenseSensingOperator>(std::move(phi));
  }
  return prob;
}

MimoRepresentation build_mimo_operator(const DictionarySet& dicts, const UlaSpec& rx_array,
                                       int n_grid_rx, const Eigen::VectorXcd& v_phase) {
  if (n_grid_rx < rx_array.n_antennas)
    throw std::invalid_argument("build_mimo_operator: receiver grid too small");
  if (v_phase.size() != dicts.upa.elements())
    throw std::invalid_argument("build_mimo_operator: v_phase size mismatch");
  for (Eigen::Index i = 0; i < v_phase.size(); ++i)
    if (std::abs(std::abs(v_phase(i)) - 1.0) > 1e-9)
      throw std::invalid_argument("build_mimo_operator: v_phase entry off the unit circle");

  MimoRepresentation rep;
  rep.rx_array = rx_array;
  rep.n_grid_rx = n_grid_rx;
  rep.v_phase = v_phase;

  rep.f_r.resize(rx_array.n_antennas, n_grid_rx);
  for (int i = 0; i < n_grid_rx; ++i)
    rep.f_r.col(i) = ula_steering(rx_array, 2.0 * EIGEN_PI * i / n_grid_rx);

  // Row i of d_bar_u: f_p(m, 0) * conj(f_p(m, i)) over elements m.
  const Eigen::Index m = dicts.f_p.rows();
  const Eigen::Index mg = dicts.f_p.cols();
  rep.d_bar_u.resize(mg, m);
  for (Eigen::Index i = 0; i < mg; ++i)
    rep.d_bar_u.row(i) =
        dicts.f_p.col(0).cwiseProduct(dicts.f_p.col(i).conjugate()).transpose();

  // k = (d_bar_u v^*)^T kron (f_l^* kron f_r)
  const Eigen::VectorXcd dv = rep.d_bar_u * v_phase.conjugate();  // M_G
  const Eigen::MatrixXcd fl_conj = dicts.f_l.conjugate();
  const Eigen::Index n = fl_conj.rows(), ng = fl_conj.cols();
  const Eigen::Index nr = rep.f_r.rows(), ngr = rep.f_r.cols();
  Eigen::MatrixXcd inner(n * nr, ng * ngr);  // f_l^* kron f_r
  for (Eigen::Index j = 0; j < ng; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      inner.block(i * nr, j * ngr, nr, ngr) = fl_conj(i, j) * rep.f_r;
  rep.k_op.resize(n * nr, mg * ng * ngr);
  for (Eigen::Index c = 0; c < mg; ++c)
    rep.k_op.middleCols(c * ng * ngr, ng * ngr) = dv(c) * inner;
  return rep;
}

Eigen::MatrixXcd mimo_lambda_bar(const Eigen::MatrixXcd& sigma,
                                 const Eigen::MatrixXcd& gamma, const MergeMap& merge) {
  const int mg = merge.m_grid();
  if (sigma.rows() != mg || gamma.cols() != mg)
    throw std::invalid_argument("mimo_lambda_bar: dimension mismatch");
  const Eigen::Index ng = sigma.cols();   // N_G
  const Eigen::Index ngr = gamma.rows();  // N_{G_r}
  Eigen::MatrixXcd lambda_bar = Eigen::MatrixXcd::Zero(ng * ngr, mg);
  for (int p = 0; p < mg; ++p) {
    if (sigma.row(p).cwiseAbs().maxCoeff() == 0.0) continue;
    for (int q = 0; q < mg; ++q) {
      if (gamma.col(q).cwiseAbs().maxCoeff() == 0.0) continue;
      // column of sigma^T kron gamma for pair (p, q)
      const int cls = merge.class_of_pair(p, q);
      for (Eigen::Index j = 0; j < ng; ++j)
        lambda_bar.col(cls).segment(j * ngr, ngr) += sigma(p, j) * gamma.col(q);
    }
  }
  return lambda_bar;
}

MimoProblem assemble_mimo_problem(const MimoRepresentation& mimo,
                                  const Eigen::MatrixXcd& h_bar, int t_pilots, Rng& rng,
                                  double noise_std) {
  if (t_pilots < 1)
    throw std::invalid_argument("assemble_mimo_problem: t_pilots must be >= 1");
  const Eigen::Index nr = h_bar.rows(), n = h_bar.cols();
  const double w_scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double f_scale = 1.0 / std::sqrt(static_cast<double>(nr));

  MimoProblem prob;
  prob.noise_std = noise_std;
  prob.w_f.resize(t_pilots, nr * n);
  prob.y.resize(t_pilots);
  for (int t = 0; t < t_pilots; ++t) {
    Eigen::VectorXcd w(n), f(nr);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = w_scale * rng.unit_phase();
    for (Eigen::Index i = 0; i < nr; ++i) f(i) = f_scale * rng.unit_phase();
    for (Eigen::Index j = 0; j < n; ++j)
      prob.w_f.row(t).segment(j * nr, nr) = w(j) * f.conjugate().transpose();
    prob.y(t) = f.dot(h_bar * w);
    if (noise_std > 0.0) prob.y(t) += noise_std * rng.cgaussian();
    prob.precoders.push_back(std::move(w));
    prob.combiners.push_back(std::move(f));
  }
  return prob;
}

}  // namespace irsce
