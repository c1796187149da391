#pragma once

#include <memory>
#include <vector>

#include "irsce/arrays.hpp"
#include "irsce/channel.hpp"
#include "irsce/rng.hpp"

namespace irsce {

/// Partition of the m_grid^2 column pairs of the cascade dictionary
/// D = f_p^* (row-wise kron) f_p into m_grid classes of equal columns.
/// Pair n = p * m_grid + q (p conjugated) belongs to the class whose 2-D grid
/// index is the componentwise difference (q - p) mod grid size, so classes are
/// pure index arithmetic and D never needs to be materialized.
struct MergeMap {
  int m_grid_x = 1;
  int m_grid_y = 1;

  int m_grid() const { return m_grid_x * m_grid_y; }
  long pair_count() const { return static_cast<long>(m_grid()) * m_grid(); }

  int class_of_pair(int p, int q) const {
    const int px = p / m_grid_y, py = p % m_grid_y;
    const int qx = q / m_grid_y, qy = q % m_grid_y;
    const int cx = (qx - px + m_grid_x) % m_grid_x;
    const int cy = (qy - py + m_grid_y) % m_grid_y;
    return cx * m_grid_y + cy;
  }
  int class_of_index(long n) const {
    return class_of_pair(static_cast<int>(n / m_grid()), static_cast<int>(n % m_grid()));
  }
  /// Materialized class table, small scales only.
  std::vector<int> class_table() const;
};

MergeMap build_merge_map(const GridSpec& grid);

/// First m_grid columns of D: column q = conj(f_p(:,0)) .* f_p(:,q). With the
/// grids anchored at frequency zero this equals f_p(:,q)/sqrt(M); both forms
/// are evaluated and checked against each other.
Eigen::MatrixXcd build_d_u(const DictionarySet& dicts);

/// Lambda(i,:) = sum over pairs (p,q) in class i of conj(alpha_p) * sigma(q,:).
Eigen::MatrixXcd merge_coefficients(const Eigen::VectorXcd& alpha,
                                    const Eigen::MatrixXcd& sigma, const MergeMap& merge);

/// Row (w^T f_l^*) kron (v^H d_u) of the measurement operator, computed from
/// the factors; the full f_l^* kron d_u is never formed.
Eigen::VectorXcd sensing_row(const Eigen::VectorXcd& w, const Eigen::VectorXcd& v_phase,
                             const DictionarySet& dicts, const Eigen::MatrixXcd& d_u);

/// h_hat = d_u * lambda_hat * f_l^H.
Eigen::MatrixXcd reconstruct_h(const Eigen::MatrixXcd& lambda_hat,
                               const Eigen::MatrixXcd& d_u, const DictionarySet& dicts);

struct CascadeRepresentation {
  Eigen::MatrixXcd d_u;  // M x M_G
  MergeMap merge;
  Eigen::MatrixXcd lambda;  // ground-truth coefficients (on-grid draws only)
  Eigen::VectorXcd x;       // vec(lambda)
};

CascadeRepresentation build_cascade_representation(const DictionarySet& dicts);

/// Fills lambda/x from an on-grid realization's grid coefficients.
CascadeRepresentation build_cascade_representation(const DictionarySet& dicts,
                                                   const ChannelRealization& on_grid,
                                                   const ChannelStatistics& stats);

/// Measurement operator y = Phi x with rows (w^T f_l^*) kron (v^H d_u).
class SensingOperator {
 public:
  virtual ~SensingOperator() = default;
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  virtual Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const = 0;         // Phi x
  virtual Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& r) const = 0; // Phi^H r
  virtual Eigen::VectorXcd column(Eigen::Index j) const = 0;
  virtual const Eigen::VectorXd& column_norms_sq() const = 0;
  virtual double frobenius_norm_sq() const = 0;
};

/// Explicit T x (M_G*N_G) matrix.
class DenseSensingOperator final : public SensingOperator {
 public:
  explicit DenseSensingOperator(Eigen::MatrixXcd phi);
  Eigen::Index rows() const override { return phi_.rows(); }
  Eigen::Index cols() const override { return phi_.cols(); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const override { return phi_ * x; }
  Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& r) const override {
    return phi_.adjoint() * r;
  }
  Eigen::VectorXcd column(Eigen::Index j) const override { return phi_.col(j); }
  const Eigen::VectorXd& column_norms_sq() const override { return col_norms_sq_; }
  double frobenius_norm_sq() const override { return frob_sq_; }
  const Eigen::MatrixXcd& matrix() const { return phi_; }

 private:
  Eigen::MatrixXcd phi_;
  Eigen::VectorXd col_norms_sq_;
  double frob_sq_ = 0.0;
};

/// Keeps only the per-row factors a(t) = f_l^H w(t) and b(t) = d_u^T v(t)^*;
/// products run as small dense multiplies against the factor matrices.
class FactoredSensingOperator final : public SensingOperator {
 public:
  FactoredSensingOperator(Eigen::MatrixXcd a_rows, Eigen::MatrixXcd b_rows);
  Eigen::Index rows() const override { return a_rows_.rows(); }
  Eigen::Index cols() const override { return a_rows_.cols() * b_rows_.cols(); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const override;
  Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& r) const override;
  Eigen::VectorXcd column(Eigen::Index j) const override;
  const Eigen::VectorXd& column_norms_sq() const override { return col_norms_sq_; }
  double frobenius_norm_sq() const override { return frob_sq_; }
  const Eigen::MatrixXcd& a_rows() const { return a_rows_; }
  const Eigen::MatrixXcd& b_rows() const { return b_rows_; }

 private:
  Eigen::MatrixXcd a_rows_;  // T x N_G
  Eigen::MatrixXcd b_rows_;  // T x M_G
  Eigen::VectorXd col_norms_sq_;
  double frob_sq_ = 0.0;
};

enum class OperatorMode { dense, factored };

struct SensingProblem {
  std::vector<Eigen::VectorXcd> precoders;      // w(t), entries unit-modulus/sqrt(N)
  std::vector<Eigen::VectorXcd> phase_vectors;  // v(t), unit-modulus entries
  Eigen::VectorXcd y;
  double noise_std = 0.0;
  std::shared_ptr<SensingOperator> phi;
};

/// Draws T random training pairs, measures y(t) through received_sample and
/// assembles the operator row by row.
SensingProblem assemble_problem(const ChannelRealization& channel, int t_pilots, Rng& rng,
                                double noise_std, const DictionarySet& dicts,
                                const Eigen::MatrixXcd& d_u,
                                OperatorMode mode = OperatorMode::dense);

// --- multi-antenna receiver extension ---

/// vec(h_bar) = k_op * vec(lambda_bar) for h_bar = f_r Gamma f_p^H Theta f_p
/// Sigma f_l^H with Theta = diag(conj(v_phase)) held fixed during training.
struct MimoRepresentation {
  UlaSpec rx_array;
  int n_grid_rx = 1;
  Eigen::MatrixXcd f_r;      // N_r x N_{G_r}
  Eigen::MatrixXcd d_bar_u;  // M_G x M, first M_G rows of f_p^T khatri-rao f_p^H
  Eigen::VectorXcd v_phase;  // fixed IRS pattern
  Eigen::MatrixXcd k_op;     // (N_r*N) x (M_G*N_{G_r}*N_G)
};

MimoRepresentation build_mimo_operator(const DictionarySet& dicts, const UlaSpec& rx_array,
                                       int n_grid_rx, const Eigen::VectorXcd& v_phase);

/// lambda_bar(:, i) = sum over pairs (p,q) in class i of sigma^T(:,p) kron gamma(:,q);
/// the row classes of the MIMO dictionary follow the same modular difference
/// arithmetic as the single-antenna merge map.
Eigen::MatrixXcd mimo_lambda_bar(const Eigen::MatrixXcd& sigma,
                                 const Eigen::MatrixXcd& gamma, const MergeMap& merge);

struct MimoProblem {
  Eigen::MatrixXcd w_f;  // T x (N_r*N), row t = w(t)^T kron f(t)^H
  Eigen::VectorXcd y;
  std::vector<Eigen::VectorXcd> precoders;
  std::vector<Eigen::VectorXcd> combiners;
  double noise_std = 0.0;
};

MimoProblem assemble_mimo_problem(const MimoRepresentation& mimo,
                                  const Eigen::MatrixXcd& h_bar, int t_pilots, Rng& rng,
                                  double noise_std);

}  // namespace irsce
