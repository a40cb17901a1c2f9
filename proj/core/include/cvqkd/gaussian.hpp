#pragma once

// Covariance-matrix description of Gaussian states and the symplectic
// operations used to model sources, couplers, channels and measurements.
//
// Conventions: quadrature ordering (x1, p1, x2, p2, ...), shot-noise units
// with vacuum variance 1, entropies in bits. Matrices are held in extended
// precision because high-variance sources (V ~ 1e5..1e6) make pure-state
// symplectic eigenvalues ill-conditioned in double.

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cvqkd::gaussian {

using Real = long double;
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// Index of a bosonic mode inside a covariance matrix.
struct Mode {
  std::size_t index;
  constexpr explicit Mode(std::size_t i) : index(i) {}
  friend constexpr bool operator==(Mode, Mode) = default;
};

enum class Quadrature { x, p };

/// Real symmetric 2N x 2N matrix of quadrature second moments.
class CovarianceMatrix {
 public:
  /// Throws DomainError unless `elements` is square, even-sized and symmetric.
  explicit CovarianceMatrix(Matrix elements);

  static CovarianceMatrix vacuum(std::size_t n_modes = 1);
  /// Single-mode thermal state; `variance` >= 1.
  static CovarianceMatrix thermal(double variance);

  std::size_t n_modes() const { return static_cast<std::size_t>(m_.rows() / 2); }
  const Matrix& elements() const { return m_; }
  Real operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  /// 2x2 block coupling modes a and b.
  Matrix block(Mode a, Mode b) const;
  Real variance(Mode m, Quadrature q) const;

  /// Reduced state on `keep`, in the given order (partial trace over the rest).
  CovarianceMatrix marginal(std::span<const Mode> keep) const;
  CovarianceMatrix marginal(std::initializer_list<Mode> keep) const {
    return marginal(std::span<const Mode>(keep.begin(), keep.size()));
  }

 private:
  void check_mode(Mode m) const;
  Matrix m_;
};

/// Symplectic eigenvalues in descending order, one per mode.
struct SymplecticSpectrum {
  std::vector<Real> values;
  Real scale = 1.0L;  ///< largest |entry| of the source matrix, sets the rounding floor

  Real min() const;
  Real max() const;
  std::size_t size() const { return values.size(); }
};

/// Two-mode squeezed vacuum with local variance `variance` (>= 1).
CovarianceMatrix epr_source(double variance);

/// Direct sum of uncorrelated subsystems, modes kept in input order.
CovarianceMatrix compose(std::span<const CovarianceMatrix> states);
CovarianceMatrix compose(std::initializer_list<CovarianceMatrix> states);

/// Passive two-mode coupler. The transmitted arm keeps its sign, the
/// reflected arm of mode i enters mode j with a minus sign.
CovarianceMatrix beam_splitter(const CovarianceMatrix& state, Mode i, Mode j,
                               double transmittance);

/// Phase-insensitive channel of transmittivity eta with excess noise referred
/// to the channel input: V -> eta V + 1 - eta + eta * excess.
CovarianceMatrix loss_channel(const CovarianceMatrix& state, Mode mode, double eta,
                              double excess);

CovarianceMatrix add_phase_insensitive_noise(const CovarianceMatrix& state, Mode mode,
                                             double noise);

SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& state);

/// G(x) = (x+1) log2(x+1) - x log2(x); zero for x <= 1e-12.
Real thermal_entropy_kernel(Real x);

/// Sum of G((nu_k - 1) / 2) over the symplectic spectrum, in bits.
double von_neumann_entropy(const CovarianceMatrix& state);
double von_neumann_entropy(const SymplecticSpectrum& spectrum);

/// True when every symplectic eigenvalue is >= 1 - tol. The tolerance is
/// raised to the rounding floor 64 u max|gamma_ij|^2 for large entries.
bool is_physical(const CovarianceMatrix& state, double tol = 1e-9);

/// State of the remaining modes after an ideal homodyne measurement of one
/// quadrature of `measured`: gamma - sigma (X gamma_m X)^MP sigma^T.
CovarianceMatrix homodyne_condition(const CovarianceMatrix& state, Mode measured,
                                    Quadrature quadrature);

/// State of the remaining modes after a heterodyne (double-homodyne)
/// measurement of `measured`: gamma - sigma (gamma_m + I)^-1 sigma^T.
CovarianceMatrix heterodyne_condition(const CovarianceMatrix& state, Mode measured);

/// V_t - C^2 / V_m for one quadrature, C the covariance of that quadrature
/// between target and measured modes.
double conditional_variance(const CovarianceMatrix& state, Mode target, Mode measured,
                            Quadrature quadrature);

}  // namespace cvqkd::gaussian
