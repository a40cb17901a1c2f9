#include "cvqkd/gaussian.hpp"

#include "cvqkd/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace cvqkd::gaussian {
namespace {

constexpr Real kSymmetryTol = 1e-12L;
constexpr Real kPhysicalTol = 1e-9L;
constexpr Real kKernelCutoff = 1e-12L;

// Rounding the stored entries alone moves nu_k^2 by O(u |gamma|^2), so the
// physicality window widens for high-variance states.
Real physical_tolerance(Real floor, Real scale) {
  constexpr Real u = std::numeric_limits<Real>::epsilon();
  return std::max(floor, 64.0L * u * scale * scale);
}

Eigen::Index q_offset(Quadrature q) { return q == Quadrature::x ? 0 : 1; }

void symmetrize(Matrix& m) { m = (0.5L * (m + m.transpose())).eval(); }

void check_fraction(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1], got " +
                      std::to_string(value));
  }
}

std::vector<Eigen::Index> rows_without(std::size_t n_modes, Mode skip) {
  std::vector<Eigen::Index> rows;
  rows.reserve(2 * n_modes);
  for (std::size_t k = 0; k < n_modes; ++k) {
    if (k == skip.index) continue;
    rows.push_back(static_cast<Eigen::Index>(2 * k));
    rows.push_back(static_cast<Eigen::Index>(2 * k + 1));
  }
  return rows;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Matrix elements) : m_(std::move(elements)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0 || m_.rows() % 2 != 0) {
    throw DomainError("covariance matrix must be square with even positive dimension");
  }
  const Real scale = std::max<Real>(1.0L, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw DomainError("covariance matrix is not symmetric");
  }
}

CovarianceMatrix CovarianceMatrix::vacuum(std::size_t n_modes) {
  if (n_modes == 0) throw DomainError("vacuum needs at least one mode");
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return CovarianceMatrix(Matrix::Identity(dim, dim));
}

CovarianceMatrix CovarianceMatrix::thermal(double variance) {
  if (!(variance >= 1.0)) {
    throw DomainError("thermal variance must be >= 1, got " + std::to_string(variance));
  }
  return CovarianceMatrix(Matrix::Identity(2, 2) * static_cast<Real>(variance));
}

void CovarianceMatrix::check_mode(Mode m) const {
  if (m.index >= n_modes()) {
    throw DomainError("mode index " + std::to_string(m.index) + " out of range for " +
                      std::to_string(n_modes()) + "-mode state");
  }
}

Matrix CovarianceMatrix::block(Mode a, Mode b) const {
  check_mode(a);
  check_mode(b);
  return m_.block<2, 2>(static_cast<Eigen::Index>(2 * a.index),
                        static_cast<Eigen::Index>(2 * b.index));
}

Real CovarianceMatrix::variance(Mode m, Quadrature q) const {
  check_mode(m);
  const auto r = static_cast<Eigen::Index>(2 * m.index) + q_offset(q);
  return m_(r, r);
}

CovarianceMatrix CovarianceMatrix::marginal(std::span<const Mode> keep) const {
  if (keep.empty()) throw DomainError("marginal needs at least one mode");
  std::vector<Eigen::Index> rows;
  std::vector<bool> seen(n_modes(), false);
  for (Mode m : keep) {
    check_mode(m);
    if (seen[m.index]) throw DomainError("marginal: duplicate mode index");
    seen[m.index] = true;
    rows.push_back(static_cast<Eigen::Index>(2 * m.index));
    rows.push_back(static_cast<Eigen::Index>(2 * m.index + 1));
  }
  return CovarianceMatrix(m_(rows, rows));
}

Real SymplecticSpectrum::min() const { return *std::ranges::min_element(values); }
Real SymplecticSpectrum::max() const { return *std::ranges::max_element(values); }

CovarianceMatrix epr_source(double variance) {
  if (!(variance >= 1.0)) {
    throw DomainError("EPR variance must be >= 1, got " + std::to_string(variance));
  }
  const Real v = variance;
  const Real c = std::sqrt((v - 1.0L) * (v + 1.0L));
  Matrix m = Matrix::Zero(4, 4);
  m.diagonal().setConstant(v);
  m(0, 2) = m(2, 0) = c;
  m(1, 3) = m(3, 1) = -c;
  return CovarianceMatrix(std::move(m));
}

CovarianceMatrix compose(std::span<const CovarianceMatrix> states) {
  if (states.empty()) throw DomainError("compose needs at least one state");
  Eigen::Index dim = 0;
  for (const auto& s : states) dim += s.elements().rows();
  Matrix m = Matrix::Zero(dim, dim);
  Eigen::Index at = 0;
  for (const auto& s : states) {
    const auto n = s.elements().rows();
    m.block(at, at, n, n) = s.elements();
    at += n;
  }
  return CovarianceMatrix(std::move(m));
}

CovarianceMatrix compose(std::initializer_list<CovarianceMatrix> states) {
  return compose(std::span<const CovarianceMatrix>(states.begin(), states.size()));
}

CovarianceMatrix beam_splitter(const CovarianceMatrix& state, Mode i, Mode j,
                               double transmittance) {
  check_fraction(transmittance, "beam-splitter transmittance");
  if (i == j) throw DomainError("beam splitter needs two distinct modes");
  if (i.index >= state.n_modes() || j.index >= state.n_modes()) {
    throw DomainError("beam splitter mode out of range");
  }
  const Real t = std::sqrt(static_cast<Real>(transmittance));
  const Real r = std::sqrt(1.0L - static_cast<Real>(transmittance));
  const auto dim = state.elements().rows();
  Matrix s = Matrix::Identity(dim, dim);
  for (Eigen::Index q = 0; q < 2; ++q) {
    const auto a = static_cast<Eigen::Index>(2 * i.index) + q;
    const auto b = static_cast<Eigen::Index>(2 * j.index) + q;
    s(a, a) = t;
    s(a, b) = r;
    s(b, a) = -r;
    s(b, b) = t;
  }
  Matrix out = s * state.elements() * s.transpose();
  symmetrize(out);
  return CovarianceMatrix(std::move(out));
}

CovarianceMatrix loss_channel(const CovarianceMatrix& state, Mode mode, double eta,
                              double excess) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw DomainError("channel transmittivity must lie in (0, 1], got " +
                      std::to_string(eta));
  }
  if (!(excess >= 0.0)) throw DomainError("excess noise must be >= 0");
  if (mode.index >= state.n_modes()) throw DomainError("loss channel mode out of range");
  const Real g = std::sqrt(static_cast<Real>(eta));
  const auto at = static_cast<Eigen::Index>(2 * mode.index);
  Matrix out = state.elements();
  out.middleRows(at, 2) *= g;
  out.middleCols(at, 2) *= g;
  const Real added = 1.0L - static_cast<Real>(eta) + static_cast<Real>(eta) * excess;
  out(at, at) += added;
  out(at + 1, at + 1) += added;
  return CovarianceMatrix(std::move(out));
}

CovarianceMatrix add_phase_insensitive_noise(const CovarianceMatrix& state, Mode mode,
                                             double noise) {
  if (!(noise >= 0.0)) throw DomainError("additive noise must be >= 0");
  if (mode.index >= state.n_modes()) throw DomainError("noise mode out of range");
  Matrix out = state.elements();
  const auto at = static_cast<Eigen::Index>(2 * mode.index);
  out(at, at) += noise;
  out(at + 1, at + 1) += noise;
  return CovarianceMatrix(std::move(out));
}

SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& state) {
  // nu_k^2 are the (doubly degenerate) eigenvalues of K^T K with
  // K = gamma^{1/2} Omega gamma^{1/2}, which is similar to Omega gamma.
  const Matrix& g = state.elements();
  const auto dim = g.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> root(g);
  if (root.info() != Eigen::Success || root.eigenvalues().minCoeff() <= 0.0L) {
    throw DomainError("covariance matrix is not positive definite");
  }
  const Matrix sqrt_g = root.operatorSqrt();
  Matrix omega = Matrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    omega(k, k + 1) = 1.0L;
    omega(k + 1, k) = -1.0L;
  }
  const Matrix k = sqrt_g * omega * sqrt_g;
  Matrix kk = k.transpose() * k;
  symmetrize(kk);
  Eigen::SelfAdjointEigenSolver<Matrix> es(kk, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw DomainError("symplectic spectrum failed");
  const auto& ev = es.eigenvalues();  // ascending
  SymplecticSpectrum out;
  out.scale = g.cwiseAbs().maxCoeff();
  out.values.reserve(static_cast<std::size_t>(dim / 2));
  for (Eigen::Index k2 = dim - 2; k2 >= 0; k2 -= 2) {
    const Real sq = 0.5L * (ev(k2) + ev(k2 + 1));
    out.values.push_back(std::sqrt(std::max<Real>(sq, 0.0L)));
  }
  return out;
}

Real thermal_entropy_kernel(Real x) {
  if (x <= kKernelCutoff) return 0.0L;
  constexpr Real ln2 = std::numbers::ln2_v<Real>;
  return ((x + 1.0L) * std::log1p(x) - x * std::log(x)) / ln2;
}

double von_neumann_entropy(const SymplecticSpectrum& spectrum) {
  const Real tol = physical_tolerance(kPhysicalTol, spectrum.scale);
  Real s = 0.0L;
  for (Real nu : spectrum.values) {
    if (nu < 1.0L - tol) {
      throw DomainError("unphysical state: symplectic eigenvalue below 1");
    }
    s += thermal_entropy_kernel((std::max<Real>(nu, 1.0L) - 1.0L) / 2.0L);
  }
  return static_cast<double>(s);
}

double von_neumann_entropy(const CovarianceMatrix& state) {
  return von_neumann_entropy(symplectic_eigenvalues(state));
}

bool is_physical(const CovarianceMatrix& state, double tol) {
  try {
    const auto spectrum = symplectic_eigenvalues(state);
    return spectrum.min() >= 1.0L - physical_tolerance(static_cast<Real>(tol), spectrum.scale);
  } catch (const DomainError&) {
    return false;
  }
}

CovarianceMatrix homodyne_condition(const CovarianceMatrix& state, Mode measured,
                                    Quadrature quadrature) {
  const std::size_t n = state.n_modes();
  if (n < 2) throw DomainError("homodyne conditioning needs at least two modes");
  if (measured.index >= n) throw DomainError("measured mode out of range");
  const Matrix& g = state.elements();
  const auto col = static_cast<Eigen::Index>(2 * measured.index) + q_offset(quadrature);
  const Real v = g(col, col);
  if (!(v > 0.0L)) throw DegenerateMeasurement("measured quadrature has zero variance");
  const auto rows = rows_without(n, measured);
  const Matrix rest = g(rows, rows);
  const Eigen::Matrix<Real, Eigen::Dynamic, 1> c = g(rows, col);
  Matrix out = rest - (c * c.transpose()) / v;
  symmetrize(out);
  return CovarianceMatrix(std::move(out));
}

CovarianceMatrix heterodyne_condition(const CovarianceMatrix& state, Mode measured) {
  const std::size_t n = state.n_modes();
  if (n < 2) throw DomainError("heterodyne conditioning needs at least two modes");
  if (measured.index >= n) throw DomainError("measured mode out of range");
  const Matrix& g = state.elements();
  const auto at = static_cast<Eigen::Index>(2 * measured.index);
  const auto rows = rows_without(n, measured);
  const Matrix sigma = g(rows, Eigen::seqN(at, 2));
  const Matrix gm = g.block(at, at, 2, 2) + Matrix::Identity(2, 2);
  Matrix out = g(rows, rows) - sigma * gm.inverse() * sigma.transpose();
  symmetrize(out);
  return CovarianceMatrix(std::move(out));
}

double conditional_variance(const CovarianceMatrix& state, Mode target, Mode measured,
                            Quadrature quadrature) {
  if (target == measured) throw DomainError("target and measured modes must differ");
  const std::size_t n = state.n_modes();
  if (target.index >= n || measured.index >= n) throw DomainError("mode out of range");
  const auto t = static_cast<Eigen::Index>(2 * target.index) + q_offset(quadrature);
  const auto m = static_cast<Eigen::Index>(2 * measured.index) + q_offset(quadrature);
  const Matrix& g = state.elements();
  const Real v = g(m, m);
  if (!(v > 0.0L)) throw DegenerateMeasurement("measured quadrature has zero variance");
  return static_cast<double>(g(t, t) - g(t, m) * g(t, m) / v);
}

}  // namespace cvqkd::gaussian
