#include "cvqkd/errors.hpp"
#include "cvqkd/gaussian.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cvqkd;
using namespace cvqkd::gaussian;

namespace {

CovarianceMatrix from(const oracle::Mat& m) { return CovarianceMatrix(m.cast<Real>()); }
oracle::Mat to_double(const CovarianceMatrix& c) { return c.elements().cast<double>(); }

double max_abs_diff(const oracle::Mat& a, const oracle::Mat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

Matrix diag2(Real a, Real b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST(CovarianceMatrix, RejectsMalformedInput) {
  EXPECT_THROW(CovarianceMatrix(Matrix::Identity(3, 3)), DomainError);
  EXPECT_THROW(CovarianceMatrix(Matrix::Identity(2, 4)), DomainError);
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = 0.1L;
  EXPECT_THROW(CovarianceMatrix{m}, DomainError);
}

TEST(CovarianceMatrix, MarginalKeepsRequestedOrder) {
  const auto s = compose({CovarianceMatrix::thermal(2.0), CovarianceMatrix::thermal(3.0),
                          CovarianceMatrix::thermal(4.0)});
  const auto m = s.marginal({Mode{2}, Mode{0}});
  EXPECT_EQ(m.n_modes(), 2u);
  EXPECT_DOUBLE_EQ(static_cast<double>(m.variance(Mode{0}, Quadrature::x)), 4.0);
  EXPECT_DOUBLE_EQ(static_cast<double>(m.variance(Mode{1}, Quadrature::p)), 2.0);
  EXPECT_THROW(s.marginal({Mode{1}, Mode{1}}), DomainError);
  EXPECT_THROW(s.marginal({Mode{3}}), DomainError);
}

TEST(EprSource, UnitVarianceIsTwoVacua) {
  EXPECT_EQ(epr_source(1.0).elements(), Matrix::Identity(4, 4));
}

TEST(EprSource, VarianceTwoBlocks) {
  const auto s = epr_source(2.0);
  const double c = std::sqrt(3.0);
  EXPECT_DOUBLE_EQ(static_cast<double>(s(0, 0)), 2.0);
  EXPECT_DOUBLE_EQ(static_cast<double>(s(1, 1)), 2.0);
  EXPECT_NEAR(static_cast<double>(s(0, 2)), c, 1e-15);
  EXPECT_NEAR(static_cast<double>(s(1, 3)), -c, 1e-15);
  EXPECT_EQ(s(0, 3), 0.0L);
  for (double nu : oracle::williamson(to_double(s))) EXPECT_NEAR(nu, 1.0, 1e-12);
}

TEST(EprSource, MarginalsAreThermalAndStateIsPure) {
  for (double v : {1.5, 20.0, 1e3}) {
    const auto s = epr_source(v);
    EXPECT_DOUBLE_EQ(static_cast<double>(s.variance(Mode{0}, Quadrature::x)), v);
    EXPECT_DOUBLE_EQ(static_cast<double>(s.variance(Mode{1}, Quadrature::p)), v);
    for (double nu : oracle::williamson(to_double(s))) EXPECT_NEAR(nu, 1.0, 1e-9 * v);
    EXPECT_NEAR(von_neumann_entropy(s), 0.0, 1e-9);
  }
  EXPECT_THROW(epr_source(0.5), DomainError);
}

TEST(Compose, DirectSum) {
  EXPECT_EQ(compose({CovarianceMatrix::vacuum(), CovarianceMatrix::vacuum()}).elements(),
            Matrix::Identity(4, 4));
  EXPECT_EQ(compose({epr_source(2.0)}).elements(), epr_source(2.0).elements());
  const auto s = compose({epr_source(2.0), CovarianceMatrix::vacuum()});
  EXPECT_EQ(s.n_modes(), 3u);
  EXPECT_EQ(s.block(Mode{0}, Mode{2}), Matrix::Zero(2, 2));
  EXPECT_EQ(s.block(Mode{1}, Mode{2}), Matrix::Zero(2, 2));
}

TEST(BeamSplitter, IdentityAndSwap) {
  oracle::Rng rng(11);
  const auto s = from(oracle::random_state(rng, 2));
  EXPECT_LT(max_abs_diff(to_double(beam_splitter(s, Mode{0}, Mode{1}, 1.0)), to_double(s)),
            1e-14);
  const auto swapped = beam_splitter(s, Mode{0}, Mode{1}, 0.0);
  const oracle::Mat a = to_double(swapped.marginal({Mode{0}}));
  const oracle::Mat b = to_double(s.marginal({Mode{1}}));
  EXPECT_LT(max_abs_diff(a, b), 1e-14);
  EXPECT_THROW(beam_splitter(s, Mode{1}, Mode{1}, 0.5), DomainError);
  EXPECT_THROW(beam_splitter(s, Mode{0}, Mode{1}, 1.5), DomainError);
}

TEST(BeamSplitter, HalfMixingWithVacuum) {
  const auto s = compose({epr_source(2.0), CovarianceMatrix::vacuum()});
  const auto out = beam_splitter(s, Mode{0}, Mode{2}, 0.5);
  EXPECT_NEAR(static_cast<double>(out.variance(Mode{0}, Quadrature::x)), 1.5, 1e-15);
}

TEST(BeamSplitter, MatchesSymplecticOracle) {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const oracle::Mat g = oracle::random_state(rng, 3);
    const double t = rng.uniform();
    const oracle::Mat s = oracle::beam_splitter(3, 0, 2, t);
    const oracle::Mat expected = s * g * s.transpose();
    EXPECT_LT(max_abs_diff(to_double(beam_splitter(from(g), Mode{0}, Mode{2}, t)), expected),
              1e-12);
  }
}

TEST(BeamSplitter, PreservesSymplecticSpectrum) {
  oracle::Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const oracle::Mat g = oracle::random_state(rng, 3);
    const auto before = symplectic_eigenvalues(from(g));
    const auto after =
        symplectic_eigenvalues(beam_splitter(from(g), Mode{1}, Mode{2}, rng.uniform()));
    for (std::size_t k = 0; k < before.size(); ++k) {
      EXPECT_NEAR(static_cast<double>(after.values[k]), static_cast<double>(before.values[k]),
                  1e-10);
    }
  }
}

TEST(LossChannel, Examples) {
  EXPECT_EQ(loss_channel(epr_source(3.0), Mode{1}, 1.0, 0.0).elements(),
            epr_source(3.0).elements());
  EXPECT_NEAR(static_cast<double>(loss_channel(CovarianceMatrix::thermal(21.0), Mode{0}, 0.01, 0.0)
                                      .variance(Mode{0}, Quadrature::x)),
              1.2, 1e-14);
  EXPECT_NEAR(static_cast<double>(loss_channel(CovarianceMatrix::thermal(10.0), Mode{0}, 0.1, 0.5)
                                      .variance(Mode{0}, Quadrature::p)),
              1.95, 1e-14);
  EXPECT_THROW(loss_channel(CovarianceMatrix::vacuum(), Mode{0}, 0.0, 0.0), DomainError);
  EXPECT_THROW(loss_channel(CovarianceMatrix::vacuum(), Mode{0}, 0.5, -0.1), DomainError);
}

TEST(LossChannel, EqualsClonerAncillaDiscarded) {
  oracle::Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const oracle::Mat g = oracle::random_state(rng, 2);
    const double eta = rng.uniform(0.001, 0.999);
    const double eps = rng.uniform(0.0, 2.0);
    const double n = 1.0 + eta * eps / (1.0 - eta);
    const auto direct = loss_channel(from(g), Mode{1}, eta, eps);
    const auto with_ancilla = compose({from(g), CovarianceMatrix::thermal(n)});
    const auto mixed = beam_splitter(with_ancilla, Mode{1}, Mode{2}, eta);
    EXPECT_LT(max_abs_diff(to_double(direct), to_double(mixed.marginal({Mode{0}, Mode{1}}))),
              1e-10);
  }
}

TEST(AddNoise, Examples) {
  EXPECT_EQ(add_phase_insensitive_noise(epr_source(2.0), Mode{0}, 0.0).elements(),
            epr_source(2.0).elements());
  EXPECT_NEAR(static_cast<double>(add_phase_insensitive_noise(CovarianceMatrix::vacuum(),
                                                              Mode{0}, 0.33)
                                      .variance(Mode{0}, Quadrature::x)),
              1.33, 1e-15);
  EXPECT_EQ(add_phase_insensitive_noise(CovarianceMatrix::thermal(20.0), Mode{0}, 1.0)
                .variance(Mode{0}, Quadrature::p),
            21.0L);
}

TEST(SymplecticEigenvalues, Examples) {
  for (Real nu : symplectic_eigenvalues(CovarianceMatrix::vacuum(3)).values) {
    EXPECT_NEAR(static_cast<double>(nu), 1.0, 1e-15);
  }
  const auto epr = symplectic_eigenvalues(epr_source(5.0));
  EXPECT_EQ(epr.size(), 2u);
  EXPECT_NEAR(static_cast<double>(epr.max()), 1.0, 1e-12);
  EXPECT_NEAR(static_cast<double>(epr.min()), 1.0, 1e-12);
  EXPECT_NEAR(static_cast<double>(symplectic_eigenvalues(CovarianceMatrix(diag2(2, 4.5))).max()),
              3.0, 1e-15);
}

TEST(SymplecticEigenvalues, MatchWilliamsonOracle) {
  oracle::Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const oracle::Mat g = oracle::random_state(rng, 1 + trial % 5);
    const auto got = symplectic_eigenvalues(from(g));
    const auto want = oracle::williamson(g);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
      EXPECT_NEAR(static_cast<double>(got.values[k]), want[k], 1e-9 * want[k]);
    }
    EXPECT_TRUE(std::ranges::is_sorted(got.values, std::greater<>()));
  }
}

TEST(Entropy, Examples) {
  EXPECT_EQ(von_neumann_entropy(epr_source(7.0)), 0.0);
  EXPECT_NEAR(von_neumann_entropy(CovarianceMatrix::thermal(3.0)), 2.0, 1e-14);
  EXPECT_NEAR(von_neumann_entropy(CovarianceMatrix::thermal(2.0)),
              1.5 * std::log2(1.5) + 0.5, 1e-14);
  EXPECT_NEAR(von_neumann_entropy(CovarianceMatrix::thermal(2.0)), 1.377444, 1e-6);
  EXPECT_EQ(thermal_entropy_kernel(0.0L), 0.0L);
  EXPECT_EQ(thermal_entropy_kernel(1e-13L), 0.0L);
}

TEST(Entropy, AdditiveOverComposeAndMatchesOracle) {
  oracle::Rng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const oracle::Mat a = oracle::random_state(rng, 2);
    const oracle::Mat b = oracle::random_state(rng, 1);
    const double sa = von_neumann_entropy(from(a));
    const double sb = von_neumann_entropy(from(b));
    EXPECT_NEAR(von_neumann_entropy(compose({from(a), from(b)})), sa + sb, 1e-10);
    EXPECT_NEAR(sa, oracle::entropy(a), 1e-9);
    EXPECT_GE(sa, 0.0);
  }
}

TEST(Entropy, RejectsUnphysicalState) {
  EXPECT_THROW(von_neumann_entropy(CovarianceMatrix(diag2(0.5, 0.5))), DomainError);
  EXPECT_FALSE(is_physical(CovarianceMatrix(diag2(0.5, 1.5))));
  EXPECT_TRUE(is_physical(CovarianceMatrix(diag2(0.5, 2.0))));
}

TEST(Entropy, HighVariancePureStateIsPhysical) {
  for (double v : {1e5, 1e6}) {
    const auto s = epr_source(v);
    EXPECT_TRUE(is_physical(s));
    EXPECT_NEAR(von_neumann_entropy(s), 0.0, 1e-6);
  }
}

TEST(Homodyne, UncorrelatedMeasuredModeLeavesRestUnchanged) {
  const auto s = compose({epr_source(3.0), CovarianceMatrix::thermal(4.0)});
  const auto out = homodyne_condition(s, Mode{2}, Quadrature::x);
  EXPECT_EQ(out.elements(), epr_source(3.0).elements());
  EXPECT_EQ(conditional_variance(s, Mode{0}, Mode{2}, Quadrature::p), 3.0);
}

TEST(Homodyne, EprExamples) {
  const auto out = homodyne_condition(epr_source(2.0), Mode{1}, Quadrature::x);
  EXPECT_NEAR(static_cast<double>(out(0, 0)), 0.5, 1e-15);
  EXPECT_NEAR(static_cast<double>(out(1, 1)), 2.0, 1e-15);
  EXPECT_NEAR(conditional_variance(epr_source(2.0), Mode{0}, Mode{1}, Quadrature::x), 0.5, 1e-15);
  for (double v : {1.0, 2.0, 10.0, 100.0}) {
    EXPECT_NEAR(conditional_variance(epr_source(v), Mode{0}, Mode{1}, Quadrature::x), 1.0 / v,
                1e-13);
  }
}

TEST(Homodyne, MatchesGaussianConditioningOracle) {
  oracle::Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const oracle::Mat g = oracle::random_state(rng, 3);
    const int m = trial % 3;
    const auto got = homodyne_condition(from(g), Mode{static_cast<std::size_t>(m)}, Quadrature::x);
    const oracle::Mat want = oracle::condition_on_x(g, m);
    EXPECT_LT(max_abs_diff(to_double(got), want), 1e-12 * std::max(1.0, want.cwiseAbs().maxCoeff()));
    EXPECT_TRUE(is_physical(got));
    const std::size_t target = (m + 1) % 3;
    const std::size_t idx = target < static_cast<std::size_t>(m) ? target : target - 1;
    EXPECT_NEAR(conditional_variance(from(g), Mode{target}, Mode{static_cast<std::size_t>(m)},
                                     Quadrature::x),
                static_cast<double>(got(2 * idx, 2 * idx)), 1e-12);
  }
}

TEST(Homodyne, PQuadratureMirrorsX) {
  oracle::Rng rng(18);
  const oracle::Mat g = oracle::random_state(rng, 2);
  // Swapping x and p of every mode maps p-conditioning onto x-conditioning.
  oracle::Mat swap = oracle::Mat::Zero(4, 4);
  for (int k = 0; k < 2; ++k) swap(2 * k, 2 * k + 1) = swap(2 * k + 1, 2 * k) = 1.0;
  const oracle::Mat gs = swap * g * swap.transpose();
  const oracle::Mat want = oracle::condition_on_x(gs, 1);
  const oracle::Mat got = to_double(homodyne_condition(from(g), Mode{1}, Quadrature::p));
  const oracle::Mat back = swap.topLeftCorner(2, 2) * got * swap.topLeftCorner(2, 2);
  EXPECT_LT(max_abs_diff(back, want), 1e-12);
}

TEST(Homodyne, Errors) {
  Matrix m = Matrix::Identity(4, 4);
  m(2, 2) = 0.0L;
  m(3, 3) = 4.0L;
  EXPECT_THROW(homodyne_condition(CovarianceMatrix(m), Mode{1}, Quadrature::x),
               DegenerateMeasurement);
  EXPECT_THROW(homodyne_condition(CovarianceMatrix::vacuum(), Mode{0}, Quadrature::x),
               DomainError);
}

TEST(Heterodyne, EprLeavesVacuum) {
  for (double v : {2.0, 50.0}) {
    const auto out = heterodyne_condition(epr_source(v), Mode{0});
    EXPECT_NEAR(static_cast<double>(out(0, 0)), 1.0, 1e-12);
    EXPECT_NEAR(static_cast<double>(out(1, 1)), 1.0, 1e-12);
  }
}

TEST(Physicality, ClosedUnderOperations) {
  oracle::Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = from(oracle::random_state(rng, 3));
    s = beam_splitter(s, Mode{0}, Mode{1}, rng.uniform());
    s = loss_channel(s, Mode{2}, rng.uniform(0.01, 1.0), rng.uniform(0.0, 1.0));
    s = add_phase_insensitive_noise(s, Mode{1}, rng.uniform(0.0, 2.0));
    EXPECT_GE(static_cast<double>(symplectic_eigenvalues(s).min()), 1.0 - 1e-9);
    const auto c = homodyne_condition(s, Mode{0}, Quadrature::x);
    EXPECT_GE(static_cast<double>(symplectic_eigenvalues(c).min()), 1.0 - 1e-9);
    const auto h = heterodyne_condition(s, Mode{2});
    EXPECT_GE(static_cast<double>(symplectic_eigenvalues(h).min()), 1.0 - 1e-9);
  }
}

TEST(Physicality, SourceBuiltStatesHaveDiagonalAboveVacuum) {
  auto s = compose({epr_source(20.0), CovarianceMatrix::vacuum(), epr_source(3.0)});
  s = beam_splitter(s, Mode{1}, Mode{4}, 0.9);
  s = beam_splitter(s, Mode{1}, Mode{2}, 0.3);
  s = loss_channel(s, Mode{1}, 0.05, 0.1);
  for (Eigen::Index i = 0; i < s.elements().rows(); ++i) {
    EXPECT_GE(static_cast<double>(s(i, i)), 1.0 - 1e-9);
  }
}
