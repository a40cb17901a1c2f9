#include "cvqkd/analytic.hpp"
#include "cvqkd/collective.hpp"
#include "cvqkd/errors.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cvqkd;
using namespace cvqkd::collective;

namespace {

ProtocolParams params(double V, double dV, double T, double chi, double eta, double eps) {
  ProtocolParams p;
  p.V = V;
  p.dV = dV;
  p.T = T;
  p.chi = chi;
  p.eta = eta;
  p.eps = eps;
  return p;
}

// Holevo bound of a symmetric two-mode (B, E) state from its closed-form
// symplectic eigenvalues.
double holevo_closed_form(double V, double dV, double T, double chi, double eta) {
  const double vp = T * (V + dV) + 1.0 - T;
  const double v_e = (1.0 - eta) * vp + eta;
  const double v_b = eta * vp + 1.0 - eta + chi;
  const double c2 = eta * (1.0 - eta) * (1.0 - vp) * (1.0 - vp);
  const double nu = std::sqrt(v_e * (v_e - c2 / v_b));
  return oracle::g((v_e - 1.0) / 2.0) - oracle::g((nu - 1.0) / 2.0);
}

oracle::Mat epr(double v) {
  oracle::Mat m = oracle::Mat::Zero(4, 4);
  const double c = std::sqrt(v * v - 1.0);
  m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = v;
  m(0, 2) = m(2, 0) = c;
  m(1, 3) = m(3, 1) = -c;
  return m;
}

oracle::Mat direct_sum(const oracle::Mat& a, const oracle::Mat& b) {
  oracle::Mat m = oracle::Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

oracle::Mat keep_modes(const oracle::Mat& g, const std::vector<int>& modes) {
  const int n = static_cast<int>(modes.size());
  oracle::Mat out(2 * n, 2 * n);
  for (int a = 0; a < 2 * n; ++a) {
    for (int b = 0; b < 2 * n; ++b) out(a, b) = g(2 * modes[a / 2] + a % 2, 2 * modes[b / 2] + b % 2);
  }
  return out;
}

// Five-mode Holevo bound with the channel realized as an explicit cloner:
// modes A B C F G E1 E2, Bob's mode mixed with E1.
double holevo_five_mode_oracle(double V, double dv0, double tn, double T, double eta, double eps) {
  const double n = 1.0 + eta * eps / (1.0 - eta);
  oracle::Mat g = direct_sum(direct_sum(direct_sum(epr(V), oracle::Mat::Identity(2, 2)), epr(dv0)),
                             epr(n));
  auto apply = [&](const oracle::Mat& s) { g = s * g * s.transpose(); };
  apply(oracle::beam_splitter(7, 1, 4, tn));
  apply(oracle::beam_splitter(7, 1, 2, T));
  apply(oracle::beam_splitter(7, 1, 5, eta));
  const oracle::Mat abcfg = keep_modes(g, {0, 1, 2, 3, 4});
  return oracle::entropy(abcfg) - oracle::entropy(oracle::condition_on_x(abcfg, 1));
}

}  // namespace

TEST(PurificationModel, InjectsRequestedNoise) {
  for (double dV : {0.0, 1e-3, 0.5, 7.0}) {
    for (double tn : {0.9, 0.999, 1.0 - 1e-6}) {
      const auto pm = PurificationModel::for_noise(dV, tn);
      EXPECT_NEAR(pm.injected_noise(), dV, 1e-12 * std::max(1.0, dV));
    }
  }
  EXPECT_THROW(PurificationModel::for_noise(-1.0), DomainError);
  EXPECT_THROW(PurificationModel::for_noise(1.0, 1.0), DomainError);
}

TEST(BuildAbcfg, NoiselessBobMarginal) {
  const auto s = build_abcfg(20.0, PurificationModel::for_noise(0.0), 1.0, 0.01, 0.0);
  EXPECT_NEAR(static_cast<double>(s.cm.variance(mode(ModeName::B), gaussian::Quadrature::x)),
              0.01 * 19.0 + 1.0, 1e-12);
  EXPECT_EQ(s.cm.n_modes(), 5u);
}

TEST(BuildAbcfg, PureWithoutChannelLoss) {
  for (double T : {1.0, 0.3}) {
    const auto s = build_abcfg(20.0, PurificationModel::for_noise(1.0, 0.999), T, 1.0, 0.0);
    EXPECT_LT(gaussian::von_neumann_entropy(s.cm), 1e-6);
  }
}

TEST(BuildAbcfg, LossyStateIsPurifiedByEavesdropperMode) {
  // With eps = 0 the cloner's EPR pair is vacuum, so ABCFG plus the single
  // mode E1 is pure and both share the same entropy.
  for (double T : {1.0, 0.3}) {
    const auto pm = PurificationModel::for_noise(1.0, 0.999);
    const auto s = build_abcfg(params(20.0, 1.0, T, 0.0, 0.05, 0.0), pm);
    const auto lossless = build_abcfg(20.0, pm, T, 1.0, 0.0);
    const double v_in =
        static_cast<double>(lossless.cm.variance(mode(ModeName::B), gaussian::Quadrature::x));
    const double s_e = oracle::g((0.95 * v_in + 0.05 - 1.0) / 2.0);
    EXPECT_NEAR(gaussian::von_neumann_entropy(s.cm), s_e, 1e-6);
  }
  const auto noisy = build_abcfg(params(20.0, 1.0, 1.0, 0.0, 0.05, 0.1),
                                 PurificationModel::for_noise(1.0, 0.999));
  EXPECT_GT(gaussian::von_neumann_entropy(noisy.cm), 1e-3);
}

TEST(BuildAbcfg, NoisyBobMarginalApproachesClosedForm) {
  const double want = 0.01 * 21.0 + 0.99;
  double previous_gap = 1.0;
  for (double tn : {0.999, 0.9999, 0.99999}) {
    const auto s = build_abcfg(params(20.0, 1.0, 1.0, 0.0, 0.01, 0.0),
                               PurificationModel::for_noise(1.0, tn));
    const double gap = std::abs(
        static_cast<double>(s.cm.variance(mode(ModeName::B), gaussian::Quadrature::x)) - want);
    EXPECT_LT(gap, 1e-3);
    EXPECT_LE(gap, previous_gap);
    previous_gap = gap;
  }
}

TEST(BuildAbcfg, RejectsInconsistentNoiseModel) {
  EXPECT_THROW(build_abcfg(params(20.0, 2.0, 1.0, 0.0, 0.1, 0.0),
                           PurificationModel::for_noise(1.0, 0.999)),
               DomainError);
}

TEST(HolevoDirect, Examples) {
  EXPECT_NEAR(holevo_direct(1.0, 0.0, 1.0, 0.0, 0.3), 0.0, 1e-12);
  EXPECT_NEAR(holevo_direct(20.0, 1.0, 1.0, 0.2, 1.0), 0.0, 1e-12);
  const double h = holevo_direct(20.0, 0.0, 1.0, 0.0, 0.01);
  EXPECT_GT(h, 0.0);
  EXPECT_GT(mutual_information_ab(params(20.0, 0.0, 1.0, 0.0, 0.01, 0.0)) - h, 0.0);
}

TEST(HolevoDirect, MatchesClosedFormEigenvalues) {
  oracle::Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const double V = rng.log_uniform(1.1, 1e4), dV = rng.uniform(0.0, 5.0);
    const double T = rng.uniform(0.01, 1.0), chi = rng.uniform(0.0, 1.0);
    const double eta = rng.uniform(0.01, 0.99);
    const double h = holevo_direct(V, dV, T, chi, eta);
    EXPECT_NEAR(h, holevo_closed_form(V, dV, T, chi, eta), 1e-9 * std::max(1.0, h));
    EXPECT_GE(h, 0.0);
  }
}

TEST(HolevoPurification, Examples) {
  const auto vacuum = build_abcfg(params(1.0, 0.0, 1.0, 0.0, 0.1, 0.0),
                                  PurificationModel::for_noise(0.0));
  EXPECT_NEAR(holevo_purification(vacuum), 0.0, 1e-9);

  const auto pm = PurificationModel::for_noise(1.0);
  const double clean = holevo_purification(build_abcfg(params(20.0, 1.0, 1.0, 0.0, 0.01, 0.0), pm));
  const double noisy = holevo_purification(build_abcfg(params(20.0, 1.0, 1.0, 0.0, 0.01, 0.02), pm));
  EXPECT_TRUE(std::isfinite(noisy));
  EXPECT_GT(noisy, clean);
}

TEST(HolevoPurification, AgreesWithDirectMethodWithoutChannelNoise) {
  for (double V : {5.0, 20.0, 100.0}) {
    for (double dV : {0.0, 0.5, 2.0}) {
      for (double T : {0.2, 1.0}) {
        for (double eta : {0.01, 0.1}) {
          const auto p = params(V, dV, T, 0.0, eta, 0.0);
          const double direct = holevo_direct(V, dV, T, 0.0, eta);
          const double coarse =
              holevo_purification(build_abcfg(p, PurificationModel::for_noise(dV, 1.0 - 1e-4)));
          const double fine =
              holevo_purification(build_abcfg(p, PurificationModel::for_noise(dV, 1.0 - 1e-5)));
          EXPECT_LE(std::abs(coarse - direct), 1e-3);
          EXPECT_LE(std::abs(fine - direct), std::abs(coarse - direct) + 1e-12);
          EXPECT_NEAR(holevo_purification_extrapolated(p, 1.0 - 1e-4), direct, 1e-6);
        }
      }
    }
  }
}

TEST(HolevoPurification, MatchesExplicitClonerOracle) {
  oracle::Rng rng(32);
  for (int i = 0; i < 30; ++i) {
    const double V = rng.uniform(2.0, 50.0), dV = rng.uniform(0.0, 3.0);
    const double T = rng.uniform(0.1, 1.0), eta = rng.uniform(0.05, 0.9);
    const double eps = rng.uniform(0.0, 0.3), tn = 0.99;
    const auto pm = PurificationModel::for_noise(dV, tn);
    const double got = holevo_purification(build_abcfg(params(V, dV, T, 0.0, eta, eps), pm));
    const double want = holevo_five_mode_oracle(V, pm.dv0, pm.tn, T, eta, eps);
    EXPECT_NEAR(got, want, 1e-7) << "V=" << V << " dV=" << dV << " eps=" << eps;
    EXPECT_GE(got, -1e-12);
  }
}

TEST(MutualInformation, Examples) {
  EXPECT_EQ(mutual_information_ab(params(1.0, 0.0, 1.0, 0.0, 0.3, 0.0)), 0.0);
  EXPECT_NEAR(mutual_information_ab(params(20.0, 0.0, 1.0, 0.0, 0.1, 0.0)),
              0.5 * std::log2(21.0 / (20.0 - 39.9 / 2.9 + 1.0)), 1e-14);
  EXPECT_NEAR(mutual_information_ab(params(20.0, 0.0, 1.0, 0.0, 0.1, 0.0)), 0.768025, 5e-6);
  EXPECT_NEAR(mutual_information_ab(params(20.0, 1.0, 1.0, 0.0, 1e-12, 0.0)), 0.0, 1e-10);
}

TEST(MutualInformation, MatchesOracle) {
  oracle::Rng rng(33);
  for (int i = 0; i < 100; ++i) {
    const double V = rng.log_uniform(1.1, 1e4), dV = rng.uniform(0.0, 5.0);
    const double T = rng.uniform(0.01, 1.0), chi = rng.uniform(0.0, 1.0);
    const double eta = rng.uniform(0.01, 0.99), eps = rng.uniform(0.0, 0.2);
    EXPECT_NEAR(mutual_information_ab(params(V, dV, T, chi, eta, eps)),
                oracle::mutual_information(V, dV, T, chi, eta, eps), 1e-12);
  }
}

TEST(CollectiveRate, SignsAtReferencePoint) {
  EXPECT_GT(collective_rate(params(20.0, 0.0, 1.0, 0.0, 0.01, 0.0)).rate, 0.0);
  EXPECT_LT(collective_rate(params(20.0, 1.2, 1.0, 0.0, 0.01, 0.0)).rate, 0.0);
  EXPECT_LT(collective_rate(params(20.0, 12.0, 1.0, 0.0, 0.01, 0.0)).rate, 0.0);
}

TEST(CollectiveRate, MethodSelection) {
  const auto noisy = params(20.0, 1.0, 1.0, 0.0, 0.01, 0.01);
  EXPECT_THROW(collective_rate(noisy, HolevoMethod::direct), DomainError);
  EXPECT_NO_THROW(collective_rate(noisy, HolevoMethod::automatic));
  EXPECT_THROW(collective_rate(params(20.0, 1.0, 1.0, 0.0, 0.01, 0.0), HolevoMethod::direct, 1.5),
               DomainError);
  const auto r = collective_rate(params(20.0, 1.0, 0.5, 0.0, 0.1, 0.0), HolevoMethod::direct, 0.9);
  EXPECT_DOUBLE_EQ(r.rate, 0.9 * r.i_ab - r.eve_info);
  EXPECT_EQ(r.attack, Attack::collective);
}

TEST(CollectiveRate, TrustedNoiseLowersRateButNotCrossing) {
  const auto rate = [](double dV, double chi) {
    return collective_rate(params(20.0, dV, 1.0, chi, 0.01, 0.0), HolevoMethod::direct).rate;
  };
  double previous = rate(0.5, 0.0);
  for (double chi : {0.25, 0.5, 1.0}) {
    const double r = rate(0.5, chi);
    EXPECT_LT(r, previous);
    previous = r;
  }
  const double ref = oracle::bisect([&](double dV) { return rate(dV, 0.0); }, 0.0, 5.0);
  for (double chi : {0.25, 0.5, 1.0}) {
    EXPECT_NEAR(oracle::bisect([&](double dV) { return rate(dV, chi); }, 0.0, 5.0), ref, 1e-4);
  }
}

TEST(CollectiveRate, SlopeAtZeroAttenuation) {
  oracle::Rng rng(34);
  for (int i = 0; i < 10; ++i) {
    const double V = rng.uniform(2.0, 100.0), dV = rng.uniform(0.0, 5.0);
    const double chi = rng.uniform(0.0, 1.0), eta = rng.uniform(0.01, 0.1);
    const double h = 1e-7, T = 2e-7;
    const auto f = [&](double t) {
      return collective_rate(params(V, dV, t, chi, eta, 0.0), HolevoMethod::direct).rate;
    };
    const double fd = (f(T + h) - f(T - h)) / (2.0 * h);
    EXPECT_NEAR(fd / analytic::didt_at_zero(V, eta, chi), 1.0, 1e-2);
  }
}

TEST(Series, Examples) {
  EXPECT_NEAR(series_rate_infV(0.05, 0.0), 0.03605, 1e-12);
  EXPECT_NEAR(series_rate_infV(0.05, 0.1), 0.010842, 5e-6);
  EXPECT_NEAR(fitted_rate_infV(0.05, 0.0), 0.0361, 1e-12);
  EXPECT_NEAR(fitted_rate_infV(0.05, 0.1),
              0.0361 - 1.237 * 0.005 + 0.731 * 0.005 * std::log(0.005), 1e-15);
  EXPECT_THROW(series_rate_infV(0.5, 2.0), DomainError);
}

TEST(Series, ExactCoefficientsRoundToPrinted) {
  const auto c = exact_series_coefficients();
  EXPECT_NEAR(c.linear, 1.0 / std::log(4.0), 1e-15);
  EXPECT_NEAR(c.linear, kSeriesCoefficients.linear, 5e-4);
  EXPECT_NEAR(c.noise, kSeriesCoefficients.noise, 5e-4);
  EXPECT_NEAR(c.noise_log, kSeriesCoefficients.noise_log, 5e-4);
}

TEST(Series, FittedStaysCloseToExpansion) {
  for (int i = 0; i <= 9; ++i) {
    for (int j = 0; j <= 9; ++j) {
      const double eta = 0.01 + 0.01 * i, eps = 0.01 + 0.01 * j;
      EXPECT_LT(std::abs(fitted_rate_infV(eta, eps) - series_rate_infV(eta, eps)), 1e-3);
    }
  }
}

TEST(Series, ExpansionTracksLargeVarianceRate) {
  // Noiseless preparation, V large: the exact channel-noise rate against the
  // three-term expansion, whose error is O(eta^2).
  for (double eta : {0.001, 0.005}) {
    for (double eps : {0.01, 0.05}) {
      const double exact =
          collective_rate(params(1e5, 0.0, 1.0, 0.0, eta, eps), HolevoMethod::purification).rate;
      EXPECT_NEAR(exact, evaluate_series(exact_series_coefficients(), eta, eps), 2.0 * eta * eta);
    }
  }
}
