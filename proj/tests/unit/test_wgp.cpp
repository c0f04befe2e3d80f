#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "bcgp/errors.hpp"
#include "bcgp/gp.hpp"
#include "bcgp/rng.hpp"
#include "bcgp/wgp.hpp"

using namespace bcgp;

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

Kernel se(double var, double ell, double noise) {
  return Kernel(std::vector<KernelTerm>{SquaredExponential{var, ell}, WhiteNoise{noise}});
}

struct Data {
  Eigen::VectorXd t;
  Eigen::VectorXd y;
};

Data positive_data(int n, std::uint64_t seed) {
  Rng rng(seed);
  Data d{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    d.t[i] = i * 0.37 + 0.1 * rng.uniform();
    d.y[i] = std::exp(std::sin(d.t[i]) + 0.2 * rng.normal());
  }
  return d;
}

// Model with no data: its predictive marginal is the prior, N(c, var + noise).
WarpedGpModel prior_model(const Warping& w, double c, double var, double noise) {
  return WarpedGpModel(w, MeanFunction::constant(c), se(var, 1.0, noise), Eigen::VectorXd(0),
                       Eigen::VectorXd(0));
}

}  // namespace

TEST(WarpedNll, IdentityEqualsGaussian) {
  const Data d = positive_data(15, 1);
  const Kernel k = se(1.2, 0.8, 0.05);
  const WarpedGpModel m(Warping::identity(), MeanFunction::constant(0.4), k, d.t, d.y);
  EXPECT_EQ(m.nll(), nll_gaussian(MeanFunction::constant(0.4), k, d.t, d.y));
}

TEST(WarpedNll, BoxCoxOneIsShiftedGaussian) {
  const Data d = positive_data(15, 2);
  const Kernel k = se(1.2, 0.8, 0.05);
  const WarpedGpModel m(Warping::box_cox(1.0), MeanFunction::constant(0.4), k, d.t, d.y);
  const Eigen::VectorXd shifted = d.y.array() - 1.0;
  EXPECT_NEAR(m.nll(), nll_gaussian(MeanFunction::constant(0.4), k, d.t, shifted), 1e-12);
}

TEST(WarpedNll, AffineChainRule) {
  const Data d = positive_data(12, 3);
  const Kernel k = se(2.0, 0.5, 0.1);
  const double b = -2.5;
  const WarpedGpModel m(Warping::affine(0.0, b), MeanFunction::zero(), k, d.t, d.y);
  const Eigen::VectorXd scaled = b * d.y;
  EXPECT_NEAR(m.nll(), nll_gaussian(MeanFunction::zero(), k, d.t, scaled) - 12 * std::log(std::abs(b)), 1e-10);
}

TEST(WarpedNll, DomainErrorOnBadData) {
  Data d = positive_data(5, 4);
  d.y[2] = -1.0;
  EXPECT_THROW(WarpedGpModel(Warping::box_cox(0.0), MeanFunction::zero(), se(1, 1, 0.1), d.t, d.y), DomainError);
}

TEST(Predict, IdentityWarpingIsGaussian) {
  const Data d = positive_data(10, 5);
  const Kernel k = se(1.0, 0.7, 0.02);
  const WarpedGpModel m(Warping::identity(), MeanFunction::constant(1.0), k, d.t, d.y);
  const Eigen::VectorXd ts = Eigen::VectorXd::LinSpaced(7, -1.0, 5.0);
  const PredictiveSummary p = m.predict(ts);
  const PosteriorMarginals g = ConditionedGp(MeanFunction::constant(1.0), k, d.t, d.y).marginals(ts);
  for (Eigen::Index i = 0; i < ts.size(); ++i) {
    const double sd = std::sqrt(g.variance[i] + 0.02);
    EXPECT_NEAR(p.median[i], g.mean[i], 1e-12);
    EXPECT_NEAR(p.lower[i], g.mean[i] - 1.959963984540054 * sd, 1e-12);
    EXPECT_NEAR(p.upper[i], g.mean[i] + 1.959963984540054 * sd, 1e-12);
    EXPECT_NEAR(p.gh_mean[i], p.median[i], 1e-8);
    EXPECT_NEAR(p.gh_var[i], sd * sd, 1e-10);
    ASSERT_TRUE(p.mode[static_cast<std::size_t>(i)].has_value());
    EXPECT_NEAR(*p.mode[static_cast<std::size_t>(i)], g.mean[i], 1e-12);
  }
  const PredictiveSummary latent = m.predict(ts, {0.95, 20, false});
  for (Eigen::Index i = 0; i < ts.size(); ++i) {
    EXPECT_NEAR(latent.upper[i] - latent.median[i], 1.959963984540054 * std::sqrt(g.variance[i]), 1e-12);
  }
}

TEST(Predict, LogNormalGhMean) {
  for (const auto& [mean, var] : {std::pair{0.3, 0.5}, std::pair{-1.0, 1.5}, std::pair{2.0, 0.1}}) {
    const WarpedGpModel m = prior_model(Warping::box_cox(0.0), mean, var, 0.0);
    const PredictiveSummary p = m.predict(Eigen::VectorXd::Zero(1));
    EXPECT_NEAR(p.gh_mean[0] / std::exp(mean + var / 2.0), 1.0, 1e-6);
    EXPECT_NEAR(p.median[0], std::exp(mean), 1e-12 * std::exp(mean));
    // Var of a log-normal: (exp(k) - 1) exp(2m + k)
    const double lvar = (std::exp(var) - 1.0) * std::exp(2 * mean + var);
    EXPECT_NEAR(p.gh_var[0] / lvar, 1.0, 1e-4);
    ASSERT_TRUE(p.mode[0]);
    EXPECT_NEAR(*p.mode[0], std::exp(mean - var), 1e-12);
  }
}

TEST(Predict, BoxCoxOneMode) {
  const WarpedGpModel m = prior_model(Warping::box_cox(1.0), 0.7, 0.4, 0.1);
  const PredictiveSummary p = m.predict(Eigen::VectorXd::Zero(1));
  ASSERT_TRUE(p.mode[0]);
  EXPECT_NEAR(*p.mode[0], 1.7, 1e-12);
}

// The closed-form mode is the argmax of the warped density.
TEST(Predict, ModeMaximisesDensity) {
  for (double lam : {0.2, 0.5, 1.5, 3.0}) {
    for (const auto& [mean, var] : {std::pair{0.5, 0.2}, std::pair{1.5, 1.0}, std::pair{0.1, 0.05}}) {
      const Warping w = compose({Warping::affine(0.5, 2.0), Warping::box_cox(lam), Warping::affine(-0.3, 1.7)});
      const auto mode = warped_mode(w, mean, var);
      if (!mode) continue;
      auto logp = [&](double y) {
        try {
          const auto [x, lad] = w.forward_with_log_deriv(y);
          return normal_log_pdf(x, mean, var) + lad;
        } catch (const Error&) {
          return -std::numeric_limits<double>::infinity();
        }
      };
      // Dense scan around the claimed mode, then local comparison.
      const double h = 1e-4 * std::max(1.0, std::abs(*mode));
      EXPECT_GE(logp(*mode), logp(*mode + h)) << lam;
      EXPECT_GE(logp(*mode), logp(*mode - h)) << lam;
      double best = -INFINITY;
      double arg = 0.0;
      for (int i = 1; i < 200000; ++i) {
        const double y = -0.25 + i * 1e-4;  // domain of the first stage is y > -0.25
        const double v = logp(y);
        if (v > best) {
          best = v;
          arg = y;
        }
      }
      EXPECT_NEAR(*mode, arg, 2e-4) << "lambda " << lam << " m " << mean << " k " << var;
    }
  }
}

TEST(Predict, ModeAbsentForTwoBoxCoxStages) {
  const Warping w = compose({Warping::box_cox(0.5), Warping::affine(1, 2), Warping::box_cox(2.0)});
  EXPECT_FALSE(warped_mode(w, 0.5, 0.1).has_value());
}

TEST(Predict, DecreasingWarpingKeepsOrder) {
  const Data d = positive_data(8, 6);
  const Warping w = compose({Warping::box_cox(0.0), Warping::affine(0.0, -1.0)});
  const WarpedGpModel m(w, MeanFunction::zero(), se(1.0, 1.0, 0.05), d.t, d.y);
  const PredictiveSummary p = m.predict(Eigen::VectorXd::LinSpaced(10, 0.0, 4.0));
  for (Eigen::Index i = 0; i < 10; ++i) {
    EXPECT_LE(p.lower[i], p.median[i]);
    EXPECT_LE(p.median[i], p.upper[i]);
  }
}

TEST(Predict, GhExactForAffine) {
  const Warping w = Warping::affine(1.5, -0.4);
  for (int k = 1; k <= 12; ++k) {
    const double mean = 0.37;
    const double v = gh_expectation(w, mean, 0.9, [](double y) { return y; }, gauss_hermite(k));
    EXPECT_NEAR(v, w.inverse(mean), 1e-12) << k;
  }
}

TEST(Predict, GhSecondMomentTwoPoints) {
  // y = (x - a) / b with x ~ N(m, s^2): E[y^2] = ((m - a)^2 + s^2) / b^2.
  const double a = 0.3;
  const double b = 1.7;
  const double m = -0.8;
  const double s = 1.3;
  const double v = gh_expectation(Warping::affine(a, b), m, s, [](double y) { return y * y; }, gauss_hermite(2));
  EXPECT_NEAR(v, ((m - a) * (m - a) + s * s) / (b * b), 1e-10);
}

TEST(Predict, NodeOutsideDomainIsRangeError) {
  // The single node sits at lambda x + 1 = 0.
  try {
    gh_expectation(Warping::box_cox(0.5), -2.0, 1.0, [](double y) { return y; }, gauss_hermite(1));
    FAIL();
  } catch (const RangeError& e) {
    EXPECT_NE(std::string(e.what()).find("node 0"), std::string::npos);
  }
}

TEST(LogDensity, StandardNormalAtMean) {
  const WarpedGpModel m = prior_model(Warping::identity(), 0.0, 0.75, 0.25);
  EXPECT_NEAR(m.predictive_log_density(3.0, 0.0), -kHalfLog2Pi, 1e-15);
}

TEST(LogDensity, BoxCoxOneMatchesShiftedIdentity) {
  const Data d = positive_data(10, 7);
  const Kernel k = se(1.0, 0.6, 0.05);
  const WarpedGpModel bc(Warping::box_cox(1.0), MeanFunction::constant(0.2), k, d.t, d.y);
  const Eigen::VectorXd shifted = d.y.array() - 1.0;
  const WarpedGpModel id(Warping::identity(), MeanFunction::constant(0.2), k, d.t, shifted);
  for (double y : {0.3, 1.0, 2.5}) {
    EXPECT_NEAR(bc.predictive_log_density(1.1, y), id.predictive_log_density(1.1, y - 1.0), 1e-12);
  }
}

TEST(LogDensity, LogWarpingNormalised) {
  const Data d = positive_data(10, 8);
  const WarpedGpModel m(Warping::box_cox(0.0), MeanFunction::constant(0.3), se(0.8, 0.9, 0.03), d.t, d.y);
  boost::math::quadrature::sinh_sinh<double> integrator;
  for (double t : {0.5, 2.0, 7.0}) {
    // y = exp(u)
    auto f = [&](double u) {
      const double y = std::exp(u);
      if (!(y > 0.0) || !std::isfinite(y)) return 0.0;
      return std::exp(m.predictive_log_density(t, y)) * y;
    };
    EXPECT_NEAR(integrator.integrate(f), 1.0, 1e-6) << t;
  }
}

TEST(LogDensity, LengthMismatch) {
  const WarpedGpModel m = prior_model(Warping::identity(), 0.0, 1.0, 0.1);
  EXPECT_THROW(m.predictive_log_density(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)), ArgumentError);
}

TEST(SamplePaths, IdentityMatchesGaussianDraws) {
  const Data d = positive_data(10, 9);
  const Kernel k = se(1.0, 0.6, 0.05);
  const WarpedGpModel m(Warping::identity(), MeanFunction::zero(), k, d.t, d.y);
  const Eigen::VectorXd ts = Eigen::VectorXd::LinSpaced(5, 0.0, 3.0);
  GaussianPosterior post = posterior(MeanFunction::zero(), k, d.t, d.y, ts);
  const Eigen::MatrixXd latent = sample_gaussian(post.mean, post.covariance, 20, 77);
  EXPECT_EQ(m.sample_paths(ts, 20, 77, false), latent);
  post.covariance.diagonal().array() += 0.05;
  EXPECT_EQ(m.sample_paths(ts, 20, 77, true), sample_gaussian(post.mean, post.covariance, 20, 77));
}

TEST(SamplePaths, LogWarpingPositiveAndMedian) {
  const Data d = positive_data(12, 10);
  const WarpedGpModel m(Warping::box_cox(0.0), MeanFunction::constant(0.1), se(0.9, 0.8, 0.04), d.t, d.y);
  const Eigen::VectorXd ts = Eigen::VectorXd::LinSpaced(8, 0.0, 6.0);
  EXPECT_GT(m.sample_paths(ts, 200, 3).minCoeff(), 0.0);

  const Eigen::VectorXd one = Eigen::VectorXd::Constant(1, 2.2);
  Eigen::VectorXd draws = m.sample_paths(one, 20000, 11).col(0);
  std::sort(draws.begin(), draws.end());
  const double med = 0.5 * (draws[9999] + draws[10000]);
  EXPECT_NEAR(med / m.predict(one).median[0], 1.0, 0.02);
}

TEST(SamplePaths, DeterministicPerSeed) {
  const Data d = positive_data(6, 12);
  const WarpedGpModel m(Warping::box_cox(0.3), MeanFunction::zero(), se(0.5, 1.0, 0.01), d.t, d.y);
  const Eigen::VectorXd ts = Eigen::VectorXd::LinSpaced(4, 0.0, 2.0);
  EXPECT_EQ(m.sample_paths(ts, 5, 1), m.sample_paths(ts, 5, 1));
}

// Gaussian kernel density estimate of 1e5 sampled values at the median
// against the closed-form predictive density.
TEST(LogDensity, MonteCarloAgreement) {
  const Data d = positive_data(10, 13);
  const WarpedGpModel m(Warping::box_cox(0.0), MeanFunction::constant(0.2), se(0.6, 0.9, 0.05), d.t, d.y);
  const double t = 1.7;
  const Eigen::VectorXd one = Eigen::VectorXd::Constant(1, t);
  const double median = m.predict(one).median[0];
  const Eigen::VectorXd s = m.sample_paths(one, 100000, 5).col(0);
  const double mean = s.mean();
  const double sd = std::sqrt((s.array() - mean).square().sum() / (s.size() - 1));
  const double h = 0.5 * 1.06 * sd * std::pow(static_cast<double>(s.size()), -0.2);
  double kde = 0.0;
  for (double v : s) kde += std::exp(-0.5 * std::pow((median - v) / h, 2));
  kde /= s.size() * h * std::sqrt(2 * std::numbers::pi);
  EXPECT_NEAR(kde / std::exp(m.predictive_log_density(t, median)), 1.0, 0.05);
}

TEST(InvertNumeric, AgreesWithBoxCoxInverse) {
  const Warping w = Warping::box_cox(0.5);
  Rng rng(14);
  for (int i = 0; i < 100; ++i) {
    const double x = -1.9 + 10.0 * rng.uniform();  // codomain of the signed form near y > 0
    EXPECT_NEAR(invert_numeric(w, x), w.inverse(x), 1e-9 * std::max(1.0, std::abs(w.inverse(x))));
  }
}

TEST(InvertNumeric, AffineOneNewtonStep) {
  // Iteration 0 takes the Newton step, iteration 1 sees a zero residual.
  const Warping w = Warping::affine(2.0, 3.0);
  EXPECT_NEAR(invert_numeric(w, 11.0, 1e-10, 2), 3.0, 1e-12);
}

TEST(InvertNumeric, ComposedAndDecreasing) {
  const Warping w = compose({Warping::box_cox(0.5), Warping::affine(1.0, -2.0), Warping::box_cox(2.0)});
  for (double y : {0.3, 1.0, 4.0}) EXPECT_NEAR(invert_numeric(w, w.forward(y)), y, 1e-9);
  const Warping logw = compose({Warping::affine(0.2, 1.0), Warping::box_cox(0.0)});
  for (double y : {0.01, 1.0, 50.0}) EXPECT_NEAR(invert_numeric(logw, logw.forward(y)), y, 1e-9 * y + 1e-12);
}

TEST(InvertNumeric, NonConvergenceCarriesResidual) {
  try {
    invert_numeric(Warping::box_cox(0.5), 3.7, 1e-14, 1);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_GT(e.residual(), 1e-14);
  }
}

// Median is unchanged when an increasing affine map is appended in latent
// space and the base GP is transformed to match.
TEST(Predict, MedianInvariantUnderLatentAffine) {
  const Data d = positive_data(10, 15);
  const double A = 0.7;
  const double B = 2.5;
  const Warping w = Warping::box_cox(0.4);
  const WarpedGpModel m1(w, MeanFunction::constant(0.3), se(0.8, 0.9, 0.05), d.t, d.y);
  const WarpedGpModel m2(compose({w, Warping::affine(A, B)}), MeanFunction::constant(A + B * 0.3),
                         se(B * B * 0.8, 0.9, B * B * 0.05), d.t, d.y);
  const Eigen::VectorXd ts = Eigen::VectorXd::LinSpaced(9, -1.0, 5.0);
  const PredictiveSummary p1 = m1.predict(ts);
  const PredictiveSummary p2 = m2.predict(ts);
  for (Eigen::Index i = 0; i < ts.size(); ++i) {
    EXPECT_NEAR(p1.median[i], p2.median[i], 1e-8);
    EXPECT_NEAR(p1.lower[i], p2.lower[i], 1e-8);
    EXPECT_NEAR(p1.upper[i], p2.upper[i], 1e-8);
  }
}
