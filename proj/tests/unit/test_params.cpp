#include <gtest/gtest.h>

#include <cmath>

#include "bcgp/errors.hpp"
#include "bcgp/params.hpp"

using namespace bcgp;

namespace {

Hyperparameters sample_h() {
  return {Warping({Affine(1.0, 1.0), BoxCox(0.5)}), MeanFunction::constant(0.3),
          Kernel(std::vector<KernelTerm>{SquaredExponential{2.0, 3.0},
                                         SpectralMixture{{{0.5, 0.1, 0.01}, {0.25, 0.2, 0.02}}}, WhiteNoise{0.1}})};
}

}  // namespace

TEST(Params, NamesAndOrder) {
  const ParamSpace space(sample_h());
  const std::vector<std::string> expected = {
      "warping.0.a",          "warping.0.b",   "warping.1.lambda", "mean.c",       "kernel.0.variance",
      "kernel.0.lengthscale", "kernel.1.w0",   "kernel.1.mu0",     "kernel.1.v0",  "kernel.1.w1",
      "kernel.1.mu1",         "kernel.1.v1",   "kernel.2.noise"};
  EXPECT_EQ(space.names(), expected);
  EXPECT_EQ(space.params()[2].transform, Transform::Log);
  EXPECT_EQ(space.params()[0].transform, Transform::Identity);
}

TEST(Params, RoundTripIsLossless) {
  const Hyperparameters h = sample_h();
  const ParamSpace space(h);
  const Eigen::VectorXd theta = space.encode(h);
  const Hyperparameters back = space.decode(theta);
  EXPECT_EQ(space.encode(back), theta);
  EXPECT_DOUBLE_EQ(std::exp(theta[2]), 0.5);
  EXPECT_NEAR(back.kernel.noise_variance(), 0.1, 1e-15);
}

TEST(Params, FixedParametersKeepReferenceValues) {
  const Hyperparameters h = sample_h();
  const ParamSpace space(h, {"warping.0.a", "warping.0.b", "kernel.1.mu1"});
  EXPECT_EQ(space.dim(), 10u);
  Eigen::VectorXd theta = space.encode(h);
  theta.setZero();
  const Hyperparameters d = space.decode(theta);
  const auto& af = std::get<Affine>(d.warping.stages()[0]);
  EXPECT_EQ(af.shift(), 1.0);
  EXPECT_EQ(af.scale(), 1.0);
  EXPECT_DOUBLE_EQ(std::get<BoxCox>(d.warping.stages()[1]).lambda(), 1.0);
  EXPECT_THROW(ParamSpace(h, {"warping.7.a"}), ArgumentError);
}

TEST(Params, DecodeErrors) {
  const ParamSpace space(sample_h());
  EXPECT_THROW(space.decode(Eigen::VectorXd::Zero(3)), ArgumentError);
  Eigen::VectorXd theta = space.encode(sample_h());
  theta[4] = NAN;
  EXPECT_THROW(space.decode(theta), ArgumentError);
  theta = space.encode(sample_h());
  theta[1] = 0.0;  // affine scale below the guard
  EXPECT_THROW(space.decode(theta), ArgumentError);
}

TEST(Params, ObjectiveMapsErrorsToInfinity) {
  const Hyperparameters h{Warping::box_cox(0.5), MeanFunction::constant(0.0),
                          Kernel(std::vector<KernelTerm>{SquaredExponential{1.0, 1.0}, WhiteNoise{0.1}})};
  const ParamSpace space(h);
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(5, 0, 4);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(5, 2.0);
  const Objective f = nll_objective(space, t, y);
  const Eigen::VectorXd theta = space.encode(h);
  EXPECT_TRUE(std::isfinite(f(theta)));
  EXPECT_DOUBLE_EQ(f(theta), make_model(h, t, y).nll());
  Eigen::VectorXd y_bad = y;
  y_bad[0] = 0.0;  // zero Jacobian for lambda = 0.5
  EXPECT_EQ(nll_objective(space, t, y_bad)(theta), INFINITY);

  const LogProb lp = log_posterior(space, t, y, {3.0, 10.0});
  EXPECT_DOUBLE_EQ(lp(theta), -f(theta));
  Eigen::VectorXd out = theta;
  out[0] = 3.5;  // log lambda beyond the log bound
  EXPECT_EQ(lp(out), -INFINITY);
  out = theta;
  out[1] = 11.0;  // mean beyond the raw bound
  EXPECT_EQ(lp(out), -INFINITY);
}
