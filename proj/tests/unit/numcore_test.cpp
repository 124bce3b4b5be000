#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "graphdis/autodiff.hpp"
#include "graphdis/error.hpp"
#include "graphdis/param_store.hpp"
#include "graphdis/rng.hpp"
#include "oracles.hpp"

using namespace graphdis;
namespace a = graphdis::ad;


TEST(Tensor, ShapeAndFill) {
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.dim(1), 3u);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
  EXPECT_THROW(t.item(), ShapeError);
  EXPECT_THROW(t.reshaped({4}), ShapeError);
  EXPECT_EQ(t.reshaped({3, 2}).shape(), (Shape{3, 2}));
}

TEST(Autodiff, SquareAtThree) {
  a::Tape tape;
  auto x = tape.variable(Tensor::scalar(3.0));
  tape.backward(a::square(x));
  EXPECT_DOUBLE_EQ(tape.grad(x).item(), 6.0);
}

TEST(Autodiff, SigmoidAtZero) {
  a::Tape tape;
  auto x = tape.variable(Tensor::scalar(0.0));
  tape.backward(a::sigmoid(x));
  EXPECT_DOUBLE_EQ(tape.grad(x).item(), 0.25);
}

TEST(Autodiff, ShapeMismatchNamesBothShapes) {
  a::Tape tape;
  auto x = tape.constant(Tensor({2, 3}));
  auto y = tape.constant(Tensor({4, 2}));
  try {
    a::matmul(x, y);
    FAIL();
  } catch (const ShapeError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("[2,3]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[4,2]"), std::string::npos) << msg;
  }
  EXPECT_THROW(a::add(x, y), ShapeError);
}

TEST(Autodiff, NonFiniteIntermediateThrows) {
  a::Tape tape;
  auto x = tape.constant(Tensor::scalar(0.0));
  EXPECT_THROW(a::log(x), NumericError);
  auto big = tape.constant(Tensor::scalar(1000.0));
  EXPECT_THROW(a::exp(big), NumericError);
}

TEST(Autodiff, GradientReachesSharedLeafTwice) {
  a::Tape tape;
  auto x = tape.variable(Tensor::scalar(2.0));
  tape.backward(a::mul(x, x));
  EXPECT_DOUBLE_EQ(tape.grad(x).item(), 4.0);
}

TEST(Autodiff, PrimitiveGradientsMatchFiniteDifferences) {
  for (const auto& c : gdtest::primitive_gradient_checks(1)) EXPECT_LT(c.error, 1e-4) << c.name;
}

TEST(Autodiff, FullLossGradientMatchesFiniteDifferences) {
  EXPECT_LT(gdtest::full_loss_gradient_error(3), 1e-3);
}

TEST(Autodiff, FiniteDifferenceOracleFlagsWrongGradient) {
  // Sanity check of the oracle itself: a deliberately wrong backward rule.
  auto f = [](a::Tape& tape, const std::vector<a::Var>& v) {
    Tensor out = v[0].value();
    for (double& x : out.storage()) x = x * x * x;
    const std::size_t id = v[0].id();
    return a::sum(tape.record(out, tape.requires_grad(v[0]),
                              [id](a::Tape& t, const Tensor& g) {
                                Tensor* buf = t.grad_buffer(id);
                                if (buf)
                                  for (std::size_t i = 0; i < g.size(); ++i) (*buf)[i] += g[i];
                              },
                              "bad_cube"));
  };
  EXPECT_GT(gdtest::leaf_gradient_error(f, {Tensor({3}, std::vector<double>{0.5, 1.0, 2.0})}), 0.5);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  ParamStore store;
  store.add("w", Tensor({3}, std::vector<double>{1, -2, 3}));
  const Tensor before = store.at("w").value;
  adam_step(store, AdamConfig{});
  EXPECT_EQ(store.at("w").value, before);
  EXPECT_EQ(store.step(), 1u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  ParamStore store;
  store.add("w", Tensor({4}, 0.0));
  store.at("w").grad = Tensor({4}, std::vector<double>{0.3, -7.0, 1e-3, 50.0});
  AdamConfig cfg;
  cfg.lr = 0.01;
  adam_step(store, cfg);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(store.at("w").value[i]), 0.01, 1e-4);
  EXPECT_EQ(store.at("w").grad, Tensor({4}, 0.0));
}

TEST(Adam, ConvergesOnQuadratic) {
  // Oracle: the same bias-corrected recurrence written out by hand.
  double w_ref = 0.0, m = 0.0, v = 0.0;
  ParamStore store;
  store.add("w", Tensor::scalar(0.0));
  AdamConfig cfg;
  cfg.lr = 0.1;
  for (int t = 1; t <= 200; ++t) {
    const double g = 2.0 * (w_ref - 3.0);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    w_ref -= 0.1 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);

    a::Tape tape;
    auto w = tape.parameter(store.at("w"));
    tape.backward(a::square(a::add_scalar(w, -3.0)));
    adam_step(store, cfg);
  }
  EXPECT_NEAR(store.at("w").value.item(), w_ref, 1e-12);
  EXPECT_LT(std::abs(store.at("w").value.item() - 3.0), 0.1);
}
