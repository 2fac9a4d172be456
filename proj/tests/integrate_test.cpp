#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "invaria/analysis.hpp"
#include "invaria/error.hpp"
#include "invaria/integrate.hpp"

using namespace invaria;

namespace {

IntegratorOptions opts(double h, double t_end, std::size_t decimate = 1) {
  IntegratorOptions o;
  o.h = h;
  o.t_end = t_end;
  o.decimate = decimate;
  return o;
}

double endpoint_y(double h) {
  const auto m = make_extended2(ExtendedParams::paper());
  const std::vector<double> x0{10.0, 4.0};
  return integrate(m, x0, Drive::constant({11, 0.01, 0}), opts(h, 2.0, 1000000)).states.back()[0];
}

}  // namespace

TEST(Integrate, ExponentialDecay) {
  const auto m = from_expressions(1, {"-x1"}, 0, {});
  const std::vector<double> x0{1.0};
  const Trajectory t = integrate(m, x0, Drive::constant({}), opts(0.01, 1.0));
  EXPECT_NEAR(t.states.back()[0], std::exp(-1.0), 1e-8);
  EXPECT_EQ(t.size(), 101u);
  EXPECT_DOUBLE_EQ(t.times.back(), 1.0);
}

TEST(Integrate, PaperRowCount) {
  const auto m = make_extended2(ExtendedParams::paper());
  const Vec2 e2 = analysis::equilibria(ExtendedParams::paper(), 11, 0.01).e2.point;
  const std::vector<double> x0{e2[0], e2[1]};
  const Trajectory t = integrate(m, x0, Drive::paper(1), IntegratorOptions{});
  EXPECT_EQ(t.size(), 4001u);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_NEAR(t.times[i] - t.times[i - 1], 0.1, 1e-9);
  EXPECT_EQ(t.input_names, (std::vector<std::string>{"r", "d"}));
  EXPECT_EQ(t.inputs[0], (std::vector<double>{11.0, 0.01}));
}

TEST(Integrate, ConvergesToE2) {
  const auto m = make_extended2(ExtendedParams::paper());
  const std::vector<double> x0{10.0, 4.0};
  const Trajectory t = integrate(m, x0, Drive::constant({11, 0.01, 0}), opts(0.01, 40.0));
  EXPECT_NEAR(t.states.back()[0], 11.0, 1e-3);
  EXPECT_NEAR(t.states.back()[1], 4.0121, 1e-3);
}

TEST(Integrate, FourthOrderSelfConvergence) {
  const double h = 0.02;
  const double a = endpoint_y(h), b = endpoint_y(h / 2), c = endpoint_y(h / 4);
  const double order = std::log2(std::abs(a - b) / std::abs(b - c));
  EXPECT_NEAR(order, 4.0, 0.3);
  const double ref = endpoint_y(h / 8);
  EXPECT_NEAR(std::abs(a - ref) / std::abs(b - ref), 16.0, 4.0);
}

TEST(Integrate, Deterministic) {
  const auto m = make_extended2(ExtendedParams::paper());
  const std::vector<double> x0{10.0, 4.0};
  std::ostringstream a, b;
  write_csv(a, integrate(m, x0, Drive::paper(9), opts(0.01, 400, 10), 9));
  write_csv(b, integrate(m, x0, Drive::paper(9), opts(0.01, 400, 10), 9));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Integrate, OptionValidation) {
  const auto m = make_extended2(ExtendedParams::paper());
  const std::vector<double> x0{10.0, 4.0};
  const Drive drive = Drive::constant({11, 0.01, 0});
  EXPECT_THROW(integrate(m, x0, drive, opts(0.01, 0.0)), InvalidArgument);
  EXPECT_THROW(integrate(m, x0, drive, opts(0.0, 1.0)), InvalidArgument);
  EXPECT_THROW(integrate(m, x0, drive, opts(0.3, 1.0)), InvalidArgument);
  EXPECT_THROW(integrate(m, x0, drive, opts(0.01, 1.0, 0)), InvalidArgument);
  const std::vector<double> bad{1.0};
  EXPECT_THROW(integrate(m, bad, drive, opts(0.01, 1.0)), InvalidArgument);
  EXPECT_THROW(integrate(m, x0, Drive::paper(0), opts(0.01, 500.0)), InvalidArgument);
}

TEST(Integrate, DivergenceGuard) {
  const auto m = from_expressions(1, {"x1*x1"}, 0, {});
  const std::vector<double> x0{1.0};
  try {
    integrate(m, x0, Drive::constant({}), opts(0.001, 2.0));
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.time(), 0.9);
    EXPECT_LT(e.time(), 1.01);
  }
}

TEST(Integrate, NegativeStatesFlagged) {
  const auto m = make_extended2(ExtendedParams::paper());
  const std::vector<double> x0{-1.0, 0.0};
  const Trajectory t = integrate(m, x0, Drive::constant({11, 0.01, 0}), opts(0.01, 1.0));
  ASSERT_TRUE(t.first_negative_time.has_value());
  EXPECT_EQ(*t.first_negative_time, 0.0);
  const std::vector<double> pos{10.0, 4.0};
  EXPECT_FALSE(integrate(m, pos, Drive::constant({11, 0.01, 0}), opts(0.01, 1.0))
                   .first_negative_time.has_value());
}

TEST(Integrate, PositivityOfZ) {
  const auto m = make_extended2(ExtendedParams::paper());
  for (double y0 : {0.5, 5.0, 15.0, 20.0}) {
    for (double z0 : {0.5, 3.0, 10.0}) {
      const std::vector<double> x0{y0, z0};
      const Trajectory t = integrate(m, x0, Drive::paper(3), opts(0.01, 400, 10));
      for (const State& s : t.states) ASSERT_GT(s[1], 0.0);
    }
  }
}

TEST(Integrate, CsvHeader) {
  const auto m = make_extended2(ExtendedParams::paper());
  const std::vector<double> x0{10.0, 4.0};
  std::ostringstream os;
  write_csv(os, integrate(m, x0, Drive::constant({11, 0.01, 0}), opts(0.5, 1.0)));
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "t,r,d,y,z");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
  EXPECT_EQ(s.find('\r'), std::string::npos);

  const auto o = make_original3(OriginalParams(1, 1, 1, 1));
  const std::vector<double> x3{1.0, 1.0, 1.0};
  std::ostringstream os3;
  write_csv(os3, integrate(o, x3, Drive::constant({}), opts(0.5, 1.0)));
  EXPECT_EQ(os3.str().substr(0, os3.str().find('\n')), "t,u,y,x,z");
}

TEST(Settle, FromNearbyStart) {
  const auto m = make_extended2(ExtendedParams::paper());
  const std::vector<double> x0{10.0, 4.0};
  const SettleResult r = settle(m, x0, {11, 0.01, 0}, 1e-8, 400);
  EXPECT_NEAR(r.state[0], 11.0, 1e-3);
  EXPECT_NEAR(r.state[1], 4.0121, 1e-3);
  EXPECT_LT(r.residual, 1e-8);
  EXPECT_GT(r.steps, 0u);
}

TEST(Settle, AtEquilibriumReturnsImmediately) {
  const ExtendedParams p = ExtendedParams::paper();
  const Vec2 e2 = analysis::equilibria(p, 11, 0.01).e2.point;
  const std::vector<double> x0{e2[0], e2[1]};
  const SettleResult r = settle(make_extended2(p), x0, {11, 0.01, 0}, 1e-8, 10);
  EXPECT_EQ(r.steps, 0u);
  EXPECT_EQ(r.t, 0.0);
}

TEST(Settle, NeverSettlesOnSaddle) {
  // E1's unstable direction is the y-axis (eigenvalue b); a positive offset
  // leaves it and can only end at E2.
  const ExtendedParams p = ExtendedParams::paper();
  const Vec2 e1 = analysis::equilibria(p, 11, 0.01).e1.point;
  const auto m = make_extended2(p);
  const double eps = 1e-4;
  const std::vector<double> x0{e1[0] + eps, eps};
  try {
    const SettleResult r = settle(m, x0, {11, 0.01, 0}, 1e-8, 400);
    EXPECT_NEAR(r.state[0], 11.0, 1e-3);
    EXPECT_NEAR(r.state[1], 4.0121, 1e-3);
  } catch (const NoSettleError& e) {
    EXPECT_GT(e.residual(), 1e-8);
  }
}

TEST(Settle, ReportsResidualOnFailure) {
  const auto m = make_extended2(ExtendedParams::paper());
  const std::vector<double> x0{1.0, 1.0};
  try {
    settle(m, x0, {11, 0.01, 0}, 1e-12, 0.5);
    FAIL();
  } catch (const NoSettleError& e) {
    EXPECT_GT(e.residual(), 1e-12);
  }
  EXPECT_THROW(settle(m, x0, {11, 0.01, 0}, 0.0, 1.0), InvalidArgument);
}
