#include <gtest/gtest.h>

#include <cmath>

#include "gm_bridge/errors.hpp"
#include "gm_bridge/pricing_kernel.hpp"
#include "oracles.hpp"

using namespace gm_bridge;

namespace {

const PricingKernel& example_kernel(double delta) {
  static const PricingKernel k05(quantize(example_distribution(), 0.5));
  static const PricingKernel k02(quantize(example_distribution(), 0.2));
  return delta == 0.5 ? k05 : k02;
}

}  // namespace

TEST(TimeGrid, Shape) {
  const auto g = make_time_grid(2048);
  ASSERT_EQ(g.size(), 2048u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
  EXPECT_NEAR(1.0 - g[g.size() - 2], 1e-12, 1e-15);
  EXPECT_THROW(make_time_grid(4), Error);
}

TEST(Kernel, TerminalIndicator) {
  const PricingKernel& k = example_kernel(0.2);
  const Quantization& q = k.quantization();
  for (Lattice y = -20; y <= 20; ++y)
    for (int n = 1; n <= 3; ++n) EXPECT_EQ(k.h(n, y, 1.0), q.contains(n, y) ? 1.0 : 0.0);
  EXPECT_EQ(k.price(q.edges[1], 1.0), 2.0);
  EXPECT_EQ(k.price(q.edges[2] - 1, 1.0), 2.0);
  EXPECT_EQ(k.price(q.edges[1] - 1, 1.0), 1.0);
}

TEST(Kernel, PartitionOfUnity) {
  const PricingKernel& k = example_kernel(0.2);
  for (double t : {0.0, 0.5, 0.31415, 0.999, 1.0 - 1e-9})
    for (Lattice y : {-30, -3, 0, 4, 9, 40}) {
      const auto s = k.at(t);
      EXPECT_NEAR(s.h(1, y) + s.h(2, y) + s.h(3, y), 1.0, 1e-10) << t << " " << y;
    }
}

TEST(Kernel, SymmetricAboutMidLevel) {
  const PricingKernel& k = example_kernel(0.2);
  const Quantization& q = k.quantization();
  const Lattice two_m = q.lower_edge(2) + q.upper_edge(2) - 1;
  for (double t : {0.0, 0.5, 0.9, 0.77777})
    for (Lattice y = -10; y <= 15; ++y) {
      const double a = k.h(2, y, t), b = k.h(2, two_m - y, t);
      EXPECT_NEAR(a, b, 1e-14 + 1e-12 * a) << t << " " << y;
    }
}

TEST(Kernel, OffGridMatchesDirectTable) {
  const PricingKernel& k = example_kernel(0.5);
  const Quantization& q = k.quantization();
  for (double t : {0.1234567, 0.6180339, 0.9993, 1.0 - 3.3e-7}) {
    const SkellamTable direct(q.beta * (1.0 - t));
    const auto s = k.at(t);
    for (Lattice y = -25; y <= 25; ++y) {
      for (int n = 1; n <= 3; ++n) {
        const double ref = direct.interval(q.lower_edge(n) - y, q.upper_edge(n) - 1 - y);
        EXPECT_NEAR(s.h(n, y), ref, 1e-13 + 1e-10 * ref) << t << " " << y << " " << n;
      }
      double price_ref = 0.0;
      for (int n = 1; n <= 3; ++n)
        price_ref += q.value(n) * direct.interval(q.lower_edge(n) - y, q.upper_edge(n) - 1 - y);
      EXPECT_NEAR(s.price(y), price_ref, 1e-12);
    }
  }
}

TEST(Kernel, NeighboursAgreeWithSingleEvaluations) {
  const PricingKernel& k = example_kernel(0.2);
  for (double t : {0.25, 0.40001, 0.99999}) {
    const auto s = k.at(t);
    for (Lattice y : {-4, 2, 11}) {
      const auto hn = s.h_neighbours(2, y);
      EXPECT_NEAR(hn[0], s.h(2, y - 1), 1e-15);
      EXPECT_NEAR(hn[1], s.h(2, y), 1e-15);
      EXPECT_NEAR(hn[2], s.h(2, y + 1), 1e-15);
    }
  }
}

TEST(Kernel, PriceAtOriginIsQuantizedMean) {
  for (double delta : {0.4, 0.2, 0.1, 0.05}) {
    const Quantization q = quantize(example_distribution(), delta);
    const PricingKernel k(q, 256);
    double mean = 0.0;
    for (int n = 1; n <= 3; ++n) mean += q.value(n) * q.bin_probs[n - 1];
    EXPECT_NEAR(k.price(0, 0.0), mean, 1e-10) << delta;
    EXPECT_GT(k.price(0, 0.0), 1.0);
    EXPECT_LT(k.price(0, 0.0), 3.0);
  }
}

TEST(Kernel, SingleValueIsConstant) {
  const PricingKernel k(quantize({{4.5}, {1.0}}, 0.3), 64);
  for (double t : {0.0, 0.5, 1.0})
    for (Lattice y : {-50, 0, 50}) {
      EXPECT_EQ(k.price(y, t), 4.5);
      EXPECT_EQ(k.h(1, y, t), 1.0);
      EXPECT_EQ(k.price_step(y, t), 0.0);
    }
}

// Residual of d/dt f + beta (f(y+1) - 2 f(y) + f(y-1)), relative to the size
// of the lattice terms.
template <class F>
double heat_residual(F&& f, Lattice y, double t, double beta) {
  const double tau = 1e-6;
  const double dt = (f(y, t + tau) - f(y, t - tau)) / (2 * tau);
  const double a = f(y + 1, t), b = f(y, t), c = f(y - 1, t);
  const double scale = beta * (std::abs(a) + 2 * std::abs(b) + std::abs(c));
  return std::abs(dt + beta * (a - 2 * b + c)) / scale;
}

TEST(Kernel, HeatEquation) {
  const PricingKernel& k = example_kernel(0.5);
  const double beta = k.beta();
  double worst_h = 0.0, worst_p = 0.0;
  for (double t : {0.05, 0.3, 0.61, 0.9, 0.99})
    for (Lattice y = -12; y <= 16; ++y) {
      for (int n = 1; n <= 3; ++n)
        worst_h = std::max(worst_h, heat_residual([&](Lattice z, double s) { return k.h(n, z, s); },
                                                  y, t, beta));
      worst_p = std::max(
          worst_p, heat_residual([&](Lattice z, double s) { return k.price(z, s); }, y, t, beta));
    }
  EXPECT_LT(worst_h, 1e-6);
  EXPECT_LT(worst_p, 1e-6);
}

TEST(Kernel, InteriorBinUnimodal) {
  const PricingKernel& k = example_kernel(0.5);
  const Quantization& q = k.quantization();
  const Lattice lo = q.lower_edge(2) - 10, hi = q.upper_edge(2) + 10;
  for (double t : {0.0, 0.5, 0.9}) {
    const auto s = k.at(t);
    for (Lattice y = lo; y < q.floor_mid(2); ++y) EXPECT_LT(s.h(2, y), s.h(2, y + 1)) << t << y;
    for (Lattice y = q.ceil_mid(2); y < hi; ++y) EXPECT_GT(s.h(2, y), s.h(2, y + 1)) << t << y;
  }
}

TEST(Kernel, PriceMonotoneAndBounded) {
  const PricingKernel& k = example_kernel(0.2);
  for (double t : {0.0, 0.5, 0.95, 0.123}) {
    const auto s = k.at(t);
    for (Lattice y = -40; y <= 40; ++y) {
      const double p = s.price(y), p1 = s.price(y + 1);
      EXPECT_GE(p, 1.0);
      EXPECT_LE(p, 3.0);
      EXPECT_GT(s.price_step(y), 0.0);
      EXPECT_NEAR(p1 - p, s.price_step(y), 1e-13);
    }
  }
  // 30 standard deviations of Z_1 away from the origin.
  const Lattice far = static_cast<Lattice>(30.0 * std::sqrt(2.0 * k.beta()));
  EXPECT_NEAR(k.price(-far, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(k.price(far, 0.0), 3.0, 1e-12);
}

TEST(Kernel, DiscreteDerivativeApproachesGaussian) {
  const AssetDistribution dist = example_distribution();
  const GaussianKernel g(dist);
  const double target = g.price_dy(0.0, 0.5);
  double coarse = 0.0, fine = 0.0;
  for (double delta : {0.4, 0.05}) {
    const PricingKernel k(quantize(dist, delta), 512);
    const double err = std::abs(k.price_step(0, 0.5) / delta - target);
    (delta == 0.4 ? coarse : fine) = err;
  }
  EXPECT_LT(fine, coarse);
  EXPECT_LT(fine, 0.05);
}

TEST(Kernel, PriceIntegralMatchesSimpson) {
  const PricingKernel& k = example_kernel(0.5);
  for (Lattice y : {-3, 0, 2, 7}) {
    for (auto [a, b] : {std::pair{0.0, 1.0}, {0.3, 0.95}, {0.9, 1.0}, {0.123, 0.456}}) {
      const double ref = oracle::simpson([&](double t) { return k.price(y, t); }, a, b, 400);
      EXPECT_NEAR(k.price_integral(y, a, b), ref, 1e-9) << y << " " << a << " " << b;
    }
  }
}

TEST(Kernel, RejectsBadArguments) {
  const PricingKernel& k = example_kernel(0.2);
  EXPECT_THROW(k.at(-0.1), Error);
  EXPECT_THROW(k.at(1.5), Error);
  EXPECT_THROW(k.h(0, 0, 0.5), Error);
  EXPECT_THROW(k.h(4, 0, 0.5), Error);
}

TEST(GaussianKernelTest, PriceAtOrigin) {
  const GaussianKernel g(example_distribution());
  EXPECT_NEAR(g.price(0.0, 0.0), 1.55, 1e-12);
  double total = 0.0;
  for (int n = 1; n <= 3; ++n) total += g.h(n, 0.4, 0.3);
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_EQ(g.price(0.5, 1.0), 2.0);
  EXPECT_EQ(g.h(3, 2.0, 1.0), 1.0);
}

TEST(GaussianKernelTest, DerivativeByFiniteDifference) {
  const GaussianKernel g(example_distribution());
  const double h = 1e-4;
  for (auto [y, t] : {std::pair{0.3, 0.5}, {-1.0, 0.0}, {1.5, 0.9}}) {
    const double fd = (g.price(y + h, t) - g.price(y - h, t)) / (2 * h);
    EXPECT_NEAR(fd, g.price_dy(y, t), 1e-7) << y << " " << t;
  }
  EXPECT_THROW(g.price_dy(0.0, 1.0), Error);
}

TEST(GaussianKernelTest, SingleValueDerivativeIsZero) {
  const GaussianKernel g({{2.0}, {1.0}});
  EXPECT_EQ(g.price_dy(0.3, 0.2), 0.0);
  EXPECT_EQ(g.price(-7.0, 0.5), 2.0);
}
