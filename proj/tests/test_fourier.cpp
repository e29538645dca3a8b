#include <apd/fourier.hpp>
#include <apd/oracle.hpp>

#include <gtest/gtest.h>

#include "support.hpp"

#include <cmath>
#include <vector>

using namespace apd;
using apd::testing::first_coordinate_zero;
using apd::testing::random_function;

TEST(Dft, ConstantIsPointMassAtZero) {
  const Space s(5, 2);
  const Spectrum sp = dft(GFunction::constant(s, 0.3));
  EXPECT_NEAR(sp[0].real(), 0.3, 1e-15);
  for (Index t = 1; t < s.size(); ++t) EXPECT_LT(std::abs(sp[t]), 1e-15);
}

TEST(Dft, PointMassIsFlat) {
  const Space s(3, 1);
  const std::vector<Point> origin{Point{0}};
  const Spectrum sp = dft(GFunction::indicator(s, origin));
  for (Index t = 0; t < 3; ++t) {
    EXPECT_NEAR(sp[t].real(), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(sp[t].imag(), 0.0, 1e-15);
  }
}

TEST(Dft, HyperplaneIndicatorSupportedOnDualLine) {
  const Space s(3, 2);
  const Spectrum sp = dft(first_coordinate_zero(s));
  const Spectrum ref = oracle::naive_dft(first_coordinate_zero(s));
  for (Index t = 0; t < s.size(); ++t) {
    const bool dual = s.coord(Point{t}, 1) == 0;
    EXPECT_NEAR(std::abs(sp[t]), dual ? 1.0 / 3.0 : 0.0, 1e-15);
    EXPECT_NEAR(std::abs(sp[t] - ref[t]), 0.0, 1e-15);
  }
}

TEST(Dft, UsesPositiveExponent) {
  // f = indicator{1} on F_5: fhat(t) = w^t / 5 with w = e^{2 pi i / 5}.
  const Space s(5, 1);
  const std::vector<Point> one{Point{1}};
  const Spectrum sp = dft(GFunction::indicator(s, one));
  for (Index t = 0; t < 5; ++t) {
    const double angle = 2.0 * 3.14159265358979323846 * static_cast<double>(t) / 5.0;
    EXPECT_NEAR(sp[t].real(), std::cos(angle) / 5.0, 1e-15);
    EXPECT_NEAR(sp[t].imag(), std::sin(angle) / 5.0, 1e-15);
  }
}

TEST(Dft, MatchesOracleConjugateSymmetricAndParseval) {
  for (unsigned p : {3u, 5u, 7u})
    for (unsigned n = 1; n <= 4; ++n) {
      const Space s(p, n);
      if (s.size() > oracle::kMaxOracleSize) continue;
      const GFunction f = random_function(s, 1000 * p + n);
      const Spectrum fast = dft(f), slow = oracle::naive_dft(f);
      double energy = 0.0, square = 0.0;
      for (Index t = 0; t < s.size(); ++t) {
        EXPECT_LT(std::abs(fast[t] - slow[t]), 1e-10);
        EXPECT_LT(std::abs(fast[s.neg(Point{t}).index] - std::conj(fast[t])), 1e-12);
        energy += std::norm(fast[t]);
      }
      for (double v : f.values()) square += v * v;
      EXPECT_NEAR(energy, square / static_cast<double>(s.size()), 1e-9);
    }
}

TEST(Dft, IndependentOfWorkerCount) {
  const Space s(3, 10);
  const GFunction f = random_function(s, 5);
  set_worker_count(1);
  const Spectrum a = dft(f);
  set_worker_count(4);
  const Spectrum b = dft(f);
  set_worker_count(0);
  for (Index t = 0; t < s.size(); ++t) ASSERT_EQ(a[t], b[t]);
}

TEST(Idft, RoundTrip) {
  for (unsigned n = 1; n <= 6; ++n) {
    const Space s(3, n);
    const GFunction f = random_function(s, 77 + n);
    const GFunction g = idft(dft(f));
    for (Index x = 0; x < s.size(); ++x) EXPECT_NEAR(f[x], g[x], 1e-10);
  }
}

TEST(Idft, ZeroAndConstantSpectra) {
  const Space s(5, 2);
  std::vector<Complex> zero(s.size());
  const GFunction z = idft(Spectrum(s, zero));
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
  std::vector<Complex> c(s.size());
  c[0] = 0.4;
  const GFunction k = idft(Spectrum(s, c));
  for (double v : k.values()) EXPECT_NEAR(v, 0.4, 1e-15);
}

TEST(Idft, RejectsNonRealSpectrum) {
  const Space s(3, 1);
  std::vector<Complex> c(3);
  c[1] = Complex(0.0, 0.5);
  try {
    idft(Spectrum(s, c));
    FAIL() << "expected NonRealResult";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonRealResult);
  }
}

TEST(AverageOver, WholeSpaceAndZeroSubspace) {
  const Space s(3, 3);
  const GFunction f = random_function(s, 9);
  const GFunction flat = average_over(f, Subspace::whole(s));
  for (double v : flat.values()) EXPECT_NEAR(v, f.density(), 1e-14);
  const Subspace zero = pad_subspace(Subspace::whole(s), 3);
  const GFunction same = average_over(f, zero);
  for (Index x = 0; x < s.size(); ++x) EXPECT_EQ(same[x], f[x]);
}

TEST(AverageOver, PointMassOverHyperplane) {
  const Space s(3, 2);
  const std::vector<Point> origin{Point{0}}, ts{s.point_of({1, 0})};
  const GFunction fh = average_over(GFunction::indicator(s, origin), subspace_from_constraints(s, ts));
  for (Index x = 0; x < s.size(); ++x) EXPECT_NEAR(fh[x], s.coord(Point{x}, 0) == 0 ? 1.0 / 3.0 : 0.0, 1e-15);
}

TEST(AverageOver, MatchesOracleAndPreservesDensity) {
  const Space s(3, 4);
  const GFunction f = random_function(s, 21);
  const std::vector<Point> ts{s.point_of({1, 2, 0, 0}), s.point_of({0, 0, 1, 1})};
  const Subspace h = subspace_from_constraints(s, ts);
  const GFunction fh = average_over(f, h);
  const std::vector<double> ref = oracle::naive_average(f, h);
  for (Index x = 0; x < s.size(); ++x) EXPECT_NEAR(fh[x], ref[x], 1e-14);
  EXPECT_NEAR(fh.density(), f.density(), 1e-14);
}

TEST(AverageOver, SpectrumIsMaskedToAnnihilator) {
  const Space s(3, 4);
  const GFunction f = random_function(s, 33);
  const std::vector<Point> ts{s.point_of({1, 0, 2, 0}), s.point_of({0, 1, 1, 1})};
  const Subspace h = subspace_from_constraints(s, ts);
  const Spectrum a = dft(f), b = dft(average_over(f, h));
  const std::vector<Point> hp = h.points();
  for (Index t = 0; t < s.size(); ++t) {
    bool dual = true;
    for (Point x : hp) dual = dual && s.dot(Point{t}, x) == 0;
    EXPECT_LT(std::abs(b[t] - (dual ? a[t] : Complex(0.0))), 1e-12);
  }
}

TEST(SupFourierGap, EqualAndConstantFunctions) {
  const Space s(3, 2);
  const GFunction f = random_function(s, 3);
  const FourierGap same = sup_fourier_gap(f, f);
  EXPECT_EQ(same.value, 0.0);
  EXPECT_EQ(same.argmax.index, 0u);
  const FourierGap c = sup_fourier_gap(GFunction::constant(s, 0.7), GFunction::constant(s, 0.2));
  EXPECT_NEAR(c.value, 0.5, 1e-15);
  EXPECT_EQ(c.argmax.index, 0u);
  const GFunction g = first_coordinate_zero(s);
  const std::vector<Point> ts{s.point_of({1, 0})};
  EXPECT_LT(sup_fourier_gap(g, average_over(g, subspace_from_constraints(s, ts))).value, 1e-15);
}

TEST(GFunction, ValidatesValues) {
  const Space s(3, 1);
  EXPECT_THROW(GFunction(s, {0.1, 1.5, 0.0}), Error);
  EXPECT_THROW(GFunction(s, {0.1, 0.2}), Error);
  EXPECT_THROW(GFunction(s, {0.1, NAN, 0.0}), Error);
  EXPECT_NO_THROW(GFunction(s, {0.1, -1.5, 0.0}, true));
}
