#pragma once

// Slow reference implementations, written directly from the defining
// formulas with their own digit arithmetic. Used only to validate the fast
// paths and to derive test fixtures; they refuse large inputs.

#include <apd/error.hpp>
#include <apd/fourier.hpp>
#include <apd/space.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace apd::oracle {

inline constexpr Index kMaxOracleSize = 6561;  // 3^8

namespace detail {

inline std::vector<unsigned> digits(Index x, unsigned p, unsigned n) {
  std::vector<unsigned> d(n);
  for (unsigned k = 0; k < n; ++k) {
    d[k] = static_cast<unsigned>(x % p);
    x /= p;
  }
  return d;
}

inline Index undigits(const std::vector<unsigned>& d, unsigned p) {
  Index x = 0;
  for (std::size_t k = d.size(); k-- > 0;) x = x * p + d[k];
  return x;
}

/// x + c*d coordinatewise.
inline Index shift(Index x, Index d, unsigned c, unsigned p, unsigned n) {
  auto xd = digits(x, p, n);
  const auto dd = digits(d, p, n);
  for (unsigned k = 0; k < n; ++k) xd[k] = (xd[k] + c * dd[k]) % p;
  return undigits(xd, p);
}

inline void check_budget(const Space& space, Index limit = kMaxOracleSize) {
  require(space.size() <= limit, ErrorKind::BudgetExceeded,
          "oracle refuses N = " + std::to_string(space.size()) + " > " + std::to_string(limit));
}

}  // namespace detail

inline std::vector<std::vector<unsigned>> digit_table(const Space& space) {
  std::vector<std::vector<unsigned>> pts(space.size());
  for (Index x = 0; x < space.size(); ++x) pts[x] = detail::digits(x, space.p(), space.n());
  return pts;
}

inline std::vector<Complex> powers_of_omega(unsigned p) {
  std::vector<Complex> w(p);
  for (unsigned e = 0; e < p; ++e) {
    const double angle = 2.0 * std::numbers::pi * e / p;
    w[e] = Complex(std::cos(angle), std::sin(angle));
  }
  return w;
}

/// fhat(t) = (1/N) sum_x f(x) w^{t.x}, double loop.
inline Spectrum naive_dft(const GFunction& f) {
  const Space& space = f.space();
  detail::check_budget(space);
  const unsigned p = space.p(), n = space.n();
  const Index N = space.size();
  const auto pts = digit_table(space);
  const auto w = powers_of_omega(p);
  std::vector<Complex> out(N);
  for (Index t = 0; t < N; ++t) {
    Complex acc = 0.0;
    for (Index x = 0; x < N; ++x) {
      unsigned e = 0;
      for (unsigned k = 0; k < n; ++k) e += pts[t][k] * pts[x][k];
      acc += f[x] * w[e % p];
    }
    out[t] = acc / static_cast<double>(N);
  }
  return Spectrum(space, std::move(out));
}

/// A single coefficient fhat(t) straight from the definition; no size limit.
inline Complex naive_coefficient(const GFunction& f, Point t) {
  const Space& space = f.space();
  const unsigned p = space.p(), n = space.n();
  const auto td = detail::digits(t.index, p, n);
  const auto w = powers_of_omega(p);
  Complex acc = 0.0;
  for (Index x = 0; x < space.size(); ++x) {
    Index v = x;
    unsigned e = 0;
    for (unsigned k = 0; k < n; ++k) {
      e += td[k] * static_cast<unsigned>(v % p);
      v /= p;
    }
    acc += f[x] * w[e % p];
  }
  return acc / static_cast<double>(space.size());
}

/// E_x f(x) f(x+d) f(x+2d).
inline double naive_rho(const GFunction& f, Point d) {
  const Space& space = f.space();
  detail::check_budget(space, Index{1} << 22);
  const unsigned p = space.p(), n = space.n();
  double acc = 0.0;
  for (Index x = 0; x < space.size(); ++x)
    acc += f[x] * f[detail::shift(x, d.index, 1, p, n)] * f[detail::shift(x, d.index, 2, p, n)];
  return acc / static_cast<double>(space.size());
}

/// E over (x, y) of f(x) f(y) f(2y - x).
inline double naive_lambda(const GFunction& f) {
  const Space& space = f.space();
  detail::check_budget(space);
  const unsigned p = space.p(), n = space.n();
  const Index N = space.size();
  const auto pts = digit_table(space);
  std::vector<unsigned> zd(n);
  double acc = 0.0;
  for (Index x = 0; x < N; ++x) {
    for (Index y = 0; y < N; ++y) {
      for (unsigned k = 0; k < n; ++k) zd[k] = (2 * pts[y][k] + p - pts[x][k]) % p;
      acc += f[x] * f[y] * f[detail::undigits(zd, p)];
    }
  }
  return acc / (static_cast<double>(N) * static_cast<double>(N));
}

/// #{x : x, x+d, x+2d all in A}, exact.
inline std::uint64_t exact_count_3aps(const Space& space, const std::vector<Index>& set, Point d) {
  std::vector<char> in(space.size(), 0);
  for (Index a : set) {
    require(a < space.size(), ErrorKind::OutOfRange, "set element outside the space");
    in[a] = 1;
  }
  const unsigned p = space.p(), n = space.n();
  std::uint64_t count = 0;
  for (Index x = 0; x < space.size(); ++x)
    if (in[x] && in[detail::shift(x, d.index, 1, p, n)] && in[detail::shift(x, d.index, 2, p, n)]) ++count;
  return count;
}

/// Members of g + H by brute-force membership over the whole space.
inline std::vector<Index> coset_members(const Subspace& h, Point g) {
  const Space& space = h.space();
  const unsigned p = space.p(), n = space.n();
  std::vector<Index> out;
  const auto gd = detail::digits(g.index, p, n);
  for (Index x = 0; x < space.size(); ++x) {
    auto xd = detail::digits(x, p, n);
    bool member = true;
    for (const auto& row : h.rows()) {
      unsigned acc = 0;
      for (unsigned k = 0; k < n; ++k) acc = (acc + row[k] * ((xd[k] + p - gd[k]) % p)) % p;
      if (acc != 0) {
        member = false;
        break;
      }
    }
    if (member) out.push_back(x);
  }
  return out;
}

/// Nontrivial 3-AP density in g + H by enumerating ordered pairs x != y.
inline double naive_lambda_coset(const GFunction& f, const Subspace& h, Point g) {
  const std::vector<Index> members = coset_members(h, g);
  require(members.size() >= 2, ErrorKind::SubspaceTooSmall, "coset of size 1");
  const unsigned p = f.space().p(), n = f.space().n();
  double acc = 0.0;
  for (Index x : members) {
    const auto xd = detail::digits(x, p, n);
    for (Index y : members) {
      if (x == y) continue;
      auto zd = detail::digits(y, p, n);
      for (unsigned k = 0; k < n; ++k) zd[k] = (2 * zd[k] + p - xd[k]) % p;
      acc += f[x] * f[y] * f[detail::undigits(zd, p)];
    }
  }
  const double m = static_cast<double>(members.size());
  return acc / (m * (m - 1.0));
}

/// f_H by brute-force coset membership.
inline std::vector<double> naive_average(const GFunction& f, const Subspace& h) {
  std::vector<double> out(f.size());
  for (Index x = 0; x < f.size(); ++x) {
    const auto members = coset_members(h, Point{x});
    double s = 0.0;
    for (Index y : members) s += f[y];
    out[x] = s / static_cast<double>(members.size());
  }
  return out;
}

}  // namespace apd::oracle
