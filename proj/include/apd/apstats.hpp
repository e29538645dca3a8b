#pragma once

// 3-AP statistics of a weighted set f on F_p^n:
//
//   rho(d)  = E_x f(x) f(x+d) f(x+2d)          per common difference
//   Lambda  = E_{x-2y+z=0} f(x) f(y) f(z)      = mean_d rho(d)
//   lambda  = the same over distinct triples inside an affine coset

#include <apd/error.hpp>
#include <apd/fourier.hpp>
#include <apd/parallel.hpp>
#include <apd/space.hpp>

#include <cmath>
#include <optional>
#include <vector>

namespace apd {

/// Sum_t f1^(t) f2^(-2t) f3^(t), which equals Lambda(f1, f2, f3).
inline double lambda3_spectral(const Spectrum& s1, const Spectrum& s2, const Spectrum& s3) {
  const Space& space = s1.space();
  require(space == s2.space() && space == s3.space(), ErrorKind::InvalidArgument, "spectra on different spaces");
  const unsigned minus_two = space.p() - 2;
  Complex acc = 0.0;
  for (Index t = 0; t < s1.size(); ++t) acc += s1[t] * s2[space.scale(Point{t}, minus_two).index] * s3[t];
  require(std::abs(acc.imag()) < 1e-9, ErrorKind::NonRealResult,
          "spectral Lambda has imaginary part " + std::to_string(acc.imag()));
  return acc.real();
}

inline double lambda3_spectral(const GFunction& f1, const GFunction& f2, const GFunction& f3) {
  return lambda3_spectral(dft(f1), dft(f2), dft(f3));
}

/// Lambda(f) = Lambda(f, f, f).
inline double lambda_total(const GFunction& f) {
  const Spectrum s = dft(f);
  return lambda3_spectral(s, s, s);
}

struct RhoExtreme {
  Point d;
  double value = 0.0;
};

struct APReport {
  double alpha = 0.0;
  double lambda = 0.0;
  std::vector<double> rho;
  double z = 0.0;
  std::optional<RhoExtreme> min_nonzero;
  std::optional<RhoExtreme> max_nonzero;

  /// alpha^3 - eps - max_{d != 0} rho(d); positive when every nontrivial
  /// difference is below the random bound by more than eps.
  double margin(double eps = 0.0) const {
    const double top = max_nonzero ? max_nonzero->value : 0.0;
    return alpha * alpha * alpha - eps - top;
  }
};

namespace detail {

/// Digitwise sum of two mixed-radix numbers with `digits` base-p digits.
inline Index add_digits(Index a, Index b, unsigned p, unsigned digits) {
  Index out = 0, place = 1;
  for (unsigned k = 0; k < digits; ++k) {
    unsigned s = static_cast<unsigned>(a % p + b % p);
    if (s >= p) s -= p;
    out += s * place;
    place *= p;
    a /= p;
    b /= p;
  }
  return out;
}

}  // namespace detail

/// rho(d) for every d by direct summation, O(N^2) triple products.
///
/// Indices split into a low block of ceil(n/2) digits and a high block; for
/// a fixed d the shifted low digits come from a per-d lookup row and the
/// shifted high block is computed once per high value, so the inner loop is
/// three loads and two multiplies with no division. Each rho(d) is summed
/// in increasing x order by a single worker, so the output does not depend
/// on the worker count.
inline std::vector<double> rho_all(const GFunction& f, unsigned threads = worker_count()) {
  const Space& space = f.space();
  const unsigned p = space.p(), n = space.n();
  const unsigned low_digits = (n + 1) / 2;
  const Index P = space.place(low_digits);
  const Index Q = space.size() / P;
  const double* v = f.values().data();
  const double inv_n = 1.0 / static_cast<double>(space.size());
  std::vector<double> rho(space.size());

  parallel_for(
      0, space.size(),
      [&](Index d) {
        thread_local std::vector<Index> row1, row2, hi1, hi2;
        row1.resize(P);
        row2.resize(P);
        hi1.resize(Q);
        hi2.resize(Q);
        const Index d2 = space.scale(Point{d}, 2).index;
        const Index dl = d % P, dh = d / P, d2l = d2 % P, d2h = d2 / P;
        for (Index xl = 0; xl < P; ++xl) {
          row1[xl] = detail::add_digits(xl, dl, p, low_digits);
          row2[xl] = detail::add_digits(xl, d2l, p, low_digits);
        }
        for (Index xh = 0; xh < Q; ++xh) {
          hi1[xh] = detail::add_digits(xh, dh, p, n - low_digits) * P;
          hi2[xh] = detail::add_digits(xh, d2h, p, n - low_digits) * P;
        }
        double acc = 0.0;
        for (Index xh = 0; xh < Q; ++xh) {
          const double* base = v + xh * P;
          const double* b1 = v + hi1[xh];
          const double* b2 = v + hi2[xh];
          const Index* r1 = row1.data();
          const Index* r2 = row2.data();
          for (Index xl = 0; xl < P; ++xl) acc += base[xl] * b1[r1[xl]] * b2[r2[xl]];
        }
        rho[d] = acc * inv_n;
      },
      threads);
  return rho;
}

/// Default ceiling on N^2 triple evaluations for rho_scan (p=3, n=11).
inline constexpr double kRhoScanBudget = 3.2e10;

inline APReport rho_scan(const GFunction& f, double budget = kRhoScanBudget, unsigned threads = worker_count()) {
  const double n = static_cast<double>(f.size());
  require(n * n <= budget, ErrorKind::BudgetExceeded,
          "rho scan needs " + std::to_string(n * n) + " triple evaluations, budget " + std::to_string(budget));
  APReport r;
  r.alpha = f.density();
  r.rho = rho_all(f, threads);
  double sum = 0.0;
  for (double x : r.rho) sum += x;
  r.lambda = sum / n;
  r.z = r.rho[0];
  for (Index d = 1; d < r.rho.size(); ++d) {
    const double x = r.rho[d];
    if (!r.min_nonzero || x < r.min_nonzero->value) r.min_nonzero = RhoExtreme{Point{d}, x};
    if (!r.max_nonzero || x > r.max_nonzero->value) r.max_nonzero = RhoExtreme{Point{d}, x};
  }
  return r;
}

/// Nontrivial 3-AP density of f inside the coset g + H, from the spectral
/// Lambda of the restriction:
///   lambda = (Lambda |H|^2 - |H| E[f^3]) / (|H| (|H| - 1)).
inline double lambda_nontrivial(const GFunction& f, const Subspace& h, Point g) {
  require(h.size() >= 2, ErrorKind::SubspaceTooSmall, "lambda is undefined on a coset of size 1");
  const GFunction r = restrict_to_coset(f, h, g);
  const double size = static_cast<double>(h.size());
  const double big_lambda = lambda_total(r);
  double cube = 0.0;
  for (double x : r.values()) cube += x * x * x;
  cube /= size;
  return (big_lambda * size * size - size * cube) / (size * (size - 1.0));
}

/// E_j lambda(H_j) over all cosets of H.
inline double mean_lambda_over_cosets(const GFunction& f, const CosetPartition& part) {
  double sum = 0.0;
  for (Point g : part.representatives()) sum += lambda_nontrivial(f, part.subspace(), g);
  return sum / static_cast<double>(part.count());
}

inline double mean_lambda_over_cosets(const GFunction& f, const Subspace& h) {
  require(h.size() >= 2, ErrorKind::SubspaceTooSmall, "lambda is undefined on a coset of size 1");
  return mean_lambda_over_cosets(f, cosets(h));
}

}  // namespace apd
