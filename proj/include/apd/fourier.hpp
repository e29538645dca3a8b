#pragma once

// Functions on F_p^n and their Fourier transform
//
//   fhat(t) = (1/N) sum_x f(x) w^{t.x},   w = exp(2 pi i / p),
//
// with no conjugation. The inverse is f(x) = sum_t fhat(t) w^{-t.x}.

#include <apd/error.hpp>
#include <apd/parallel.hpp>
#include <apd/space.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace apd {

using Complex = std::complex<double>;

/// Dense real function on a space. Weighted sets take values in [0,1];
/// differences of weighted sets are marked signed and skip that check.
class GFunction {
 public:
  GFunction() = default;

  GFunction(Space space, std::vector<double> values, bool is_signed = false)
      : space_(std::move(space)), values_(std::move(values)), signed_(is_signed) {
    require(values_.size() == space_.size(), ErrorKind::InvalidArgument,
            "function has " + std::to_string(values_.size()) + " values, space has " +
                std::to_string(space_.size()) + " points");
    for (double v : values_) {
      require(std::isfinite(v), ErrorKind::InvalidArgument, "function value is not finite");
      if (!signed_)
        require(v >= 0.0 && v <= 1.0, ErrorKind::OutOfRange,
                "weighted-set value " + std::to_string(v) + " outside [0,1]");
    }
  }

  static GFunction constant(const Space& space, double value) {
    return GFunction(space, std::vector<double>(space.size(), value));
  }

  static GFunction indicator(const Space& space, std::span<const Point> points) {
    std::vector<double> v(space.size(), 0.0);
    for (Point x : points) v.at(x.index) = 1.0;
    return GFunction(space, std::move(v));
  }

  const Space& space() const { return space_; }
  std::span<const double> values() const { return values_; }
  Index size() const { return values_.size(); }
  double operator[](Index i) const { return values_[i]; }
  double at(Point x) const { return values_.at(x.index); }
  bool is_signed() const { return signed_; }

  double density() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
  }

  friend GFunction operator-(const GFunction& f, const GFunction& g) {
    require(f.space_ == g.space_, ErrorKind::InvalidArgument, "functions on different spaces");
    std::vector<double> d(f.size());
    for (Index i = 0; i < d.size(); ++i) d[i] = f.values_[i] - g.values_[i];
    return GFunction(f.space_, std::move(d), true);
  }

 private:
  Space space_;
  std::vector<double> values_;
  bool signed_ = false;
};

class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(Space space, std::vector<Complex> coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
    require(coeffs_.size() == space_.size(), ErrorKind::InvalidArgument, "spectrum size mismatch");
  }

  const Space& space() const { return space_; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  Index size() const { return coeffs_.size(); }
  const Complex& operator[](Index t) const { return coeffs_[t]; }
  const Complex& at(Point t) const { return coeffs_.at(t.index); }

 private:
  Space space_;
  std::vector<Complex> coeffs_;
};

namespace detail {

inline std::vector<Complex> roots_of_unity(unsigned p, int sign) {
  std::vector<Complex> w(p);
  for (unsigned j = 0; j < p; ++j) {
    const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(p);
    w[j] = Complex(std::cos(angle), std::sin(angle));
  }
  return w;
}

/// In-place transform along each coordinate: a[t] <- sum_x a[x] w^{sign t.x}.
inline void tensor_transform(const Space& space, std::vector<Complex>& a, int sign) {
  const unsigned p = space.p();
  const std::vector<Complex> w = roots_of_unity(p, sign);
  const Index N = space.size();
  for (unsigned k = 0; k < space.n(); ++k) {
    const Index stride = space.place(k);
    const Index block = stride * p;
    const Index lines = N / p;
    auto line = [&](Index l) {
      const Index base = (l / stride) * block + (l % stride);
      Complex in[64];
      std::vector<Complex> heap;
      Complex* buf = in;
      if (p > 64) {
        heap.resize(p);
        buf = heap.data();
      }
      for (unsigned j = 0; j < p; ++j) buf[j] = a[base + j * stride];
      for (unsigned t = 0; t < p; ++t) {
        Complex acc = 0.0;
        unsigned e = 0;
        for (unsigned j = 0; j < p; ++j) {
          acc += buf[j] * w[e];
          e += t;
          if (e >= p) e -= p;
        }
        a[base + t * stride] = acc;
      }
    };
    // Each line touches a disjoint set of entries.
    if (N >= (Index{1} << 14))
      parallel_for(0, lines, line);
    else
      for (Index l = 0; l < lines; ++l) line(l);
  }
}

}  // namespace detail

inline Spectrum dft(const GFunction& f) {
  std::vector<Complex> a(f.values().begin(), f.values().end());
  detail::tensor_transform(f.space(), a, +1);
  const double scale = 1.0 / static_cast<double>(f.size());
  for (Complex& c : a) c *= scale;
  return Spectrum(f.space(), std::move(a));
}

/// Imaginary residue tolerated when converting back to a real function.
inline constexpr double kRealTolerance = 1e-10;

inline GFunction idft(const Spectrum& s, double tolerance = kRealTolerance) {
  std::vector<Complex> a(s.coeffs().begin(), s.coeffs().end());
  detail::tensor_transform(s.space(), a, -1);
  std::vector<double> v(a.size());
  bool weighted = true;
  for (Index i = 0; i < a.size(); ++i) {
    require(std::abs(a[i].imag()) <= tolerance, ErrorKind::NonRealResult,
            "imaginary residue " + std::to_string(a[i].imag()) + " at index " + std::to_string(i));
    v[i] = a[i].real();
    if (v[i] < 0.0 || v[i] > 1.0) weighted = false;
  }
  return GFunction(s.space(), std::move(v), !weighted);
}

/// f_H(x) = mean of f over the coset x + H.
inline GFunction average_over(const GFunction& f, const CosetPartition& part) {
  require(f.space() == part.subspace().space(), ErrorKind::InvalidArgument, "subspace of a different space");
  const std::vector<Index> label = part.labels();
  std::vector<double> sums(part.count(), 0.0);
  for (Index x = 0; x < f.size(); ++x) sums[label[x]] += f[x];
  const double inv = 1.0 / static_cast<double>(part.subspace().size());
  for (double& s : sums) s *= inv;
  std::vector<double> out(f.size());
  for (Index x = 0; x < f.size(); ++x) out[x] = sums[label[x]];
  if (!f.is_signed())
    for (double& v : out) v = std::clamp(v, 0.0, 1.0);
  return GFunction(f.space(), std::move(out), f.is_signed());
}

inline GFunction average_over(const GFunction& f, const Subspace& h) { return average_over(f, cosets(h)); }

struct FourierGap {
  double value = 0.0;
  Point argmax;
};

/// sup_t |(f - g)^(t)| with the smallest maximizing index.
inline FourierGap sup_fourier_gap(const GFunction& f, const GFunction& g) {
  const Spectrum s = dft(f - g);
  FourierGap best;
  for (Index t = 0; t < s.size(); ++t) {
    const double m = std::abs(s[t]);
    if (m > best.value) best = {m, Point{t}};
  }
  return best;
}

/// The function u -> f(g + embed(u)) on F_p^{dim H}.
inline GFunction restrict_to_coset(const GFunction& f, const Subspace& h, Point g) {
  const Space sub(f.space().p(), h.dim());
  std::vector<double> v(sub.size());
  for (Index u = 0; u < v.size(); ++u) v[u] = f.at(f.space().add(g, h.embed(u)));
  return GFunction(sub, std::move(v), f.is_signed());
}

}  // namespace apd
