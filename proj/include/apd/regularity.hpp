#pragma once

#include <apd/apstats.hpp>
#include <apd/error.hpp>
#include <apd/fourier.hpp>
#include <apd/space.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace apd {

/// floor(delta^-2), robust to the rounding in delta*delta (0.1 -> 100).
inline unsigned inverse_square_floor(double delta) {
  return static_cast<unsigned>(std::floor(1.0 / (delta * delta) * (1.0 + 1e-12)));
}

struct RegularityCertificate {
  double delta = 0.0;
  Subspace subspace;
  /// Nonzero t with |fhat(t)| >= delta, increasing index order.
  std::vector<Point> large_spectrum;
  double achieved_gap = 0.0;
  Point gap_argmax;
  unsigned codim_requested = 0;
  unsigned codim_actual = 0;
};

/// Slack on the certified gap; exceeding it means a bug, not a bad input.
inline constexpr double kCertificateSlack = 1e-9;
/// Coefficients within this of delta count as ties and join the large spectrum.
inline constexpr double kSpectrumTieTolerance = 1e-12;

/// Subspace H annihilating every large Fourier coefficient of f, so that
/// f and f_H are delta-close. With pad set, H is shrunk to codimension
/// min(floor(delta^-2), n). The gap is recomputed before returning.
inline RegularityCertificate weak_regular_subspace(const GFunction& f, double delta, bool pad) {
  require(delta > 0.0 && delta <= 1.0, ErrorKind::InvalidArgument,
          "delta must lie in (0, 1], got " + std::to_string(delta));
  const Space& space = f.space();
  const Spectrum s = dft(f);

  RegularityCertificate cert;
  cert.delta = delta;
  cert.codim_requested = inverse_square_floor(delta);
  for (Index t = 1; t < s.size(); ++t)
    if (std::abs(s[t]) >= delta - kSpectrumTieTolerance) cert.large_spectrum.push_back(Point{t});

  Subspace h = subspace_from_constraints(space, cert.large_spectrum);
  if (pad) {
    const unsigned target = std::max(h.codim(), std::min(cert.codim_requested, space.n()));
    h = pad_subspace(h, target);
  }
  cert.codim_actual = h.codim();

  const FourierGap gap = sup_fourier_gap(f, average_over(f, h));
  cert.achieved_gap = gap.value;
  cert.gap_argmax = gap.argmax;
  require(cert.achieved_gap <= delta + kCertificateSlack, ErrorKind::CertificationFailed,
          "weak-regularity gap " + std::to_string(cert.achieved_gap) + " exceeds delta " + std::to_string(delta));
  cert.subspace = std::move(h);
  return cert;
}

struct CountingCheck {
  double gap = 0.0;    ///< |Lambda(f) - Lambda(g)|
  double bound = 0.0;  ///< 3 * sup |(f-g)^| * density(f)
  bool holds() const { return gap <= bound + 1e-9; }
};

inline CountingCheck verify_counting(const GFunction& f, const GFunction& g) {
  require(f.space() == g.space(), ErrorKind::InvalidArgument, "functions on different spaces");
  CountingCheck c;
  c.gap = std::abs(lambda_total(f) - lambda_total(g));
  c.bound = 3.0 * sup_fourier_gap(f, g).value * f.density();
  return c;
}

}  // namespace apd
