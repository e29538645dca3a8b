#pragma once

// Lower-bound construction: a weighted set on F_p^{m_1 + ... + m_s} with
// density alpha whose 3-AP density along every nonzero difference stays
// below alpha^3.
//
// Level 1 lowers f at the origin and raises it elsewhere. Level i keeps
// f_{i-1} on cosets x + F_p^{m_i} for x outside a chosen set H_i, and on
// the cosets of x in H_i plants the interval I through a direction v(x):
// f_i(x, y) = f_{i-1}(x) / zeta when y.v(x) lies in I, else 0.

#include <apd/apstats.hpp>
#include <apd/error.hpp>
#include <apd/fourier.hpp>
#include <apd/parallel.hpp>
#include <apd/random.hpp>
#include <apd/space.hpp>
#include <apd/tower.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace apd {

// ---------------------------------------------------------------------------
// Interval gadget

struct IntervalGadget {
  unsigned p = 3;
  unsigned interval_size = 0;  ///< |I| = ceil(2p/3), I = {0, ..., |I|-1}
  double zeta = 0.0;           ///< |I| / p
  double phi = 0.0;            ///< 1 - zeta
  /// counts[b] = #{x : x, x+b, x+2b in I}; h[b] = counts[b] / p.
  std::vector<std::uint64_t> counts;
  std::vector<double> h;

  bool in_interval(unsigned b) const { return b < interval_size; }

  std::uint64_t total_count() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

  /// p^2 - 3 J p + 3 J^2 - ceil(J^2 / 2) with J = p - |I|, by inclusion-exclusion.
  std::uint64_t inclusion_exclusion_count() const {
    const std::uint64_t J = p - interval_size, P = p;
    return P * P - 3 * J * P + 3 * J * J - (J * J + 1) / 2;
  }

  /// (1 - phi)^3 - (phi^2/2 - phi^3).
  double density_bound() const { return zeta * zeta * zeta - (phi * phi / 2.0 - phi * phi * phi); }

  /// zeta^3 - 1/125, the per-difference ceiling demanded of the directions.
  double direction_threshold() const { return zeta * zeta * zeta - 1.0 / 125.0; }
};

inline IntervalGadget interval_gadget(unsigned p) {
  require(is_odd_prime(p), ErrorKind::InvalidArgument, "p must be an odd prime");
  IntervalGadget g;
  g.p = p;
  g.interval_size = (2 * p + 2) / 3;
  g.zeta = static_cast<double>(g.interval_size) / p;
  g.phi = 1.0 - g.zeta;
  g.counts.assign(p, 0);
  g.h.assign(p, 0.0);
  for (unsigned b = 0; b < p; ++b) {
    for (unsigned x = 0; x < p; ++x)
      if (g.in_interval(x) && g.in_interval((x + b) % p) && g.in_interval((x + 2 * b) % p)) ++g.counts[b];
    g.h[b] = static_cast<double>(g.counts[b]) / p;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Parameters and level state

/// The values and bookkeeping a level-i function is checked against.
struct LevelProfile {
  unsigned p = 3;
  double alpha = 0.5;
  double eta = 0.0;
  unsigned n1 = 1;
  /// mu_2, ..., mu_i of the levels built so far.
  std::vector<double> mus;

  unsigned level() const { return static_cast<unsigned>(mus.size()) + 1; }
  double n1_size() const { return std::pow(static_cast<double>(p), static_cast<double>(n1)); }
  double zeta() const { return static_cast<double>((2 * p + 2) / 3) / p; }
  double low_value() const { return (1.0 - eta * (n1_size() - 1.0)) * alpha; }
  double base_value() const { return (1.0 + eta) * alpha; }
  double top_value() const { return base_value() / zeta(); }
};

struct DirectionOptions {
  /// Added to zeta^3 - 1/125 in the per-difference condition.
  double slack = 0.0;
  unsigned attempts = 20000;
  unsigned draws_per_point = 256;
  /// Demand independence for every distinct triple in H, not only 3-APs.
  bool strict = false;
};

struct ConstructionParams {
  unsigned p = 3;
  double alpha = 0.5;
  double eta = 0.1;
  /// m_1, ..., m_s.
  std::vector<unsigned> dims;
  /// mu_2, ..., mu_s.
  std::vector<double> mus;
  std::uint64_t seed = 0;
  DirectionOptions directions;
  /// Pick H_i uniformly at random from G_i instead of lowest indices.
  bool random_selection = false;

  void validate() const {
    require(is_odd_prime(p), ErrorKind::InvalidArgument, "p must be an odd prime");
    require(alpha > 0.0 && alpha <= 0.5, ErrorKind::InvalidArgument, "alpha must lie in (0, 1/2]");
    require(!dims.empty() && dims[0] >= 1, ErrorKind::InvalidArgument, "need m_1 >= 1");
    require(mus.size() + 1 == dims.size(), ErrorKind::InvalidArgument,
            "need one mu per level beyond the first (" + std::to_string(dims.size() - 1) + "), got " +
                std::to_string(mus.size()));
    LevelProfile prof{p, alpha, eta, dims[0], {}};
    require(eta >= 0.0 && eta * (prof.n1_size() - 1.0) <= 1.0 + 1e-15, ErrorKind::InvalidArgument,
            "eta must lie in [0, 1/(N_1 - 1)]");
    require(prof.top_value() <= 1.0, ErrorKind::InvalidArgument,
            "(1/zeta)(1+eta)alpha = " + std::to_string(prof.top_value()) + " exceeds 1");
  }
};

struct DirectionDiagnostics {
  unsigned attempts = 0;
  unsigned independence_failures = 0;
  unsigned h_condition_failures = 0;
  /// Smallest max_d E_x h(d.v(x)) over completed attempts.
  double best_h_mean = std::numeric_limits<double>::infinity();
};

struct DirectionMap {
  unsigned m = 0;
  /// v(x) for the i-th point of H, as an index of F_p^m.
  std::vector<Index> directions;
  /// max over nonzero d of E_{x in H} h(d.v(x)), and a maximizing d.
  double worst_h_mean = 0.0;
  Index worst_d = 0;
  double threshold = 0.0;
  DirectionDiagnostics diagnostics;
};

struct LevelState {
  unsigned level = 1;
  Space space;
  GFunction f;
  LevelProfile profile;
  /// n_{i-1}; zero at level 1.
  unsigned prev_dim = 0;
  /// H_i as indices of F_p^{n_{i-1}}, increasing.
  std::vector<Index> h_points;
  DirectionMap directions;
  /// rho(0) = E f^3.
  double z = 0.0;
};

class DirectionBudgetError : public Error {
 public:
  explicit DirectionBudgetError(const DirectionDiagnostics& d)
      : Error(ErrorKind::BudgetExhausted, describe(d)), diagnostics_(d) {}
  const DirectionDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  static std::string describe(const DirectionDiagnostics& d) {
    std::ostringstream os;
    os << "no valid direction map in " << d.attempts << " attempts (" << d.independence_failures
       << " failed linear independence, " << d.h_condition_failures << " failed the per-difference h condition";
    if (std::isfinite(d.best_h_mean)) os << ", best max_d E h = " << d.best_h_mean;
    os << ")";
    return os.str();
  }
  DirectionDiagnostics diagnostics_;
};

// ---------------------------------------------------------------------------
// Level 1

inline double cube_mean(const GFunction& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v * v * v;
  return acc / static_cast<double>(f.size());
}

inline LevelState level1(const ConstructionParams& params) {
  params.validate();
  LevelState s;
  s.level = 1;
  s.profile = LevelProfile{params.p, params.alpha, params.eta, params.dims[0], {}};
  s.space = Space(params.p, params.dims[0]);
  std::vector<double> v(s.space.size(), s.profile.base_value());
  v[0] = std::max(0.0, s.profile.low_value());
  s.f = GFunction(s.space, std::move(v));
  s.z = cube_mean(s.f);
  return s;
}

// ---------------------------------------------------------------------------
// Direction sampling

namespace detail {

inline unsigned rank_mod_p(std::vector<std::vector<unsigned>> rows, unsigned p) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows[0].size();
  unsigned rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t sel = rank;
    while (sel < rows.size() && rows[sel][c] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[rank], rows[sel]);
    const unsigned inv = inverse_mod(rows[rank][c], p);
    for (auto& x : rows[rank]) x = (x * inv) % p;
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const unsigned f = rows[r][c];
      if (f == 0) continue;
      for (std::size_t k = 0; k < cols; ++k) rows[r][k] = (rows[r][k] + (p - f) * rows[rank][k]) % p;
    }
    ++rank;
  }
  return rank;
}

/// Triples of positions in H that must receive independent directions,
/// grouped by their largest position.
inline std::vector<std::vector<std::array<std::size_t, 3>>> independence_triples(const Space& prev,
                                                                                  const std::vector<Index>& h,
                                                                                  bool strict) {
  std::vector<std::vector<std::array<std::size_t, 3>>> by_last(h.size());
  if (strict) {
    for (std::size_t c = 2; c < h.size(); ++c)
      for (std::size_t b = 1; b < c; ++b)
        for (std::size_t a = 0; a < b; ++a) by_last[c].push_back({a, b, c});
    return by_last;
  }
  std::vector<std::size_t> pos(prev.size(), h.size());
  for (std::size_t i = 0; i < h.size(); ++i) pos[h[i]] = i;
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (i == j) continue;
      // (a, b, 2b - a) with a < c counts each unordered 3-AP once.
      const Index c = prev.combine(Point{h[j]}, 2, Point{h[i]}, prev.p() - 1).index;
      const std::size_t k = pos[c];
      if (k == h.size() || k <= i) continue;
      std::array<std::size_t, 3> t{i, j, k};
      std::sort(t.begin(), t.end());
      by_last[t[2]].push_back(t);
    }
  }
  return by_last;
}

}  // namespace detail

/// max over nonzero d in F_p^m of E_x h(d.v(x)).
inline std::pair<double, Index> worst_direction_mean(const std::vector<Index>& v, unsigned m,
                                                     const IntervalGadget& gadget) {
  const Space dir(gadget.p, m);
  double worst = -1.0;
  Index worst_d = 0;
  if (v.empty()) return {0.0, 0};
  for (Index d = 1; d < dir.size(); ++d) {
    double acc = 0.0;
    for (Index x : v) acc += gadget.h[dir.dot(Point{d}, Point{x})];
    acc /= static_cast<double>(v.size());
    if (acc > worst) {
      worst = acc;
      worst_d = d;
    }
  }
  return {std::max(worst, 0.0), worst_d};
}

/// Rejection sampling of nonzero directions v(x) in F_p^m for x in H.
/// Within an attempt each point draws until its direction is independent of
/// the earlier ones (pairwise, and within every required triple); a full
/// assignment is then accepted only if every nonzero d has
/// E_x h(d.v(x)) <= zeta^3 - 1/125 + slack. Attempt t draws from
/// Rng::stream(seed, t).
inline DirectionMap sample_directions(const Space& prev, const std::vector<Index>& h, unsigned m,
                                      const IntervalGadget& gadget, const DirectionOptions& opt,
                                      std::uint64_t seed) {
  require(m >= 1, ErrorKind::InvalidArgument, "direction dimension must be at least 1");
  const Space dir(gadget.p, m);
  const unsigned p = gadget.p;
  DirectionMap out;
  out.m = m;
  out.threshold = gadget.direction_threshold() + opt.slack;
  if (h.empty()) return out;

  const auto triples = detail::independence_triples(prev, h, opt.strict);
  DirectionDiagnostics diag;
  std::vector<Index> v(h.size());
  std::vector<std::vector<unsigned>> coords(h.size());

  for (unsigned attempt = 0; attempt < opt.attempts; ++attempt) {
    ++diag.attempts;
    Rng rng = Rng::stream(seed, attempt);
    bool assigned = true;
    for (std::size_t i = 0; i < h.size() && assigned; ++i) {
      bool ok = false;
      for (unsigned draw = 0; draw < opt.draws_per_point && !ok; ++draw) {
        v[i] = 1 + rng.below(dir.size() - 1);
        coords[i] = dir.coords(Point{v[i]});
        ok = true;
        for (std::size_t j = 0; j < i && ok; ++j) ok = detail::rank_mod_p({coords[j], coords[i]}, p) == 2;
        for (const auto& t : triples[i]) {
          if (!ok) break;
          ok = detail::rank_mod_p({coords[t[0]], coords[t[1]], coords[t[2]]}, p) == 3;
        }
      }
      assigned = ok;
    }
    if (!assigned) {
      ++diag.independence_failures;
      continue;
    }
    const auto [worst, worst_d] = worst_direction_mean(v, m, gadget);
    diag.best_h_mean = std::min(diag.best_h_mean, worst);
    if (worst > out.threshold + 1e-12) {
      ++diag.h_condition_failures;
      continue;
    }
    out.directions = v;
    out.worst_h_mean = worst;
    out.worst_d = worst_d;
    out.diagnostics = diag;
    return out;
  }
  throw DirectionBudgetError(diag);
}

// ---------------------------------------------------------------------------
// Level i

inline std::uint64_t level_seed(std::uint64_t seed, unsigned level) { return Rng::stream(seed, level)(); }

/// Level i from level i-1. H_i has mu * p^{n_{i-1}} points drawn from G_i,
/// the points where f_{i-1} equals (1+eta) alpha.
inline LevelState extend_level(const LevelState& prev, unsigned m, double mu, std::uint64_t seed,
                               const DirectionOptions& opt = {}, bool random_selection = false) {
  require(m >= 1, ErrorKind::InvalidArgument, "m_i must be at least 1");
  const Index prev_size = prev.space.size();
  const double want = mu * static_cast<double>(prev_size);
  const double rounded = std::round(want);
  require(mu >= 0.0 && std::abs(want - rounded) <= 1e-9 * std::max(1.0, want), ErrorKind::InvalidArgument,
          "mu * p^{n_{i-1}} = " + std::to_string(want) + " is not an integer");
  const auto k = static_cast<std::size_t>(rounded);

  const double base = prev.profile.base_value();
  std::vector<Index> g_points;
  for (Index x = 0; x < prev_size; ++x)
    if (prev.f[x] == base) g_points.push_back(x);
  require(k <= g_points.size(), ErrorKind::PreconditionFailed,
          "H_i needs " + std::to_string(k) + " points but only " + std::to_string(g_points.size()) +
              " have value (1+eta)alpha");

  const std::uint64_t lseed = level_seed(seed, prev.level + 1);
  std::vector<Index> h;
  if (random_selection) {
    Rng rng = Rng::stream(lseed, 0);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.below(g_points.size() - i);
      std::swap(g_points[i], g_points[j]);
    }
    h.assign(g_points.begin(), g_points.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(h.begin(), h.end());
  } else {
    h.assign(g_points.begin(), g_points.begin() + static_cast<std::ptrdiff_t>(k));
  }

  const IntervalGadget gadget = interval_gadget(prev.space.p());
  DirectionMap dirs = sample_directions(prev.space, h, m, gadget, opt, Rng::stream(lseed, 1)());

  LevelState s;
  s.level = prev.level + 1;
  s.profile = prev.profile;
  s.profile.mus.push_back(mu);
  s.prev_dim = prev.space.n();
  s.space = Space(prev.space.p(), prev.space.n() + m);
  s.h_points = std::move(h);
  s.directions = std::move(dirs);

  const Space dir(prev.space.p(), m);
  std::vector<std::ptrdiff_t> slot(prev_size, -1);
  for (std::size_t i = 0; i < s.h_points.size(); ++i) slot[s.h_points[i]] = static_cast<std::ptrdiff_t>(i);
  const double top = s.profile.top_value();
  std::vector<double> values(s.space.size());
  for (Index y = 0; y < dir.size(); ++y) {
    const Index offset = y * prev_size;
    for (Index x = 0; x < prev_size; ++x) {
      const std::ptrdiff_t i = slot[x];
      if (i < 0) {
        values[offset + x] = prev.f[x];
      } else {
        const unsigned b = dir.dot(Point{y}, Point{s.directions.directions[static_cast<std::size_t>(i)]});
        values[offset + x] = gadget.in_interval(b) ? top : 0.0;
      }
    }
  }
  s.f = GFunction(s.space, std::move(values));
  s.z = cube_mean(s.f);
  return s;
}

/// Level 1 followed by one extend_level per (m_i, mu_i).
inline std::vector<LevelState> build_construction(const ConstructionParams& params) {
  params.validate();
  std::vector<LevelState> levels;
  levels.push_back(level1(params));
  for (std::size_t i = 1; i < params.dims.size(); ++i)
    levels.push_back(extend_level(levels.back(), params.dims[i], params.mus[i - 1], params.seed, params.directions,
                                  params.random_selection));
  return levels;
}

// ---------------------------------------------------------------------------
// Verification

struct PropertyResult {
  int id = 0;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct FivePropertyReport {
  std::vector<PropertyResult> properties;
  double alpha_cubed = 0.0;
  double max_nonzero_rho = 0.0;
  Index argmax_d = 0;
  /// 1 - max_{d != 0} rho(d) / alpha^3.
  double eps_effective = 0.0;
  /// alpha^3 (1 - eps) - max_{d != 0} rho(d).
  double margin = 0.0;

  bool all_pass() const {
    return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& r) { return r.pass; });
  }
  const PropertyResult& property(int id) const { return properties.at(static_cast<std::size_t>(id - 1)); }
};

/// z_1 = (1 + 3 eta^2 (N_1-1) - eta^3 (N_1-1)(N_1-2)) alpha^3.
inline double level1_z(const LevelProfile& prof) {
  const double n = prof.n1_size(), e = prof.eta, a3 = prof.alpha * prof.alpha * prof.alpha;
  return (1.0 + 3.0 * e * e * (n - 1.0) - e * e * e * (n - 1.0) * (n - 2.0)) * a3;
}

/// rho(d) for d != 0 at level 1: (1 - 2 eta)(1 + eta)^2 alpha^3.
inline double level1_rho(const LevelProfile& prof) {
  const double e = prof.eta, a3 = prof.alpha * prof.alpha * prof.alpha;
  return (1.0 - 2.0 * e) * (1.0 + e) * (1.0 + e) * a3;
}

/// z_i by the recursion z_i = z_{i-1} + (1/zeta^2 - 1) mu_i (1+eta)^3 alpha^3.
inline double recursion_z(const LevelProfile& prof) {
  double z = level1_z(prof);
  const double zeta = prof.zeta(), b = prof.base_value();
  for (double mu : prof.mus) z += (1.0 / (zeta * zeta) - 1.0) * mu * b * b * b;
  return z;
}

/// Checks the five level properties of f against its profile, with
/// property 4 demanding rho(d) < (1 - eps) alpha^3 for all d != 0.
inline FivePropertyReport verify_five_properties(const GFunction& f, const LevelProfile& prof, double eps,
                                                 const APReport& scan) {
  FivePropertyReport rep;
  const double alpha = prof.alpha, a3 = alpha * alpha * alpha;
  rep.alpha_cubed = a3;

  const double density = f.density();
  rep.properties.push_back({1, std::abs(density - alpha) <= 1e-9, density, alpha, "density equals alpha"});

  const double allowed[4] = {0.0, prof.low_value(), prof.base_value(), prof.top_value()};
  double offenders = 0.0, off_base = 0.0;
  for (double v : f.values()) {
    bool ok = false;
    for (double a : allowed) ok = ok || std::abs(v - a) <= 1e-12;
    if (!ok) offenders += 1.0;
    if (std::abs(v - prof.base_value()) > 1e-12) off_base += 1.0;
  }
  rep.properties.push_back({2, offenders == 0.0, offenders, 0.0,
                            "values in {0, (1-eta(N_1-1))alpha, (1+eta)alpha, (1+eta)alpha/zeta}"});

  double frac_bound = prof.eta > 0.0 ? 1.0 / prof.n1_size() : 0.0;
  for (double mu : prof.mus) frac_bound += mu;
  const double frac = off_base / static_cast<double>(f.size());
  rep.properties.push_back({3, frac <= frac_bound + 1e-12, frac, frac_bound,
                            "fraction of points not at (1+eta)alpha <= 1/N_1 + sum mu_j"});

  const double limit = (1.0 - eps) * a3;
  if (scan.max_nonzero) {
    rep.max_nonzero_rho = scan.max_nonzero->value;
    rep.argmax_d = scan.max_nonzero->d.index;
  }
  rep.eps_effective = 1.0 - rep.max_nonzero_rho / a3;
  rep.margin = limit - rep.max_nonzero_rho;
  rep.properties.push_back({4, !scan.max_nonzero || rep.margin > 1e-12, rep.max_nonzero_rho, limit,
                            "max_{d != 0} rho(d) < (1 - eps) alpha^3"});

  const double z_expected = recursion_z(prof);
  std::string detail = "z matches the level recursion";
  bool pass5 = std::abs(scan.z - z_expected) <= 1e-9;
  if (prof.mus.empty() && prof.eta > 0.0) {
    // Level 1 also satisfies z_1 < (1 + 3 eta) alpha^3 since eta <= 1/(N_1-1).
    pass5 = pass5 && scan.z < (1.0 + 3.0 * prof.eta) * a3;
    detail += " and z_1 < (1 + 3 eta) alpha^3";
  }
  rep.properties.push_back({5, pass5, scan.z, z_expected, detail});
  return rep;
}

inline FivePropertyReport verify_five_properties(const LevelState& s, double eps) {
  return verify_five_properties(s.f, s.profile, eps, rho_scan(s.f));
}

struct StabilityReport {
  double max_deviation = 0.0;
  Index argmax_d = 0;
  Index checked = 0;  ///< differences with nonzero prefix d*
};

/// max over d with d* = d mod p^{n_{i-1}} nonzero of |rho_i(d) - rho_{i-1}(d*)|.
inline StabilityReport stability_check(const std::vector<double>& rho_cur, const std::vector<double>& rho_prev) {
  require(!rho_prev.empty() && rho_cur.size() % rho_prev.size() == 0, ErrorKind::InvalidArgument,
          "rho vectors are not from nested levels");
  StabilityReport r;
  const Index prev_size = rho_prev.size();
  for (Index d = 0; d < rho_cur.size(); ++d) {
    const Index prefix = d % prev_size;
    if (prefix == 0) continue;
    ++r.checked;
    const double dev = std::abs(rho_cur[d] - rho_prev[prefix]);
    if (dev > r.max_deviation) {
      r.max_deviation = dev;
      r.argmax_d = d;
    }
  }
  return r;
}

inline StabilityReport stability_check(const LevelState& cur, const LevelState& prev) {
  require(cur.space.p() == prev.space.p() && cur.space.n() >= prev.space.n(), ErrorKind::InvalidArgument,
          "states are not consecutive levels");
  return stability_check(rho_all(cur.f), rho_all(prev.f));
}

/// rho_i(d) for differences with zero prefix and suffix d' != 0:
/// z_{i-1} + mu_i (E_{x in H_i} h(d'.v(x)) - zeta^3) zeta^-3 (1+eta)^3 alpha^3.
inline double zero_prefix_rho(const LevelState& cur, double z_prev, Index d_suffix) {
  const IntervalGadget gadget = interval_gadget(cur.space.p());
  const Space dir(cur.space.p(), cur.directions.m);
  const double mu = cur.profile.mus.back();
  double mean_h = 0.0;
  for (Index v : cur.directions.directions) mean_h += gadget.h[dir.dot(Point{d_suffix}, Point{v})];
  if (!cur.directions.directions.empty()) mean_h /= static_cast<double>(cur.directions.directions.size());
  const double z3 = gadget.zeta * gadget.zeta * gadget.zeta;
  const double b = cur.profile.base_value();
  return z_prev + mu * (mean_h - z3) / z3 * b * b * b;
}

// ---------------------------------------------------------------------------
// Rounding a weighted set to a set

struct RoundResult {
  std::vector<Index> set;
  double density_deviation = 0.0;
  /// max over d != 0 of |rho_A(d) - rho_f(d)|.
  double max_rho_deviation = 0.0;
  Index worst_d = 0;
  unsigned attempts = 0;
  bool accepted = false;
  /// eps_star >= 2 sqrt(ln(12 N) / N).
  bool hypothesis_holds = false;
  double hypothesis_bound = 0.0;
};

class RetriesExhaustedError : public Error {
 public:
  explicit RetriesExhaustedError(RoundResult best)
      : Error(ErrorKind::RetriesExhausted,
              "no rounding within tolerance after " + std::to_string(best.attempts) +
                  " attempts; best density deviation " + std::to_string(best.density_deviation) +
                  ", best rho deviation " + std::to_string(best.max_rho_deviation)),
        best_(std::move(best)) {}
  const RoundResult& best() const { return best_; }

 private:
  RoundResult best_;
};

inline double rounding_hypothesis_bound(Index n) {
  const double N = static_cast<double>(n);
  return 2.0 * std::sqrt(std::log(12.0 * N) / N);
}

/// Includes each x independently with probability f(x); attempt t draws from
/// Rng::stream(seed, t). Accepts the first set whose density and every
/// rho(d), d != 0, are within eps_star of f's.
inline RoundResult round_to_set(const GFunction& f, double eps_star, std::uint64_t seed, unsigned retries,
                                const std::vector<double>* rho_f_cache = nullptr) {
  require(retries >= 1, ErrorKind::InvalidArgument, "need at least one attempt");
  require(!f.is_signed(), ErrorKind::InvalidArgument, "rounding needs a weighted set");
  const std::vector<double> rho_f_local = rho_f_cache ? std::vector<double>{} : rho_all(f);
  const std::vector<double>& rho_f = rho_f_cache ? *rho_f_cache : rho_f_local;
  require(rho_f.size() == f.size(), ErrorKind::InvalidArgument, "cached rho has the wrong size");
  const double alpha = f.density();

  RoundResult best;
  best.density_deviation = best.max_rho_deviation = std::numeric_limits<double>::infinity();
  const double hyp = rounding_hypothesis_bound(f.size());
  for (unsigned t = 0; t < retries; ++t) {
    Rng rng = Rng::stream(seed, t);
    std::vector<double> ind(f.size(), 0.0);
    std::vector<Index> set;
    for (Index x = 0; x < f.size(); ++x) {
      const double u = rng.uniform();
      if (u < f[x]) {
        ind[x] = 1.0;
        set.push_back(x);
      }
    }
    const GFunction a(f.space(), std::move(ind));
    const std::vector<double> rho_a = rho_all(a);
    RoundResult r;
    r.attempts = t + 1;
    r.hypothesis_bound = hyp;
    r.hypothesis_holds = eps_star >= hyp;
    r.density_deviation = std::abs(static_cast<double>(set.size()) / static_cast<double>(f.size()) - alpha);
    for (Index d = 1; d < rho_a.size(); ++d) {
      const double dev = std::abs(rho_a[d] - rho_f[d]);
      if (dev > r.max_rho_deviation) {
        r.max_rho_deviation = dev;
        r.worst_d = d;
      }
    }
    r.set = std::move(set);
    r.accepted = r.density_deviation <= eps_star && r.max_rho_deviation <= eps_star;
    if (r.accepted) return r;
    if (std::max(r.density_deviation, r.max_rho_deviation) < std::max(best.density_deviation, best.max_rho_deviation))
      best = std::move(r);
    best.attempts = t + 1;
  }
  throw RetriesExhaustedError(std::move(best));
}

// ---------------------------------------------------------------------------
// Paper-scale schedule

struct TowerPlan {
  unsigned p = 3;
  double epsilon = 0.0;
  bool in_regime = false;  ///< eps <= 2^-160 p^-8
  int s = 0;
  std::uint64_t m1 = 0;
  double sigma = 0.0;
  /// mu_1, ..., mu_s.
  std::vector<double> mu;
  /// m_1, ..., m_s and partial sums n_1, ..., n_s.
  std::vector<TowerValue> m;
  std::vector<TowerValue> n;
  /// log_90(1/(8 p eps^{1/4})) - 2, the real tower height before flooring.
  double height_real = 0.0;
  /// (1/52) log2(2/eps).
  double height_claim = 0.0;
  std::vector<PlanCheck> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const PlanCheck& c) { return c.skipped || c.pass; });
  }
  const PlanCheck* check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

/// t + c for a small real c; for towers of height >= 1 the change is below
/// the representable precision of the top.
inline TowerValue plus_small(const TowerValue& t, double c) {
  const TowerValue u = t.normalized();
  if (u.is_exact()) return TowerValue::exact(u.base(), u.top() + c);
  return u;
}

inline TowerValue sum_towers(const TowerValue& a, const TowerValue& b) {
  const TowerValue x = a.normalized(), y = b.normalized();
  if (x.is_exact() && y.is_exact()) return TowerValue::exact(x.base(), x.top() + y.top());
  return (x < y) ? y : x;
}

}  // namespace detail

/// Lower-bound schedule: s = floor(log_90(1/(8 p eps^{1/4}))),
/// m_1 = floor((1/2) log_p(3/eps)), mu_i = 90^i p eps^{1/4},
/// sigma = 10^4 ln p, m_i = mu_i p^{n_{i-1}} / sigma for i >= 2.
/// m_i and n_i are carried as towers of p's; every inequality is evaluated
/// on logarithms, where the astronomical terms cancel.
inline TowerPlan plan_lower_schedule(unsigned p, double eps) {
  require(is_odd_prime(p), ErrorKind::InvalidArgument, "p must be an odd prime");
  require(eps > 0.0 && eps < 1.0, ErrorKind::InvalidArgument, "epsilon must lie in (0, 1)");
  TowerPlan plan;
  plan.p = p;
  plan.epsilon = eps;
  const double lp = std::log(static_cast<double>(p));
  const double le = std::log(eps);
  const double ln90 = std::log(90.0);
  const double regime_log = -160.0 * std::log(2.0) - 8.0 * lp;
  plan.in_regime = le <= regime_log * (1.0 - 1e-14);
  plan.sigma = 1e4 * lp;

  const double log90_arg = (-std::log(8.0) - lp - 0.25 * le) / ln90;
  plan.s = static_cast<int>(std::floor(log90_arg + 1e-12));
  plan.height_real = log90_arg - 2.0;
  plan.height_claim = std::log2(2.0) / 52.0 - le / (52.0 * std::log(2.0));
  plan.m1 = static_cast<std::uint64_t>(std::floor(0.5 * (std::log(3.0) - le) / lp + 1e-12));

  const int levels = std::max(plan.s, 0);
  auto log_mu = [&](int i) { return i * ln90 + lp + 0.25 * le; };
  for (int i = 1; i <= levels; ++i) plan.mu.push_back(std::exp(log_mu(i)));

  if (levels >= 1) {
    plan.m.push_back(TowerValue::exact(p, static_cast<double>(plan.m1)));
    plan.n.push_back(plan.m.back());
  }
  for (int i = 2; i <= levels; ++i) {
    // log_p m_i = n_{i-1} + log_p(mu_i / sigma).
    const double c = (log_mu(i) - std::log(plan.sigma)) / lp;
    const TowerValue log_m = detail::plus_small(plan.n.back(), c);
    plan.m.push_back(log_m.exp_base());
    plan.n.push_back(detail::sum_towers(plan.n.back(), plan.m.back()));
  }

  auto add = [&](std::string name, double lhs, double rhs, bool strict, std::string note, bool regime) {
    PlanCheck ch;
    ch.name = std::move(name);
    ch.lhs = lhs;
    ch.rhs = rhs;
    const double tol = 1e-12 * std::max(1.0, std::abs(rhs));
    ch.pass = strict ? lhs > rhs : lhs >= rhs - tol;
    ch.note = std::move(note);
    ch.skipped = regime && !plan.in_regime;
    plan.checks.push_back(std::move(ch));
  };

  if (levels >= 2) {
    // m_2 > mu_2 (3/eps)^{1/2} p^-1 / sigma > eps^{-1/4} / ln p > eps^{-1/8} >= 2^20 p.
    const double log_m2 = log_mu(2) + static_cast<double>(plan.m1) * lp - std::log(plan.sigma);
    const double chain1 = log_mu(2) + 0.5 * (std::log(3.0) - le) - lp - std::log(plan.sigma);
    const double chain2 = -0.25 * le - std::log(lp);
    const double chain3 = -0.125 * le;
    const double chain4 = 20.0 * std::log(2.0) + lp;
    add("m2ineq_floor", log_m2, chain1, true, "m_2 > mu_2 (3/eps)^{1/2} p^-1 sigma^-1", false);
    add("m2ineq_eps_quarter", chain1, chain2, true, "> eps^{-1/4} / ln p", true);
    add("m2ineq_eps_eighth", chain2, chain3, true, "> eps^{-1/8}", true);
    add("m2ineq_base", chain3, chain4, false, ">= 2^20 p", true);
    add("m2_vs_3n1", log_m2, std::log(3.0 * static_cast<double>(plan.m1) + 3.0), false, "m_2 >= 3 n_1 + 3", true);
  }
  for (int i = 2; i + 1 <= levels; ++i) {
    const std::string tag = "miineq_i" + std::to_string(i);
    // m_{i+1} > eps^{1/4} p^{n_i}: log_p(mu_{i+1}/sigma) > (1/4) log_p eps.
    add(tag + "_eps_factor", log_mu(i + 1) - std::log(plan.sigma), 0.25 * le, true,
        "mu_{i+1}/sigma > eps^{1/4}", false);
    // p^{n_1} > (3/eps)^{1/2} p^-1.
    add(tag + "_n1", static_cast<double>(plan.m1) * lp, 0.5 * (std::log(3.0) - le) - lp, true,
        "p^{n_1} > (3/eps)^{1/2} p^-1", false);
    add(tag + "_sqrt3", 0.25 * le + 0.5 * (std::log(3.0) - le) - lp, -0.25 * le - lp, true,
        "eps^{1/4} (3/eps)^{1/2} p^-1 > eps^{-1/4} p^-1", false);
    add(tag + "_unit", -0.25 * le - lp, 0.0, false, "eps^{-1/4} p^-1 >= 1", true);
    // Direct: log_p m_{i+1} - m_i = n_{i-1} + log_p(mu_{i+1}/sigma) > 0.
    const double c = (log_mu(i + 1) - std::log(plan.sigma)) / lp;
    const TowerValue lhs = detail::plus_small(plan.n[static_cast<std::size_t>(i) - 2], c);
    const bool direct = lhs > TowerValue::exact(p, 0.0);
    PlanCheck ch{tag + "_direct", direct, lhs.normalized().top(), 0.0,
                 "m_{i+1} > p^{m_i}; lhs is the top of n_{i-1} + log_p(mu_{i+1}/sigma)", false};
    plan.checks.push_back(ch);
  }
  if (levels >= 1) {
    double budget = std::log(static_cast<double>(p)) + 0.5 * le;
    double total = std::exp(budget);
    for (int j = 2; j <= levels; ++j) total += plan.mu[static_cast<std::size_t>(j) - 1];
    add("space_for_h", std::log(0.25), std::log(total), true, "p eps^{1/2} + sum_{j>=2} mu_j < 1/4", true);
  }
  add("height", plan.height_real, plan.height_claim, false, "log_90(1/(8 p eps^{1/4})) - 2 >= (1/52) log2(2/eps)",
      true);
  if (levels >= 3) {
    const TowerValue claim = TowerValue::tower(p, static_cast<unsigned>(levels - 2), plan.m[1].normalized().top());
    const bool ok = !(plan.n.back() < claim);
    PlanCheck ch{"tower_statement", ok, 0.0, 0.0, "n_s >= tower of p's of height s-2 with m_2 on top", false};
    plan.checks.push_back(ch);
  }
  return plan;
}

}  // namespace apd
