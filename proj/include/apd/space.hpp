#pragma once

// The ambient group F_p^n: mixed-radix point indexing, coordinatewise
// arithmetic, subspaces given by dual constraints, and coset enumeration.
//
// Index order is little-endian: index = sum_k x_k p^k, so the first m
// coordinates of a point are simply index mod p^m.

#include <apd/error.hpp>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace apd {

using Index = std::size_t;

inline bool is_odd_prime(unsigned p) {
  if (p < 3 || p % 2 == 0) return false;
  for (unsigned q = 3; q * q <= p; q += 2)
    if (p % q == 0) return false;
  return true;
}

/// Inverse of a nonzero residue mod a prime p (extended Euclid).
inline unsigned inverse_mod(unsigned a, unsigned p) {
  long long t = 0, new_t = 1;
  long long r = p, new_r = a % p;
  require(new_r != 0, ErrorKind::InvalidArgument, "inverse of zero");
  while (new_r != 0) {
    long long q = r / new_r;
    long long tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (t < 0) t += p;
  return static_cast<unsigned>(t);
}

struct Point {
  Index index = 0;
  friend auto operator<=>(const Point&, const Point&) = default;
};

class Space {
 public:
  /// Largest cardinality an instantiated space may have; dense arrays of
  /// this many doubles are the working set of every module.
  static constexpr Index kMaxSize = Index{1} << 31;

  Space() : Space(3, 0) {}

  Space(unsigned p, unsigned n) : p_(p), n_(n) {
    require(is_odd_prime(p), ErrorKind::InvalidArgument, "p must be an odd prime, got " + std::to_string(p));
    require(p < (1u << 16), ErrorKind::InvalidArgument, "p too large");
    place_.assign(n + 1, 1);
    for (unsigned k = 0; k < n; ++k) {
      require(place_[k] <= kMaxSize / p, ErrorKind::OutOfRange,
              "p^n exceeds the dense-space limit (p=" + std::to_string(p) + ", n=" + std::to_string(n) + ")");
      place_[k + 1] = place_[k] * p;
    }
  }

  unsigned p() const { return p_; }
  unsigned n() const { return n_; }
  Index size() const { return place_[n_]; }
  /// p^k for 0 <= k <= n.
  Index place(unsigned k) const { return place_[k]; }

  friend bool operator==(const Space& a, const Space& b) { return a.p_ == b.p_ && a.n_ == b.n_; }

  Point point_of(std::span<const unsigned> coords) const {
    require(coords.size() == n_, ErrorKind::InvalidArgument,
            "expected " + std::to_string(n_) + " coordinates, got " + std::to_string(coords.size()));
    Index idx = 0;
    for (unsigned k = 0; k < n_; ++k) {
      require(coords[k] < p_, ErrorKind::OutOfRange, "coordinate out of range");
      idx += coords[k] * place_[k];
    }
    return Point{idx};
  }

  Point point_of(std::initializer_list<unsigned> coords) const {
    return point_of(std::span<const unsigned>(coords.begin(), coords.size()));
  }

  Point point(Index index) const {
    require(index < size(), ErrorKind::OutOfRange, "point index out of range");
    return Point{index};
  }

  std::vector<unsigned> coords(Point x) const {
    std::vector<unsigned> c(n_);
    Index v = x.index;
    for (unsigned k = 0; k < n_; ++k) {
      c[k] = static_cast<unsigned>(v % p_);
      v /= p_;
    }
    return c;
  }

  unsigned coord(Point x, unsigned k) const { return static_cast<unsigned>((x.index / place_[k]) % p_); }

  Point add(Point x, Point y) const { return combine(x, 1, y, 1); }
  Point sub(Point x, Point y) const { return combine(x, 1, y, p_ - 1); }
  Point neg(Point x) const { return combine(x, p_ - 1, Point{0}, 0); }
  Point scale(Point x, unsigned c) const { return combine(x, c % p_, Point{0}, 0); }

  /// a*x + b*y coordinatewise.
  Point combine(Point x, unsigned a, Point y, unsigned b) const {
    Index xi = x.index, yi = y.index, out = 0;
    for (unsigned k = 0; k < n_; ++k) {
      const unsigned xd = static_cast<unsigned>(xi % p_), yd = static_cast<unsigned>(yi % p_);
      xi /= p_;
      yi /= p_;
      out += ((a * xd + b * yd) % p_) * place_[k];
    }
    return Point{out};
  }

  unsigned dot(Point t, Point x) const {
    Index ti = t.index, xi = x.index;
    unsigned acc = 0;
    for (unsigned k = 0; k < n_; ++k) {
      acc = (acc + static_cast<unsigned>(ti % p_) * static_cast<unsigned>(xi % p_)) % p_;
      ti /= p_;
      xi /= p_;
    }
    return acc;
  }

 private:
  unsigned p_;
  unsigned n_;
  std::vector<Index> place_;
};

/// A linear subspace H = {x : t.x = 0 for every constraint t}. Constraints
/// are kept in reduced row-echelon form, so equal subspaces compare equal.
class Subspace {
 public:
  using Row = std::vector<unsigned>;

  Subspace() = default;

  static Subspace whole(const Space& space) { return Subspace(space, {}); }

  static Subspace from_constraints(const Space& space, std::span<const Point> ts) {
    std::vector<Row> rows;
    rows.reserve(ts.size());
    for (const Point& t : ts) {
      require(t.index < space.size(), ErrorKind::OutOfRange, "constraint outside the space");
      rows.push_back(space.coords(t));
    }
    return Subspace(space, std::move(rows));
  }

  static Subspace from_rows(const Space& space, std::vector<Row> rows) {
    for (const Row& r : rows) {
      require(r.size() == space.n(), ErrorKind::InvalidArgument, "constraint row has wrong length");
      for (unsigned c : r) require(c < space.p(), ErrorKind::OutOfRange, "constraint entry out of range");
    }
    return Subspace(space, std::move(rows));
  }

  const Space& space() const { return space_; }
  unsigned codim() const { return static_cast<unsigned>(rows_.size()); }
  unsigned dim() const { return space_.n() - codim(); }
  Index size() const { return space_.place(dim()); }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<unsigned>& pivot_columns() const { return pivots_; }
  const std::vector<unsigned>& free_columns() const { return free_; }

  std::vector<Point> constraints() const {
    std::vector<Point> out;
    out.reserve(rows_.size());
    for (const Row& r : rows_) out.push_back(space_.point_of(r));
    return out;
  }

  bool contains(Point x) const { return syndrome(x) == 0; }

  /// Label of the coset x + H, as the mixed-radix value of (row_r . x)_r.
  Index syndrome(Point x) const {
    const unsigned p = space_.p();
    thread_local std::vector<unsigned> digits;
    digits.resize(space_.n());
    Index v = x.index;
    for (unsigned k = 0; k < space_.n(); ++k) {
      digits[k] = static_cast<unsigned>(v % p);
      v /= p;
    }
    Index label = 0, place = 1;
    for (const Row& r : rows_) {
      unsigned acc = 0;
      for (unsigned k = 0; k < space_.n(); ++k) acc += r[k] * digits[k];
      label += (acc % p) * place;
      place *= p;
    }
    return label;
  }

  /// Point of H whose free coordinates are the digits of u, u in [0, |H|).
  Point embed(Index u) const {
    const unsigned p = space_.p();
    std::vector<unsigned> x(space_.n(), 0);
    for (unsigned j = 0; j < free_.size(); ++j) {
      x[free_[j]] = static_cast<unsigned>(u % p);
      u /= p;
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      unsigned acc = 0;
      for (unsigned f : free_) acc = (acc + rows_[r][f] * x[f]) % p;
      x[pivots_[r]] = (p - acc) % p;
    }
    return space_.point_of(x);
  }

  /// Inverse of embed for points of H.
  Index coordinates(Point x) const {
    Index u = 0;
    for (std::size_t j = free_.size(); j-- > 0;) u = u * space_.p() + space_.coord(x, free_[j]);
    return u;
  }

  /// All points of H, ordered by their coordinates (embed order).
  std::vector<Point> points() const {
    std::vector<Point> out(size());
    for (Index u = 0; u < out.size(); ++u) out[u] = embed(u);
    return out;
  }

  Subspace intersect(const Subspace& other) const {
    require(space_ == other.space_, ErrorKind::InvalidArgument, "intersecting subspaces of different spaces");
    std::vector<Row> rows = rows_;
    rows.insert(rows.end(), other.rows_.begin(), other.rows_.end());
    return Subspace(space_, std::move(rows));
  }

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.space_ == b.space_ && a.rows_ == b.rows_;
  }

 private:
  Subspace(const Space& space, std::vector<Row> rows) : space_(space) { echelonize(std::move(rows)); }

  void echelonize(std::vector<Row> rows) {
    const unsigned p = space_.p(), n = space_.n();
    std::size_t rank = 0;
    pivots_.clear();
    for (unsigned col = 0; col < n && rank < rows.size(); ++col) {
      std::size_t sel = rank;
      while (sel < rows.size() && rows[sel][col] == 0) ++sel;
      if (sel == rows.size()) continue;
      std::swap(rows[rank], rows[sel]);
      const unsigned inv = inverse_mod(rows[rank][col], p);
      for (unsigned& c : rows[rank]) c = (c * inv) % p;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r == rank || rows[r][col] == 0) continue;
        const unsigned factor = rows[r][col];
        for (unsigned k = 0; k < n; ++k) rows[r][k] = (rows[r][k] + (p - factor) * rows[rank][k]) % p;
      }
      pivots_.push_back(col);
      ++rank;
    }
    rows.resize(rank);
    rows_ = std::move(rows);
    free_.clear();
    for (unsigned col = 0, r = 0; col < n; ++col) {
      if (r < pivots_.size() && pivots_[r] == col)
        ++r;
      else
        free_.push_back(col);
    }
  }

  Space space_;
  std::vector<Row> rows_;
  std::vector<unsigned> pivots_;
  std::vector<unsigned> free_;
};

inline Subspace subspace_from_constraints(const Space& space, std::span<const Point> ts) {
  return Subspace::from_constraints(space, ts);
}

/// Adds unit constraints e_0, e_1, ... (skipping those already implied)
/// until H has the requested codimension. The result is contained in H.
inline Subspace pad_subspace(const Subspace& h, unsigned target_codim) {
  const Space& space = h.space();
  require(target_codim >= h.codim() && target_codim <= space.n(), ErrorKind::OutOfRange,
          "pad target " + std::to_string(target_codim) + " outside [" + std::to_string(h.codim()) + ", " +
              std::to_string(space.n()) + "]");
  std::vector<Subspace::Row> rows = h.rows();
  Subspace cur = h;
  for (unsigned k = 0; k < space.n() && cur.codim() < target_codim; ++k) {
    Subspace::Row unit(space.n(), 0);
    unit[k] = 1;
    rows.push_back(unit);
    Subspace next = Subspace::from_rows(space, rows);
    if (next.codim() > cur.codim())
      cur = std::move(next);
    else
      rows.pop_back();
  }
  return cur;
}

/// The cosets H + g of a subspace, each represented by its minimal-index
/// member, listed in increasing representative order.
class CosetPartition {
 public:
  static constexpr Index kDefaultBudget = Index{1} << 22;

  explicit CosetPartition(Subspace h, Index budget = kDefaultBudget) : h_(std::move(h)) {
    const Space& space = h_.space();
    const Index count = space.place(h_.codim());
    require(count <= budget, ErrorKind::BudgetExceeded,
            "coset count " + std::to_string(count) + " exceeds budget " + std::to_string(budget));
    constexpr Index kUnset = std::numeric_limits<Index>::max();
    label_to_coset_.assign(count, kUnset);
    reps_.reserve(count);
    for (Index x = 0; x < space.size() && reps_.size() < count; ++x) {
      const Index label = h_.syndrome(Point{x});
      if (label_to_coset_[label] == kUnset) {
        label_to_coset_[label] = reps_.size();
        reps_.push_back(Point{x});
      }
    }
  }

  const Subspace& subspace() const { return h_; }
  Index count() const { return reps_.size(); }
  const std::vector<Point>& representatives() const { return reps_; }
  Point representative(Index j) const { return reps_.at(j); }
  Index coset_of(Point x) const { return label_to_coset_[h_.syndrome(x)]; }

  /// Members of coset j in embed order: rep + embed(u).
  std::vector<Point> members(Index j) const {
    std::vector<Point> out = h_.points();
    const Point g = reps_.at(j);
    for (Point& x : out) x = h_.space().add(g, x);
    return out;
  }

  /// Coset index of every point of the space.
  std::vector<Index> labels() const {
    const Space& space = h_.space();
    std::vector<Index> out(space.size());
    for (Index x = 0; x < out.size(); ++x) out[x] = coset_of(Point{x});
    return out;
  }

 private:
  Subspace h_;
  std::vector<Point> reps_;
  std::vector<Index> label_to_coset_;
};

inline CosetPartition cosets(const Subspace& h, Index budget = CosetPartition::kDefaultBudget) {
  return CosetPartition(h, budget);
}

}  // namespace apd
