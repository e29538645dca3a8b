#pragma once

// Function and set files, plus parsing of numeric command-line values.
//
// Text function file:   FPN 1 / p <p> / n <n> / p^n values, one per line.
// Binary function file: "FPNB", u32 p, u32 n, p^n binary64 values (all LE).
// Spectrum file:        FPS 1 / p <p> / n <n> / p^n lines "re im".
// Set file:             FPSET 1 / p / n / k / k increasing indices.

#include <apd/error.hpp>
#include <apd/fourier.hpp>
#include <apd/space.hpp>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace apd::io {

enum class Encoding { Text, Binary };

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t get_le(std::istream& is, int bytes, const char* what) {
  unsigned char b[8] = {};
  is.read(reinterpret_cast<char*>(b), bytes);
  require(is.gcount() == bytes, ErrorKind::Format, std::string("truncated binary function file (") + what + ")");
  std::uint64_t v = 0;
  for (int k = bytes - 1; k >= 0; --k) v = (v << 8) | b[k];
  return v;
}

/// Next whitespace-separated token, or empty at end of input.
inline std::string token(std::istream& is) {
  std::string t;
  is >> t;
  return t;
}

inline std::uint64_t parse_uint(const std::string& t, const char* what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  require(ec == std::errc{} && ptr == t.data() + t.size() && !t.empty(), ErrorKind::Format,
          std::string("expected a nonnegative integer for ") + what + ", got '" + t + "'");
  return v;
}

inline double parse_double(const std::string& t) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  require(ec == std::errc{} && ptr == t.data() + t.size() && !t.empty(), ErrorKind::Format,
          "expected a real value, got '" + t + "'");
  return v;
}

inline void expect(std::istream& is, std::string_view word) {
  const std::string t = token(is);
  require(t == word, ErrorKind::Format, "expected '" + std::string(word) + "', got '" + t + "'");
}

inline Space make_space(std::uint64_t p, std::uint64_t n) {
  require(p < (1u << 16) && n < 64, ErrorKind::Format, "header p or n out of range");
  try {
    return Space(static_cast<unsigned>(p), static_cast<unsigned>(n));
  } catch (const Error& e) {
    fail(ErrorKind::Format, std::string("bad header: ") + e.what());
  }
}

}  // namespace detail

inline void write_function(std::ostream& os, const GFunction& f, Encoding enc) {
  const Space& space = f.space();
  if (enc == Encoding::Binary) {
    os.write("FPNB", 4);
    detail::put_u32(os, space.p());
    detail::put_u32(os, space.n());
    for (double v : f.values()) detail::put_u64(os, std::bit_cast<std::uint64_t>(v));
  } else {
    os << "FPN 1\np " << space.p() << "\nn " << space.n() << '\n';
    std::ostringstream line;
    line << std::setprecision(17);
    for (double v : f.values()) {
      line.str({});
      line << v;
      os << line.str() << '\n';
    }
  }
  require(static_cast<bool>(os), ErrorKind::Format, "write failed");
}

/// Reads either encoding, detected from the first four bytes.
inline GFunction read_function(std::istream& is) {
  char magic[4] = {};
  is.read(magic, 4);
  require(is.gcount() == 4, ErrorKind::Format, "function file is empty or truncated");
  std::vector<double> values;
  Space space;
  if (std::memcmp(magic, "FPNB", 4) == 0) {
    const auto p = detail::get_le(is, 4, "p");
    const auto n = detail::get_le(is, 4, "n");
    space = detail::make_space(p, n);
    values.resize(space.size());
    for (auto& v : values) v = std::bit_cast<double>(detail::get_le(is, 8, "values"));
    is.peek();
    require(is.eof(), ErrorKind::Format, "trailing bytes after binary function values");
  } else {
    require(std::memcmp(magic, "FPN ", 4) == 0, ErrorKind::Format, "not a function file (bad magic)");
    detail::expect(is, "1");
    detail::expect(is, "p");
    const auto p = detail::parse_uint(detail::token(is), "p");
    detail::expect(is, "n");
    const auto n = detail::parse_uint(detail::token(is), "n");
    space = detail::make_space(p, n);
    values.resize(space.size());
    for (Index i = 0; i < values.size(); ++i) {
      const std::string t = detail::token(is);
      require(!t.empty(), ErrorKind::Format,
              "function file has " + std::to_string(i) + " values, expected " + std::to_string(values.size()));
      values[i] = detail::parse_double(t);
    }
    require(detail::token(is).empty(), ErrorKind::Format, "function file has more than p^n values");
  }
  for (double v : values) require(std::isfinite(v), ErrorKind::Format, "function value is not finite");
  const bool in_unit = std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
  return GFunction(space, std::move(values), !in_unit);
}

inline void write_function_file(const std::string& path, const GFunction& f, Encoding enc) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorKind::Format, "cannot open '" + path + "' for writing");
  write_function(os, f, enc);
}

inline GFunction read_function_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::Format, "cannot open '" + path + "'");
  return read_function(is);
}

inline void write_spectrum(std::ostream& os, const Spectrum& s) {
  os << "FPS 1\np " << s.space().p() << "\nn " << s.space().n() << '\n';
  std::ostringstream line;
  line << std::setprecision(17);
  for (const Complex& c : s.coeffs()) {
    line.str({});
    line << c.real() << ' ' << c.imag();
    os << line.str() << '\n';
  }
  require(static_cast<bool>(os), ErrorKind::Format, "write failed");
}

inline Spectrum read_spectrum(std::istream& is) {
  detail::expect(is, "FPS");
  detail::expect(is, "1");
  detail::expect(is, "p");
  const auto p = detail::parse_uint(detail::token(is), "p");
  detail::expect(is, "n");
  const auto n = detail::parse_uint(detail::token(is), "n");
  const Space space = detail::make_space(p, n);
  std::vector<Complex> coeffs(space.size());
  for (Index i = 0; i < coeffs.size(); ++i) {
    const std::string re = detail::token(is), im = detail::token(is);
    require(!im.empty(), ErrorKind::Format, "spectrum file ends after " + std::to_string(i) + " coefficients");
    coeffs[i] = Complex(detail::parse_double(re), detail::parse_double(im));
    require(std::isfinite(coeffs[i].real()) && std::isfinite(coeffs[i].imag()), ErrorKind::Format,
            "spectrum coefficient is not finite");
  }
  require(detail::token(is).empty(), ErrorKind::Format, "spectrum file has more than p^n coefficients");
  return Spectrum(space, std::move(coeffs));
}

struct PointSet {
  Space space;
  std::vector<Index> indices;
};

inline void write_set(std::ostream& os, const Space& space, const std::vector<Index>& indices) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    require(indices[i] < space.size(), ErrorKind::OutOfRange, "set index outside the space");
    require(i == 0 || indices[i - 1] < indices[i], ErrorKind::InvalidArgument, "set indices must increase");
  }
  os << "FPSET 1\n" << space.p() << '\n' << space.n() << '\n' << indices.size() << '\n';
  for (Index x : indices) os << x << '\n';
  require(static_cast<bool>(os), ErrorKind::Format, "write failed");
}

inline PointSet read_set(std::istream& is) {
  detail::expect(is, "FPSET");
  detail::expect(is, "1");
  const auto p = detail::parse_uint(detail::token(is), "p");
  const auto n = detail::parse_uint(detail::token(is), "n");
  PointSet s{detail::make_space(p, n), {}};
  const auto k = detail::parse_uint(detail::token(is), "k");
  require(k <= s.space.size(), ErrorKind::Format, "set size exceeds p^n");
  s.indices.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::string t = detail::token(is);
    require(!t.empty(), ErrorKind::Format, "set file ends after " + std::to_string(i) + " of " + std::to_string(k));
    const Index x = detail::parse_uint(t, "index");
    require(x < s.space.size(), ErrorKind::Format, "set index " + t + " outside [0, p^n)");
    require(s.indices.empty() || s.indices.back() < x, ErrorKind::Format, "set indices must strictly increase");
    s.indices.push_back(x);
  }
  require(detail::token(is).empty(), ErrorKind::Format, "set file has more than k indices");
  return s;
}

inline void write_set_file(const std::string& path, const Space& space, const std::vector<Index>& indices) {
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorKind::Format, "cannot open '" + path + "' for writing");
  write_set(os, space, indices);
}

inline PointSet read_set_file(const std::string& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), ErrorKind::Format, "cannot open '" + path + "'");
  return read_set(is);
}

// ---------------------------------------------------------------------------
// Numeric arguments

namespace detail {

class RealParser {
 public:
  explicit RealParser(std::string_view s) : s_(s) {}

  double parse() {
    const double v = product();
    skip();
    require(pos_ == s_.size(), ErrorKind::InvalidArgument, "unexpected '" + std::string(s_.substr(pos_)) + "'");
    return v;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  double product() {
    double v = power();
    for (;;) {
      skip();
      if (pos_ < s_.size() && (s_[pos_] == '*' || s_[pos_] == '/')) {
        const char op = s_[pos_++];
        const double r = power();
        v = op == '*' ? v * r : v / r;
      } else {
        return v;
      }
    }
  }

  double power() {
    const double b = signed_number();
    skip();
    if (pos_ < s_.size() && s_[pos_] == '^') {
      ++pos_;
      return std::pow(b, power());
    }
    return b;
  }

  double signed_number() {
    skip();
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      const bool neg = s_[pos_++] == '-';
      const double v = signed_number();
      return neg ? -v : v;
    }
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      const double v = product();
      skip();
      require(pos_ < s_.size() && s_[pos_] == ')', ErrorKind::InvalidArgument, "missing ')'");
      ++pos_;
      return v;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    require(ec == std::errc{}, ErrorKind::InvalidArgument, "expected a number at '" + std::string(s_.substr(pos_)) + "'");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Real value from a decimal literal or a product of powers such as
/// "2^-160*3^-8" or "2/9".
inline double parse_real(std::string_view text) {
  try {
    const double v = detail::RealParser(text).parse();
    require(std::isfinite(v), ErrorKind::InvalidArgument, "value is not finite");
    return v;
  } catch (const Error&) {
    fail(ErrorKind::InvalidArgument, "cannot parse '" + std::string(text) + "' as a real value");
  }
}

/// Comma-separated list of real expressions; empty input gives an empty list.
inline std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_real(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

}  // namespace apd::io
