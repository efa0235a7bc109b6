#pragma once

// Exact rational arithmetic used throughout the library. No floating point
// anywhere: degrees, coefficients and symmetry factors are all Rat.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace grove {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat_of(std::int64_t n) { return Rat(n); }

// Parses "p", "-p" or "p/q" (q > 0 after normalization).
inline Rat rat_parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("rat_parse: empty string");
  try {
    Rat r(s);
    return r;
  } catch (const std::exception&) {
    throw std::invalid_argument("rat_parse: bad rational '" + s + "'");
  }
}

inline std::string rat_str(const Rat& r) { return r.str(); }

inline Int factorial_int(unsigned n) {
  Int f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

// Binomial coefficient over naturals; zero when k > n.
inline Int binomial_int(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  Int num = 1;
  for (unsigned i = 0; i < k; ++i) {
    num *= (n - i);
    num /= (i + 1);  // exact at every step: product of j consecutive ints divides j!
  }
  return num;
}

}  // namespace grove
