#include "retard_oc/rational.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "retard_oc/errors.hpp"

namespace retard_oc {
namespace {

using Wide = __int128;

Wide wide_gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational make_reduced(Wide num, Wide den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide g = wide_gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr Wide lo = std::numeric_limits<std::int64_t>::min();
  constexpr Wide hi = std::numeric_limits<std::int64_t>::max();
  if (num < lo || num > hi || den > hi) throw std::overflow_error("rational overflow");
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw std::domain_error("rational with zero denominator");
  Wide n = numerator, d = denominator;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  Wide g = wide_gcd(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num_ = static_cast<std::int64_t>(n);
  den_ = static_cast<std::int64_t>(d);
}

std::int64_t Rational::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  auto fail = [&] {
    return RejectsIncommensurable("not a rational number: '" + std::string(text) + "'");
  };
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw fail();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational n = parse(text.substr(0, slash));
    Rational d = parse(text.substr(slash + 1));
    if (d.is_zero()) throw fail();
    return n / d;
  }

  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  Wide mantissa = 0;
  int exponent = 0;
  bool digits = false, dot = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c >= '0' && c <= '9') {
      digits = true;
      mantissa = mantissa * 10 + (c - '0');
      if (mantissa > (Wide(1) << 100)) throw fail();
      if (dot) --exponent;
    } else if (c == '.' && !dot) {
      dot = true;
    } else if (c == 'e' || c == 'E') {
      break;
    } else {
      throw fail();
    }
  }
  if (!digits) throw fail();
  if (i < text.size()) {
    std::string_view exp_text = text.substr(i + 1);
    if (exp_text.empty()) throw fail();
    int e = 0;
    std::size_t j = 0;
    bool eneg = false;
    if (exp_text[0] == '+' || exp_text[0] == '-') {
      eneg = exp_text[0] == '-';
      ++j;
    }
    if (j == exp_text.size()) throw fail();
    for (; j < exp_text.size(); ++j) {
      if (exp_text[j] < '0' || exp_text[j] > '9') throw fail();
      e = e * 10 + (exp_text[j] - '0');
      if (e > 40) throw fail();
    }
    exponent += eneg ? -e : e;
  }
  Wide num = negative ? -mantissa : mantissa;
  Wide den = 1;
  for (; exponent > 0; --exponent) num *= 10;
  for (; exponent < 0; ++exponent) den *= 10;
  try {
    return make_reduced(num, den);
  } catch (const std::overflow_error&) {
    throw fail();
  }
}

Rational Rational::from_double(double value, std::int64_t max_den, double rel_tol) {
  if (!std::isfinite(value))
    throw RejectsIncommensurable("non-finite value cannot be a rational delay");
  // Continued-fraction convergents.
  double x = value;
  Wide p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(x);
    if (std::fabs(a) > 9e15) break;
    Wide ai = static_cast<Wide>(a);
    Wide p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::fabs(approx - value) <= rel_tol * std::max(1.0, std::fabs(value)))
      return make_reduced(p1, q1);
    double frac = x - a;
    if (frac == 0.0) break;
    x = 1.0 / frac;
  }
  throw RejectsIncommensurable("value " + std::to_string(value) +
                               " has no rational representation with denominator <= " +
                               std::to_string(max_den));
}

Rational operator+(const Rational& a, const Rational& b) {
  return make_reduced(Wide(a.num_) * b.den_ + Wide(b.num_) * a.den_, Wide(a.den_) * b.den_);
}
Rational operator-(const Rational& a, const Rational& b) {
  return make_reduced(Wide(a.num_) * b.den_ - Wide(b.num_) * a.den_, Wide(a.den_) * b.den_);
}
Rational operator*(const Rational& a, const Rational& b) {
  return make_reduced(Wide(a.num_) * b.num_, Wide(a.den_) * b.den_);
}
Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("rational division by zero");
  return make_reduced(Wide(a.num_) * b.den_, Wide(a.den_) * b.num_);
}
Rational Rational::operator-() const { return make_reduced(-Wide(num_), den_); }

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  Wide l = Wide(a.num_) * b.den_, r = Wide(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational gcd(const Rational& a, const Rational& b) {
  if (a.sign() < 0 || b.sign() < 0) throw std::domain_error("gcd of negative rational");
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  // gcd(p/q, r/s) = gcd(p*s, r*q) / (q*s), reduced.
  Wide num = wide_gcd(Wide(a.num()) * b.den(), Wide(b.num()) * a.den());
  return make_reduced(num, Wide(a.den()) * b.den());
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace retard_oc
