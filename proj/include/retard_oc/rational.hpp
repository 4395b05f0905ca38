#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace retard_oc {

/// Exact rational number with 64-bit numerator and denominator.
///
/// Always kept in lowest terms with a positive denominator. Arithmetic is
/// carried out in 128-bit intermediates and throws std::overflow_error when
/// the reduced result no longer fits.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT: implicit by design of the type
  Rational(std::int64_t numerator, std::int64_t denominator);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  /// Largest integer not above the value.
  std::int64_t floor() const;

  std::string str() const;

  /// Parses "3", "-7/2", "0.125" or "1.5e-2" exactly.
  static Rational parse(std::string_view text);

  /// Best rational approximation with denominator <= max_den, accepted only
  /// if it reproduces `value` to within rel_tol. Throws
  /// RejectsIncommensurable otherwise (including for NaN and infinities).
  static Rational from_double(double value, std::int64_t max_den = 1000000,
                              double rel_tol = 1e-12);

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Greatest common divisor of two non-negative rationals: the largest g with
/// a/g and b/g both integers. gcd(0, b) = b.
Rational gcd(const Rational& a, const Rational& b);

Rational abs(const Rational& r);

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace retard_oc
