#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include <gmpxx.h>

namespace selmon {

/// Exact arbitrary-precision fraction, always kept in lowest terms with a
/// positive denominator. Backed by GMP.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT: implicit by intent
  Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    value_ = mpq_class(num, den);
    value_.canonicalize();
  }
  explicit Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

  /// Parses `num/den` or a bare integer. Throws std::invalid_argument.
  static Rational parse(std::string_view text) {
    auto slash = text.find('/');
    auto parse_int = [](std::string_view s) {
      if (s.empty()) throw std::invalid_argument("empty integer");
      std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
      if (start == s.size()) throw std::invalid_argument("malformed integer");
      for (std::size_t i = start; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("malformed integer '" + std::string(s) + "'");
      }
      std::string digits(s[0] == '+' ? s.substr(1) : s);
      return mpz_class(digits, 10);
    };
    if (slash == std::string_view::npos) return Rational(parse_int(text), mpz_class(1));
    mpz_class den = parse_int(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(parse_int(text.substr(0, slash)), den);
  }

  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }
  const mpq_class& raw() const { return value_; }

  bool is_zero() const { return sgn(value_) == 0; }
  bool is_one() const { return value_ == 1; }
  int sign() const { return sgn(value_); }
  double to_double() const { return value_.get_d(); }

  /// Always `num/den`, including integers (`1/1`).
  std::string str() const { return value_.get_num().get_str() + "/" + value_.get_den().get_str(); }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero");
    value_ /= o.value_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class value_{0};
};

/// A rational or +infinity.
class ExtRational {
 public:
  ExtRational() = default;
  ExtRational(Rational value) : value_(std::move(value)) {}  // NOLINT
  static ExtRational infinity() {
    ExtRational r;
    r.infinite_ = true;
    return r;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  const Rational& value() const {
    if (infinite_) throw std::logic_error("value() of infinite quantity");
    return value_;
  }
  std::string str() const { return infinite_ ? "inf" : value_.str(); }
  double to_double() const;

  friend bool operator==(const ExtRational& a, const ExtRational& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
    if (a.infinite_ || b.infinite_) return static_cast<int>(a.infinite_) <=> static_cast<int>(b.infinite_);
    return a.value_ <=> b.value_;
  }

 private:
  Rational value_;
  bool infinite_ = false;
};

inline double ExtRational::to_double() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : value_.to_double();
}

/// Exact integer power.
inline Rational pow(const Rational& base, unsigned exp) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.numerator().get_mpz_t(), exp);
  mpz_pow_ui(den.get_mpz_t(), base.denominator().get_mpz_t(), exp);
  return Rational(num, den);
}

}  // namespace selmon
