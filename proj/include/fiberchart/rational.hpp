#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fiberchart {

// Exact rational on int64 with __int128 intermediates. Always normalized:
// gcd(num, den) == 1, den > 0. Overflow throws instead of wrapping.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}
  Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
    __int128 d = (__int128)a.den_ * b.den_;
    return from128(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    __int128 n = (__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_;
    __int128 d = (__int128)a.den_ * b.den_;
    return from128(n, d);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from128((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return from128((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  // Largest integer <= value.
  long long floor() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }
  long long ceil() const { return -((-*this).floor()); }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  // Fractional part in [0, 1).
  Rational mod1() const { return *this - Rational(floor()); }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Parses "p", "p/q", or "-p/q". Throws std::invalid_argument on junk.
  static Rational parse(const std::string& s);

  static Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
  static Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

 private:
  static Rational from128(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("rational overflow");
    Rational r;
    r.num_ = (long long)n;
    r.den_ = (long long)d;
    return r;
  }
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }
  void normalize() { *this = from128(num_, den_); }

  long long num_;
  long long den_;
};

inline Rational Rational::parse(const std::string& s) {
  auto slash = s.find('/');
  try {
    size_t pos = 0;
    if (slash == std::string::npos) {
      long long n = std::stoll(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("trailing junk");
      return Rational(n);
    }
    long long n = std::stoll(s.substr(0, slash), &pos);
    if (pos != slash) throw std::invalid_argument("trailing junk");
    long long d = std::stoll(s.substr(slash + 1), &pos);
    if (pos != s.size() - slash - 1) throw std::invalid_argument("trailing junk");
    return Rational(n, d);
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("rational out of range: " + s);
  }
}

// A point on S^1 = R/Z, stored as the representative in [0, 1).
class CirclePos {
 public:
  CirclePos() : v_(0) {}
  explicit CirclePos(const Rational& r) : v_(r.mod1()) {}

  const Rational& value() const { return v_; }

  friend bool operator==(const CirclePos& a, const CirclePos& b) { return a.v_ == b.v_; }
  friend bool operator!=(const CirclePos& a, const CirclePos& b) { return !(a == b); }
  friend bool operator<(const CirclePos& a, const CirclePos& b) { return a.v_ < b.v_; }

  CirclePos operator+(const Rational& r) const { return CirclePos(v_ + r); }

  // Distance along the circle to b, in [0, 1/2].
  Rational dist(const CirclePos& b) const {
    Rational d = (v_ - b.v_).mod1();
    Rational half(1, 2);
    return d <= half ? d : Rational(1) - d;
  }

  std::string str() const { return v_.str(); }

 private:
  Rational v_;
};

}  // namespace fiberchart
