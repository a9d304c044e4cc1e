// Copyright 2026 The circformer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exact rational numbers. Values that fit in int64 numerator/denominator are
// kept inline and combined through __int128 intermediates; anything larger is
// promoted to a GMP rational and demoted again as soon as it fits.

#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace circformer {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Rational {
 public:
  Rational() = default;

  // Implicit on purpose: integer literals appear all over the formulas.
  template <typename I>
    requires std::is_integral_v<I>
  Rational(I value) {  // NOLINT(google-explicit-constructor)
    assign(static_cast<__int128>(value), 1);
  }

  Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    assign(num, den);
  }

  explicit Rational(const mpq_class& q) { assign_big(q); }

  /// Parses `[-]digits[/digits]`; the denominator must be positive.
  static Rational parse(std::string_view text) {
    auto digits = [](std::string_view s) {
      if (s.empty()) return false;
      for (char c : s)
        if (c < '0' || c > '9') return false;
      return true;
    };
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && body.front() == '-') {
      negative = true;
      body.remove_prefix(1);
    }
    std::string_view num = body, den;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
      num = body.substr(0, slash);
      den = body.substr(slash + 1);
      if (!digits(den)) throw ParseError("bad rational literal '" + std::string(text) + "'");
    }
    if (!digits(num)) throw ParseError("bad rational literal '" + std::string(text) + "'");
    mpz_class n(std::string(num), 10);
    mpz_class d(den.empty() ? std::string("1") : std::string(den), 10);
    if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    if (negative) n = -n;
    mpq_class q(n, d);
    q.canonicalize();
    return Rational(q);
  }

  bool is_small() const { return !big_; }
  bool is_zero() const { return !big_ && num_ == 0; }
  bool is_integer() const { return big_ ? big_->get_den() == 1 : den_ == 1; }
  int sign() const {
    if (big_) return sgn(*big_);
    return (num_ > 0) - (num_ < 0);
  }

  mpq_class to_mpq() const {
    if (big_) return *big_;
    mpq_class q;
    mpz_set_si(q.get_num_mpz_t(), num_);
    mpz_set_si(q.get_den_mpz_t(), den_);
    return q;
  }

  mpz_class numerator() const { return to_mpq().get_num(); }
  mpz_class denominator() const { return to_mpq().get_den(); }

  std::string str() const {
    if (big_) return big_->get_str(10);
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  Rational inverse() const {
    if (is_zero()) throw std::domain_error("inverse of zero");
    if (big_) return Rational(mpq_class(1) / *big_);
    Rational r;
    r.assign(den_, num_);
    return r;
  }

  Rational operator-() const {
    if (big_) return Rational(mpq_class(-*big_));
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    if (a.is_small() && b.is_small()) {
      if (a.den_ == b.den_) return from_parts(static_cast<__int128>(a.num_) + b.num_, a.den_);
      __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
      __int128 d = static_cast<__int128>(a.den_) * b.den_;
      return from_parts(n, d);
    }
    return Rational(mpq_class(a.to_mpq() + b.to_mpq()));
  }

  friend Rational operator-(const Rational& a, const Rational& b) {
    if (a.is_small() && b.is_small()) {
      if (a.den_ == b.den_) return from_parts(static_cast<__int128>(a.num_) - b.num_, a.den_);
      __int128 n = static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_;
      __int128 d = static_cast<__int128>(a.den_) * b.den_;
      return from_parts(n, d);
    }
    return Rational(mpq_class(a.to_mpq() - b.to_mpq()));
  }

  friend Rational operator*(const Rational& a, const Rational& b) {
    if (a.is_small() && b.is_small()) {
      if (a.num_ == 0 || b.num_ == 0) return Rational();
      if (a.den_ == 1 && b.den_ == 1) return from_parts(static_cast<__int128>(a.num_) * b.num_, 1);
      return from_parts(static_cast<__int128>(a.num_) * b.num_,
                        static_cast<__int128>(a.den_) * b.den_);
    }
    return Rational(mpq_class(a.to_mpq() * b.to_mpq()));
  }

  friend Rational operator/(const Rational& a, const Rational& b) { return a * b.inverse(); }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  // Canonical form makes equality structural: a value is big only if it does
  // not fit the inline representation.
  friend bool operator==(const Rational& a, const Rational& b) {
    if (a.is_small() != b.is_small()) return false;
    if (a.is_small()) return a.num_ == b.num_ && a.den_ == b.den_;
    return *a.big_ == *b.big_;
  }

  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.is_small() && b.is_small()) {
      __int128 l = static_cast<__int128>(a.num_) * b.den_;
      __int128 r = static_cast<__int128>(b.num_) * a.den_;
      return l <=> r;
    }
    int c = cmp(a.to_mpq(), b.to_mpq());
    return c <=> 0;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

  std::size_t hash() const {
    if (big_) return std::hash<std::string>{}(big_->get_str(16));
    return std::hash<std::int64_t>{}(num_) * 1000003u ^ std::hash<std::int64_t>{}(den_);
  }

 private:
  static constexpr __int128 kMax = std::numeric_limits<std::int64_t>::max();

  static unsigned __int128 gcd128(unsigned __int128 a, unsigned __int128 b) {
    while (b != 0) {
      unsigned __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational from_parts(__int128 n, __int128 d) {
    Rational r;
    r.assign(n, d);
    return r;
  }

  // Reduces n/d (d != 0) and stores it, promoting to GMP when it does not fit.
  void assign(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    if (n == 0) {
      num_ = 0;
      den_ = 1;
      big_.reset();
      return;
    }
    if (d != 1) {
      unsigned __int128 g = gcd128(n < 0 ? static_cast<unsigned __int128>(-n) : n,
                                   static_cast<unsigned __int128>(d));
      if (g > 1) {
        n /= static_cast<__int128>(g);
        d /= static_cast<__int128>(g);
      }
    }
    if (n >= -kMax && n <= kMax && d <= kMax) {
      num_ = static_cast<std::int64_t>(n);
      den_ = static_cast<std::int64_t>(d);
      big_.reset();
      return;
    }
    mpq_class q(to_mpz(n), to_mpz(d));
    q.canonicalize();
    assign_big(q);
  }

  static mpz_class to_mpz(__int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64)));
    mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(u)));
    mpz_class out = (hi << 64) + lo;
    return neg ? mpz_class(-out) : out;
  }

  void assign_big(const mpq_class& q) {
    if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p() &&
        q.get_num() != std::numeric_limits<long>::min()) {
      num_ = q.get_num().get_si();
      den_ = q.get_den().get_si();
      big_.reset();
      return;
    }
    num_ = 0;
    den_ = 1;
    big_ = std::make_shared<const mpq_class>(q);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const mpq_class> big_;
};

}  // namespace circformer

template <>
struct std::hash<circformer::Rational> {
  std::size_t operator()(const circformer::Rational& r) const { return r.hash(); }
};
