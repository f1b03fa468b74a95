#pragma once

// Exact rational scalar extended with a single symbolic +infinity.
// Backed by boost::rational<long long>; every finite value is kept in
// lowest terms with positive denominator. +inf participates only in the
// operations the exponent algebra needs: comparison, reciprocal (1/inf = 0),
// division by inf (x/inf = 0), Hoelder conjugation, and printing ("inf").
// Anything else involving inf throws.

#include <boost/rational.hpp>
#include <compare>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace dwlab {

class ExtRational {
public:
  using Rep = boost::rational<long long>;

  ExtRational() : fin_(0) {}
  ExtRational(long long n) : fin_(n) {}  // NOLINT: implicit by design
  ExtRational(long long num, long long den) : fin_(num, den) {}
  explicit ExtRational(Rep r) : fin_(std::move(r)) {}

  static ExtRational inf() {
    ExtRational x;
    x.infinite_ = true;
    return x;
  }

  bool is_inf() const { return infinite_; }
  bool is_zero() const { return !infinite_ && fin_.numerator() == 0; }

  long long num() const { require_finite("num"); return fin_.numerator(); }
  long long den() const { require_finite("den"); return fin_.denominator(); }
  double to_double() const {
    if (infinite_) throw std::domain_error("ExtRational: inf has no double value");
    return boost::rational_cast<double>(fin_);
  }

  // 1/x with 1/inf = 0. 1/0 is inf (used for 1/q with q the exponent).
  ExtRational reciprocal() const {
    if (infinite_) return ExtRational(0);
    if (fin_.numerator() == 0) return inf();
    return ExtRational(Rep(fin_.denominator(), fin_.numerator()));
  }

  // Hoelder conjugate: x' = x/(x-1); conj(1) = inf, conj(inf) = 1.
  ExtRational conjugate() const {
    if (infinite_) return ExtRational(1);
    if (fin_ <= Rep(1)) {
      if (fin_ == Rep(1)) return inf();
      throw std::domain_error("ExtRational: conjugate needs x >= 1");
    }
    return ExtRational(fin_ / (fin_ - Rep(1)));
  }

  friend ExtRational operator+(const ExtRational& a, const ExtRational& b) {
    a.require_finite("+"); b.require_finite("+");
    return ExtRational(a.fin_ + b.fin_);
  }
  friend ExtRational operator-(const ExtRational& a, const ExtRational& b) {
    a.require_finite("-"); b.require_finite("-");
    return ExtRational(a.fin_ - b.fin_);
  }
  friend ExtRational operator-(const ExtRational& a) {
    a.require_finite("negate");
    return ExtRational(-a.fin_);
  }
  friend ExtRational operator*(const ExtRational& a, const ExtRational& b) {
    a.require_finite("*"); b.require_finite("*");
    return ExtRational(a.fin_ * b.fin_);
  }
  // Finite/inf = 0; inf appears in no other division the algebra performs.
  friend ExtRational operator/(const ExtRational& a, const ExtRational& b) {
    if (b.infinite_) {
      a.require_finite("/");
      return ExtRational(0);
    }
    a.require_finite("/");
    if (b.fin_.numerator() == 0) throw std::domain_error("ExtRational: division by zero");
    return ExtRational(a.fin_ / b.fin_);
  }

  friend bool operator==(const ExtRational& a, const ExtRational& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ && b.infinite_;
    return a.fin_ == b.fin_;
  }
  friend bool operator<(const ExtRational& a, const ExtRational& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.fin_ < b.fin_;
  }
  friend bool operator>(const ExtRational& a, const ExtRational& b) { return b < a; }
  friend bool operator<=(const ExtRational& a, const ExtRational& b) { return !(b < a); }
  friend bool operator>=(const ExtRational& a, const ExtRational& b) { return !(a < b); }
  friend bool operator!=(const ExtRational& a, const ExtRational& b) { return !(a == b); }

  friend ExtRational max(const ExtRational& a, const ExtRational& b) { return a < b ? b : a; }
  friend ExtRational min(const ExtRational& a, const ExtRational& b) { return b < a ? b : a; }

  // "p/q" in lowest terms, "p" when integral, "inf" for infinity.
  std::string str() const;

private:
  void require_finite(const char* op) const {
    if (infinite_) throw std::domain_error(std::string("ExtRational: inf in ") + op);
  }

  Rep fin_;
  bool infinite_ = false;
};

std::ostream& operator<<(std::ostream& os, const ExtRational& x);

}  // namespace dwlab
