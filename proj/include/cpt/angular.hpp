#pragma once

#include <compare>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace cpt {

/// Angular momentum or projection stored as twice its value, so half-integers are exact.
class HalfInt
{
public:
  constexpr HalfInt() = default;
  constexpr HalfInt(int integer) : twice_(2 * integer) {}

  static constexpr HalfInt from_twice(int twice)
  {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
  constexpr HalfInt& operator+=(HalfInt o)
  {
    twice_ += o.twice_;
    return *this;
  }

  constexpr auto operator<=>(const HalfInt&) const = default;

  std::string str() const;

private:
  int twice_ = 0;
};

/// n/2 as a HalfInt, e.g. half(3) == 3/2.
constexpr HalfInt half(int n) { return HalfInt::from_twice(n); }

constexpr HalfInt abs(HalfInt h) { return h.twice() < 0 ? -h : h; }

/// True when (j, m) is a valid momentum/projection pair.
constexpr bool valid_pair(HalfInt j, HalfInt m)
{
  return j.twice() >= 0 && abs(m) <= j && (j - m).is_integer();
}

/// j1, j2, j3 satisfy the triangle rule and sum to an integer.
constexpr bool triangle(HalfInt j1, HalfInt j2, HalfInt j3)
{
  return (j1 + j2 + j3).is_integer() && abs(j1 - j2) <= j3 && j3 <= j1 + j2;
}

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// sign * sqrt(square) with an exact rational square. Every coupling coefficient has this form.
struct SignedSqrtRational
{
  int sign = 0;
  Rational square{0};

  double value() const;
  bool is_zero() const { return sign == 0; }

  friend SignedSqrtRational operator*(const SignedSqrtRational& a, const SignedSqrtRational& b);
  friend SignedSqrtRational operator/(const SignedSqrtRational& a, const SignedSqrtRational& b);
  friend bool operator==(const SignedSqrtRational& a, const SignedSqrtRational& b);
};

SignedSqrtRational exact_wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);
SignedSqrtRational exact_clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);
SignedSqrtRational exact_wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6);

// Floating point views of the exact values. Selection-rule failures give 0;
// a malformed (j, m) pair throws std::invalid_argument.
double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);
double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);
double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6);

/// Largest momentum the factorial table supports.
inline constexpr int kMaxTwiceMomentum = 40;

} // namespace cpt
