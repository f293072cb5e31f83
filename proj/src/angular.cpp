#include "cpt/angular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cpt {

std::string HalfInt::str() const
{
  if (is_integer()) { return std::to_string(twice_ / 2); }
  return std::to_string(twice_) + "/2";
}

double SignedSqrtRational::value() const
{
  if (sign == 0) { return 0.0; }
  return sign * std::sqrt(square.convert_to<double>());
}

SignedSqrtRational operator*(const SignedSqrtRational& a, const SignedSqrtRational& b)
{
  if (a.sign == 0 || b.sign == 0) { return {}; }
  return {a.sign * b.sign, a.square * b.square};
}

SignedSqrtRational operator/(const SignedSqrtRational& a, const SignedSqrtRational& b)
{
  if (b.sign == 0) { throw std::domain_error("division by a vanishing coupling coefficient"); }
  if (a.sign == 0) { return {}; }
  return {a.sign * b.sign, a.square / b.square};
}

bool operator==(const SignedSqrtRational& a, const SignedSqrtRational& b)
{
  if (a.sign == 0 || b.sign == 0) { return a.sign == b.sign; }
  return a.sign == b.sign && a.square == b.square;
}

namespace {

const BigInt& factorial(int n)
{
  static const std::vector<BigInt> table = [] {
    std::vector<BigInt> t(4 * kMaxTwiceMomentum + 2);
    t[0] = 1;
    for (std::size_t i = 1; i < t.size(); ++i) { t[i] = t[i - 1] * static_cast<unsigned>(i); }
    return t;
  }();
  if (n < 0 || n >= static_cast<int>(table.size())) {
    throw std::out_of_range("factorial argument outside the supported momentum range");
  }
  return table[static_cast<std::size_t>(n)];
}

// Integer value of a HalfInt known to be integral.
int integral(HalfInt h)
{
  if (!h.is_integer()) { throw std::logic_error("expected an integral combination of momenta"); }
  return h.twice() / 2;
}

int parity_sign(HalfInt exponent) { return (integral(exponent) % 2 == 0) ? 1 : -1; }

void require_pair(HalfInt j, HalfInt m)
{
  if (!valid_pair(j, m)) {
    throw std::invalid_argument("malformed angular momentum pair (j=" + j.str() + ", m=" + m.str() + ")");
  }
  if (j.twice() > kMaxTwiceMomentum) { throw std::invalid_argument("momentum j=" + j.str() + " above supported range"); }
}

void require_momentum(HalfInt j)
{
  if (j.twice() < 0 || j.twice() > kMaxTwiceMomentum) {
    throw std::invalid_argument("momentum j=" + j.str() + " outside supported range");
  }
}

Rational fact(HalfInt h) { return Rational(factorial(integral(h))); }

// Triangle coefficient (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!
Rational delta(HalfInt a, HalfInt b, HalfInt c)
{
  return fact(a + b - c) * fact(a - b + c) * fact(-a + b + c) / fact(a + b + c + 1);
}

SignedSqrtRational from_sum(int phase, const Rational& prefactor, const Rational& sum)
{
  if (sum == 0) { return {}; }
  const int s = sum > 0 ? 1 : -1;
  return {phase * s, prefactor * sum * sum};
}

} // namespace

SignedSqrtRational exact_wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3)
{
  require_pair(j1, m1);
  require_pair(j2, m2);
  require_pair(j3, m3);
  if ((m1 + m2 + m3).twice() != 0 || !triangle(j1, j2, j3)) { return {}; }

  // Racah's single-sum formula.
  const int t_min = std::max({0, integral(j2 - j3 - m1), integral(j1 - j3 + m2)});
  const int t_max = std::min({integral(j1 + j2 - j3), integral(j1 - m1), integral(j2 + m2)});
  Rational sum{0};
  for (int t = t_min; t <= t_max; ++t) {
    const HalfInt ht{t};
    const Rational denom = fact(ht) * fact(j3 - j2 + ht + m1) * fact(j3 - j1 + ht - m2) * fact(j1 + j2 - j3 - ht) *
                           fact(j1 - ht - m1) * fact(j2 - ht + m2);
    sum += (t % 2 == 0 ? Rational{1} : Rational{-1}) / denom;
  }
  const Rational prefactor = delta(j1, j2, j3) * fact(j1 + m1) * fact(j1 - m1) * fact(j2 + m2) * fact(j2 - m2) *
                             fact(j3 + m3) * fact(j3 - m3);
  return from_sum(parity_sign(j1 - j2 - m3), prefactor, sum);
}

SignedSqrtRational exact_clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M)
{
  require_pair(j1, m1);
  require_pair(j2, m2);
  require_pair(J, M);
  if (M != m1 + m2 || !triangle(j1, j2, J)) { return {}; }
  SignedSqrtRational c = exact_wigner_3j(j1, j2, J, m1, m2, -M);
  if (c.is_zero()) { return c; }
  c.sign *= parity_sign(j1 - j2 + M);
  c.square *= J.twice() + 1;
  return c;
}

SignedSqrtRational exact_wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6)
{
  for (HalfInt j : {j1, j2, j3, j4, j5, j6}) { require_momentum(j); }
  if (!triangle(j1, j2, j3) || !triangle(j1, j5, j6) || !triangle(j4, j2, j6) || !triangle(j4, j5, j3)) {
    return {};
  }
  const int a1 = integral(j1 + j2 + j3);
  const int a2 = integral(j1 + j5 + j6);
  const int a3 = integral(j4 + j2 + j6);
  const int a4 = integral(j4 + j5 + j3);
  const int b1 = integral(j1 + j2 + j4 + j5);
  const int b2 = integral(j2 + j3 + j5 + j6);
  const int b3 = integral(j3 + j1 + j6 + j4);
  const int t_min = std::max({a1, a2, a3, a4});
  const int t_max = std::min({b1, b2, b3});
  Rational sum{0};
  for (int t = t_min; t <= t_max; ++t) {
    const Rational denom = Rational(factorial(t - a1)) * factorial(t - a2) * factorial(t - a3) * factorial(t - a4) *
                           factorial(b1 - t) * factorial(b2 - t) * factorial(b3 - t);
    sum += (t % 2 == 0 ? Rational{1} : Rational{-1}) * Rational(factorial(t + 1)) / denom;
  }
  const Rational prefactor = delta(j1, j2, j3) * delta(j1, j5, j6) * delta(j4, j2, j6) * delta(j4, j5, j3);
  return from_sum(1, prefactor, sum);
}

double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3)
{
  return exact_wigner_3j(j1, j2, j3, m1, m2, m3).value();
}

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M)
{
  return exact_clebsch_gordan(j1, m1, j2, m2, J, M).value();
}

double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6)
{
  return exact_wigner_6j(j1, j2, j3, j4, j5, j6).value();
}

} // namespace cpt
