#pragma once

// Closed-form references for random walks and polygons: hypercube slice
// volumes, end-to-end and failure-to-close densities, the closed-polygon
// normalizer C_n, expected total curvature, polygon-space volumes and chord
// moments.
//
// Every alternating sum is evaluated in exact rational arithmetic (the
// floating-point argument is converted exactly) and rounded to double once;
// the terms cancel catastrophically in double precision for n beyond ~15.
// Truncated powers follow the convention x_+^0 = 1 for x > 0 and 0
// otherwise.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <gmpxx.h>

#include "polysample/geometry.hpp"

namespace polysample {

inline constexpr int kMaxSubsetSumLength = 25;

namespace exact {

inline mpq_class pow(const mpq_class& x, unsigned long e) {
  mpq_class out;
  mpz_pow_ui(out.get_num_mpz_t(), x.get_num_mpz_t(), e);
  mpz_pow_ui(out.get_den_mpz_t(), x.get_den_mpz_t(), e);
  return out;  // already canonical: gcd(num, den) = 1 is preserved
}

/// x_+^e with 0^0 = 0.
inline mpq_class truncated_pow(const mpq_class& x, unsigned long e) {
  if (sgn(x) <= 0) return 0;
  return pow(x, e);
}

inline mpz_class binomial(unsigned long n, unsigned long k) {
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

inline mpz_class factorial(unsigned long n) {
  mpz_class out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

/// Correctly rounded when numerator and denominator are below 2^53;
/// otherwise within one ulp (mpq_get_d truncates).
inline double to_double(const mpq_class& q) {
  const mpz_class& a = q.get_num();
  const mpz_class& b = q.get_den();
  if (mpz_sizeinbase(a.get_mpz_t(), 2) <= 53 && mpz_sizeinbase(b.get_mpz_t(), 2) <= 53) return a.get_d() / b.get_d();
  return q.get_d();
}

/// The measure sum_A (-1)^{|A|} delta(s_A) with s_A = sum_{i not in A} r_i -
/// sum_{i in A} r_i, as a list of (shift, signed multiplicity) with equal
/// shifts merged.
struct ShiftSum {
  std::vector<std::pair<mpq_class, mpz_class>> terms;
  unsigned long n = 0;

  /// sum over terms of c * (x + s)_+^e
  mpq_class eval(const mpq_class& x, unsigned long e) const {
    mpq_class acc = 0;
    for (const auto& [s, c] : terms) {
      const mpq_class y = x + s;
      if (sgn(y) > 0) acc += c * pow(y, e);
    }
    return acc;
  }

  static ShiftSum equilateral(unsigned long n) {
    ShiftSum out;
    out.n = n;
    for (unsigned long k = 0; k <= n; ++k) {
      mpz_class c = binomial(n, k);
      if (k % 2) c = -c;
      out.terms.emplace_back(mpq_class(static_cast<long>(n) - 2 * static_cast<long>(k)), c);
    }
    return out;
  }

  static ShiftSum general(const std::vector<double>& r) {
    std::map<mpq_class, mpz_class> acc;
    acc[mpq_class(0)] = 1;
    for (double ri : r) {
      const mpq_class q(ri);
      std::map<mpq_class, mpz_class> next;
      for (const auto& [s, c] : acc) {
        next[s + q] += c;
        next[s - q] -= c;
      }
      acc.clear();
      for (auto& [s, c] : next)
        if (c != 0) acc.emplace(s, std::move(c));
    }
    ShiftSum out;
    out.n = r.size();
    for (auto& [s, c] : acc) out.terms.emplace_back(s, c);
    return out;
  }
};

inline ShiftSum shifts_for(const std::vector<double>& r) {
  if (r.size() > static_cast<std::size_t>(kMaxSubsetSumLength)) {
    throw std::length_error("subset sums over more than " + std::to_string(kMaxSubsetSumLength) +
                            " edges are not supported; use a Monte Carlo estimate instead");
  }
  bool equal = true;
  for (double x : r) equal = equal && x == r.front();
  if (equal && r.front() == 1.0) return ShiftSum::equilateral(r.size());
  return ShiftSum::general(r);
}

inline mpq_class product(const std::vector<double>& r) {
  mpq_class p = 1;
  for (double x : r) p *= mpq_class(x);
  return p;
}

/// sum_{k} (-1)^{k+1} C(n,k) (n-2k)^{n-3}, k = 0..floor(n/2).
inline mpz_class closure_alternating_sum(unsigned long n) {
  mpz_class acc = 0;
  for (unsigned long k = 0; 2 * k <= n; ++k) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), n - 2 * k, n - 3);
    if (n - 2 * k == 0) p = 0;
    const mpz_class t = binomial(n, k) * p;
    acc += (k % 2) ? t : mpz_class(-t);
  }
  return acc;
}

}  // namespace exact

/// (m-1)-volume of the slice {sum x_i = x} of the cube [-1,1]^m:
/// sqrt(m)/(m-1)! * sum_k (-1)^k C(m,k) (x + m - 2k)_+^{m-1}.
inline double sa_unit_cube(double x, int m) {
  if (m < 2) throw std::invalid_argument("sa_unit_cube: cube dimension must be at least 2");
  const auto S = exact::ShiftSum::equilateral(static_cast<unsigned long>(m));
  const mpq_class v = S.eval(mpq_class(x), static_cast<unsigned long>(m - 1)) / exact::factorial(m - 1);
  return std::sqrt(static_cast<double>(m)) * exact::to_double(v);
}

/// (n-1)-volume of the slice {sum x_i = x} of the box prod [-r_i, r_i]:
/// sqrt(n)/(n-1)! * sum_A (-1)^{|A|} (x + sum_{i not in A} r_i - sum_{i in A} r_i)_+^{n-1}.
inline double sa_box_general(double x, const EdgeLengths& r) {
  const auto S = exact::shifts_for(r.values());
  const unsigned long n = S.n;
  const mpq_class v = S.eval(mpq_class(x), n - 1) / exact::factorial(n - 1);
  return std::sqrt(static_cast<double>(n)) * exact::to_double(v);
}

/// Density of x_1 + ... + x_n for independent x_i uniform on [-r_i, r_i].
inline double sum_pdf(double x, const EdgeLengths& r) {
  const auto S = exact::shifts_for(r.values());
  const unsigned long n = S.n;
  mpq_class denom = exact::product(r.values()) * exact::factorial(n - 1);
  denom *= mpq_class(mpz_class(1) << static_cast<mp_bitcnt_t>(n));
  return exact::to_double(S.eval(mpq_class(x), n - 1) / denom);
}

namespace detail {
/// l * phi(l) numerator: [T(l - r_n) - T(l + r_n)] / (2^{n-1} R (n-2)!), with
/// T the shift sum over r_1..r_{n-1}; the caller multiplies by l.
inline mpq_class end_to_end_bracket(const mpq_class& l, const exact::ShiftSum& S, const mpq_class& rn,
                                    const mpq_class& R, unsigned long n) {
  const unsigned long e = n - 2;
  mpq_class v = S.eval(l - rn, e) - S.eval(l + rn, e);
  mpq_class denom = R * exact::factorial(n - 2);
  denom *= mpq_class(mpz_class(1) << static_cast<mp_bitcnt_t>(n - 1));
  return v / denom;
}
}  // namespace detail

/// Density of the end-to-end distance of an n-step walk with unit steps.
inline double end_to_end_pdf(double l, int n) {
  if (n < 2) throw std::invalid_argument("end_to_end_pdf: n must be at least 2");
  if (l < 0.0) throw std::domain_error("end_to_end_pdf: negative distance");
  if (l >= n) return 0.0;
  const auto S = exact::ShiftSum::equilateral(static_cast<unsigned long>(n - 1));
  const mpq_class L(l);
  return exact::to_double(L * detail::end_to_end_bracket(L, S, 1, 1, static_cast<unsigned long>(n)));
}

/// Density of the end-to-end distance of a walk with steps of lengths r.
inline double end_to_end_pdf_general(double l, const EdgeLengths& r) {
  const int n = r.size();
  if (n < 2) throw std::invalid_argument("end_to_end_pdf_general: need at least 2 edges");
  if (l < 0.0) throw std::domain_error("end_to_end_pdf_general: negative distance");
  if (l >= r.total()) return 0.0;
  std::vector<double> head(r.values().begin(), r.values().end() - 1);
  const auto S = exact::shifts_for(head);
  const mpq_class L(l);
  return exact::to_double(
      L * detail::end_to_end_bracket(L, S, mpq_class(r.values().back()), exact::product(r.values()),
                                     static_cast<unsigned long>(n)));
}

/// l * Phi_n(l), where Phi_n is the density in R^3 of the sum of n unit
/// vectors. Finite at l = 0.
inline double ell_ftc_pdf(double l, int n) {
  if (n == 1) throw std::invalid_argument("ftc_pdf: n = 1 is a delta distribution, not a function");
  if (n < 2) throw std::invalid_argument("ftc_pdf: n must be at least 2");
  if (l < 0.0) throw std::domain_error("ftc_pdf: negative distance");
  if (l >= n) return 0.0;
  const auto S = exact::ShiftSum::equilateral(static_cast<unsigned long>(n - 1));
  const mpq_class bracket = detail::end_to_end_bracket(mpq_class(l), S, 1, 1, static_cast<unsigned long>(n));
  return exact::to_double(bracket / 4) / std::numbers::pi;
}

/// Phi_n(l) = phi_n(l) / (4 pi l^2), l > 0.
inline double ftc_pdf(double l, int n) {
  if (n == 1) throw std::invalid_argument("ftc_pdf: n = 1 is a delta distribution, not a function");
  if (!(l > 0.0)) throw std::domain_error("ftc_pdf: l must be positive (use c_n for the limit at 0)");
  return ell_ftc_pdf(l, n) / l;
}

/// Closed-polygon normalizer
/// C_n = sum_{k=0}^{floor(n/2)} (-1)^{k+1} C(n,k) (n-2k)^{n-3} / (2^{n+1} pi (n-3)!).
inline mpq_class c_n_rational(int n) {
  if (n < 4) throw std::invalid_argument("c_n: n must be at least 4");
  const auto un = static_cast<unsigned long>(n);
  mpq_class denom(exact::factorial(un - 3));
  denom *= mpq_class(mpz_class(1) << static_cast<mp_bitcnt_t>(un + 1));
  return mpq_class(exact::closure_alternating_sum(un)) / denom;
}

inline double c_n(int n) { return exact::to_double(c_n_rational(n)) / std::numbers::pi; }

/// Expected total curvature of a random equilateral closed n-gon,
/// n/(2 C_n) * int_0^2 arccos((l^2-2)/2) Phi_{n-2}(l) l dl, computed with
/// l = 2 cos(u/2) as n/(2 C_n) * int_0^pi u [l Phi_{n-2}(l)] sin(u/2) du.
inline double expected_total_curvature(int n) {
  if (n == 3) return 2.0 * std::numbers::pi;
  if (n < 3) throw std::invalid_argument("expected_total_curvature: n must be at least 3");
  const auto m = static_cast<unsigned long>(n - 2);
  const auto S = exact::ShiftSum::equilateral(m - 1);
  // pi * l * Phi_{n-2}(l), exact apart from the node.
  auto integrand = [&](double u) {
    const double l = 2.0 * std::cos(0.5 * u);
    if (l >= static_cast<double>(m)) return 0.0;
    const mpq_class bracket = detail::end_to_end_bracket(mpq_class(l), S, 1, 1, m);
    return u * exact::to_double(bracket / 4) * std::sin(0.5 * u);
  };
  // Pieces of Phi_{n-2} break where l has the parity of n-2: at l = 1 (u = 2pi/3)
  // for odd n.
  std::vector<double> cuts = {0.0, std::numbers::pi};
  if (m % 2 == 1) cuts = {0.0, 2.0 * std::numbers::pi / 3.0, std::numbers::pi};
  constexpr int kPanels = 4;
  double integral = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double h = (cuts[p + 1] - cuts[p]) / kPanels;
    for (int j = 0; j < kPanels; ++j) {
      const double a = cuts[p] + j * h;
      integral += boost::math::quadrature::gauss<double, 64>::integrate(integrand, a, a + h);
    }
  }
  // pi cancels between Phi and C_n.
  return static_cast<double>(n) / (2.0 * exact::to_double(c_n_rational(n))) * integral;
}

/// n pi/2 + 3 pi/8.
inline double grosberg_asymptotic(int n) {
  if (n < 3) throw std::invalid_argument("grosberg_asymptotic: n must be at least 3");
  return static_cast<double>(n) * std::numbers::pi / 2.0 + 3.0 * std::numbers::pi / 8.0;
}

/// Treatment of edge-length vectors for which some eps_I vanishes.
enum class SingularPolicy { Throw, Exclude };

/// Volume of the space of closed polygons with edge lengths r modulo
/// rotations:
/// -((2 pi)^{n-3} / (2 (n-3)!)) sum_{I : eps_I > 0} (-1)^{n-|I|} eps_I^{n-3},
/// eps_I = sum_{i in I} r_i - sum_{i not in I} r_i.
inline double polygon_space_volume(const EdgeLengths& r, SingularPolicy policy = SingularPolicy::Throw) {
  const int n = r.size();
  if (n < 4) throw std::invalid_argument("polygon_space_volume: n must be at least 4");
  if (n > kMaxSubsetSumLength) {
    throw std::length_error("polygon_space_volume: more than " + std::to_string(kMaxSubsetSumLength) + " edges");
  }
  // eps -> (signed coefficient, witness subset)
  struct Entry {
    mpz_class coef;
    std::uint32_t witness;
  };
  std::map<mpq_class, Entry> acc;
  mpq_class start = 0;
  for (double x : r.values()) start -= mpq_class(x);
  acc[start] = Entry{(n % 2) ? mpz_class(-1) : mpz_class(1), 0u};
  for (int i = 0; i < n; ++i) {
    const mpq_class two_r = 2 * mpq_class(r[static_cast<std::size_t>(i)]);
    std::map<mpq_class, Entry> next;
    for (const auto& [eps, e] : acc) {
      auto& keep = next[eps];
      if (keep.coef == 0 && keep.witness == 0) keep.witness = e.witness;
      keep.coef += e.coef;
      auto& add = next[eps + two_r];
      if (add.coef == 0 && add.witness == 0) add.witness = e.witness | (1u << i);
      add.coef -= e.coef;
    }
    acc = std::move(next);
  }
  mpq_class sum = 0;
  for (const auto& [eps, e] : acc) {
    if (sgn(eps) == 0) {
      if (policy == SingularPolicy::Throw) {
        std::string subset;
        for (int i = 0; i < n; ++i)
          if (e.witness & (1u << i)) subset += (subset.empty() ? "" : ",") + std::to_string(i + 1);
        throw std::domain_error("polygon_space_volume: singular edge lengths, eps_I = 0 for I = {" + subset + "}");
      }
      continue;
    }
    if (sgn(eps) > 0) sum += e.coef * exact::pow(eps, static_cast<unsigned long>(n - 3));
  }
  const mpq_class coef = -sum / (2 * mpq_class(exact::factorial(static_cast<unsigned long>(n - 3))));
  return exact::to_double(coef) * std::pow(2.0 * std::numbers::pi, n - 3);
}

/// Equilateral volume divided by (2 pi)^{n-3}, exactly:
/// -(1/(2 (n-3)!)) sum_{k=0}^{floor(n/2)} (-1)^k C(n,k) (n-2k)^{n-3}.
inline mpq_class equilateral_volume_coefficient(int n) {
  if (n < 4) throw std::invalid_argument("equilateral_volume: n must be at least 4");
  const auto un = static_cast<unsigned long>(n);
  return mpq_class(exact::closure_alternating_sum(un)) / (2 * mpq_class(exact::factorial(un - 3)));
}

inline double equilateral_volume(int n) {
  return exact::to_double(equilateral_volume_coefficient(n)) * std::pow(2.0 * std::numbers::pi, n - 3);
}

/// C(2n, n) / 2^n, checked against (2n-1)!!/n!.
inline mpq_class half_space_volume(int n) {
  if (n < 1) throw std::invalid_argument("half_space_volume: n must be positive");
  const auto un = static_cast<unsigned long>(n);
  const mpq_class v(exact::binomial(2 * un, un), mpz_class(1) << static_cast<mp_bitcnt_t>(un));
  mpz_class dfact;
  mpz_2fac_ui(dfact.get_mpz_t(), 2 * un - 1);
  mpq_class check(dfact, exact::factorial(un));
  check.canonicalize();
  mpq_class canon = v;
  canon.canonicalize();
  if (canon != check) throw std::logic_error("half_space_volume: double-factorial identity failed");
  return canon;
}

/// E[|v_1 - v_{k+1}|^2] = k (n-k) / (n-1) for random equilateral n-gons.
inline mpq_class expected_squared_chord(int k, int n) {
  if (k < 2 || k > n - 2) throw std::out_of_range("expected_squared_chord: need 2 <= k <= n-2");
  mpq_class q(k * (n - k), n - 1);
  q.canonicalize();
  return q;
}

/// phi_n(l) = (2l/pi) int_0^inf y sin(l y) sinc(y)^n dy by Gauss-Kronrod
/// panels on [0, Y], Y chosen so that the tail bound
/// (2l/pi) Y^{2-n}/(n-2) is below tol.
inline double rayleigh_sinc_oracle(double l, int n, double tol = 1e-9) {
  if (n < 4) throw std::invalid_argument("rayleigh_sinc_oracle: n must be at least 4");
  if (!(l > 0.0 && l < n)) throw std::domain_error("rayleigh_sinc_oracle: need 0 < l < n");
  constexpr double kMaxY = 1e7;
  const double pref = 2.0 * l / std::numbers::pi;
  const double Y = std::pow(pref / (tol * (n - 2)), 1.0 / (n - 2));
  if (Y > kMaxY) {
    const double achieved = pref * std::pow(kMaxY, 2.0 - n) / (n - 2);
    throw std::runtime_error("rayleigh_sinc_oracle: tail bound " + std::to_string(achieved) +
                             " exceeds the requested tolerance");
  }
  auto f = [&](double y) {
    const double s = std::sin(y) / y;
    return y * std::sin(l * y) * std::pow(s, n);
  };
  const double width = std::numbers::pi / 2.0;
  double sum = 0.0;
  for (double a = 0.0; a < Y; a += width) {
    sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, std::min(a + width, Y), 3, 1e-13);
  }
  return pref * sum;
}

/// int_0^2 arccos((l^2-2)/2) l^k dl by quadrature (substituting
/// l = 2 cos(u/2)).
inline double arccos_moment(int k) {
  if (k < 0) throw std::invalid_argument("arccos_moment: k must be non-negative");
  auto f = [k](double u) { return u * std::pow(2.0 * std::cos(0.5 * u), k) * std::sin(0.5 * u); };
  double sum = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double a = j * std::numbers::pi / 4.0;
    sum += boost::math::quadrature::gauss<double, 64>::integrate(f, a, a + std::numbers::pi / 4.0);
  }
  return sum;
}

/// Closed form of arccos_moment: 2^{2k+1} k B(k/2+1, k/2) / (k+1)^2 for
/// k >= 1, and 4 for k = 0.
inline double arccos_moment_closed_form(int k) {
  if (k < 0) throw std::invalid_argument("arccos_moment_closed_form: k must be non-negative");
  if (k == 0) return 4.0;
  return std::ldexp(1.0, 2 * k + 1) * k * boost::math::beta(k / 2.0 + 1.0, k / 2.0) / ((k + 1.0) * (k + 1.0));
}

// Double-precision evaluations of the same alternating sums, kept to
// measure where naive evaluation breaks down.
namespace naive {

inline double end_to_end_pdf(double l, int n) {
  if (l >= n) return 0.0;
  auto S = [n](double x) {
    double acc = 0.0;
    for (int k = 0; k <= n - 1; ++k) {
      const double y = x + (n - 1) - 2.0 * k;
      if (y > 0.0) acc += ((k % 2) ? -1.0 : 1.0) * std::exp(std::lgamma(n) - std::lgamma(k + 1) - std::lgamma(n - k)) *
                             std::pow(y, n - 2);
    }
    return acc;
  };
  return l * (S(l - 1.0) - S(l + 1.0)) / (std::ldexp(1.0, n - 1) * std::tgamma(n - 1));
}

inline double c_n(int n) {
  double acc = 0.0;
  for (int k = 0; 2 * k <= n; ++k) {
    if (n - 2 * k == 0) continue;
    acc += ((k % 2) ? 1.0 : -1.0) * std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)) *
           std::pow(n - 2.0 * k, n - 3);
  }
  return acc / (std::ldexp(1.0, n + 1) * std::numbers::pi * std::tgamma(n - 2));
}

}  // namespace naive

}  // namespace polysample
