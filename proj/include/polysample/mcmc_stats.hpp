#pragma once

// Initial positive sequence (IPS) estimate of the asymptotic variance of a
// Markov chain average, and the resulting 95% confidence interval.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace polysample {

/// Running sum with Neumaier compensation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double sample_mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("sample_mean: empty series");
  CompensatedSum s;
  for (double v : x) s.add(v);
  return s.value() / static_cast<double>(x.size());
}

namespace detail {
inline double autocovariance_about(std::span<const double> x, double mean, std::size_t k) {
  const std::size_t m = x.size();
  CompensatedSum s;
  for (std::size_t i = 0; i + k < m; ++i) s.add((x[i] - mean) * (x[i + k] - mean));
  return s.value() / static_cast<double>(m);
}
}  // namespace detail

/// Lag-k autocovariance with the 1/m normalization (not 1/(m-k)).
inline double autocovariance(std::span<const double> x, std::size_t k) {
  if (k >= x.size()) throw std::out_of_range("autocovariance: lag must be below the series length");
  return detail::autocovariance_about(x, sample_mean(x), k);
}

struct IpsSummary {
  double mean = 0.0;
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  std::vector<double> Gamma;  ///< Gamma_1 .. Gamma_N, all strictly positive
  std::size_t N = 0;
  double sigma_sq = 0.0;      ///< clamped at 0
  double half_width = 0.0;    ///< 1.96 sigma / sqrt(m)
  std::size_t m = 0;
  bool clamped = false;       ///< raw estimate was negative

  double sigma() const { return std::sqrt(sigma_sq); }
};

/// sigma^2 = gamma_0 + 2 gamma_1 + 2 sum_{k=1}^N Gamma_k with
/// Gamma_k = gamma_{2k} + gamma_{2k+1}, N the last index before the first
/// non-positive Gamma_k. Lags at or beyond m count as zero.
inline IpsSummary ips_variance(std::span<const double> x) {
  const std::size_t m = x.size();
  if (m < 4) throw std::invalid_argument("ips_variance: need at least 4 values");
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("ips_variance: non-finite value");
  }
  IpsSummary s;
  s.m = m;
  s.mean = sample_mean(x);
  s.gamma0 = detail::autocovariance_about(x, s.mean, 0);
  s.gamma1 = detail::autocovariance_about(x, s.mean, 1);

  auto lag = [&](std::size_t k) {
    return k < m ? detail::autocovariance_about(x, s.mean, k) : 0.0;
  };
  CompensatedSum tail;
  for (std::size_t k = 1; 2 * k < m; ++k) {
    const double G = lag(2 * k) + lag(2 * k + 1);
    if (!(G > 0.0)) break;
    s.Gamma.push_back(G);
    tail.add(G);
  }
  s.N = s.Gamma.size();
  double sigma_sq = s.gamma0 + 2.0 * s.gamma1 + 2.0 * tail.value();
  if (sigma_sq < 0.0) {
    sigma_sq = 0.0;
    s.clamped = true;
  }
  s.sigma_sq = sigma_sq;
  s.half_width = 1.96 * std::sqrt(sigma_sq) / std::sqrt(static_cast<double>(m));
  return s;
}

inline std::pair<double, double> confidence_interval(const IpsSummary& s) {
  return {s.mean - s.half_width, s.mean + s.half_width};
}

inline bool covers(const IpsSummary& s, double value) {
  const auto [lo, hi] = confidence_interval(s);
  return lo <= value && value <= hi;
}

/// Report fields: mean, sigma, half_width_95, N, m, clamped.
inline nlohmann::json to_json(const IpsSummary& s) {
  return nlohmann::json{{"mean", s.mean},   {"sigma", s.sigma()}, {"half_width_95", s.half_width},
                        {"N", s.N},         {"m", s.m},           {"clamped", s.clamped}};
}

}  // namespace polysample
