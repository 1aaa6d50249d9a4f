#pragma once

// Generalized counting process: a Levy counting process that jumps by
// 1, 2, ..., k with independent rates lambda_1, ..., lambda_k. The Poisson
// process is the k = 1 case. Multivariate variant is a vector of independent
// components.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mgcp/compositions.hpp"
#include "mgcp/special.hpp"

namespace mgcp {

struct GcpParams {
  std::vector<double> rates;  // rates[j-1] drives jumps of size j

  int k() const { return static_cast<int>(rates.size()); }
  double total_rate() const {
    double s = 0.0;
    for (double r : rates) s += r;
    return s;
  }
  // sum_j j * lambda_j and sum_j j^2 * lambda_j: per-unit-time mean and
  // variance of the jump contribution.
  double mean_rate() const {
    double s = 0.0;
    for (std::size_t j = 0; j < rates.size(); ++j)
      s += static_cast<double>(j + 1) * rates[j];
    return s;
  }
  double var_rate() const {
    double s = 0.0;
    for (std::size_t j = 0; j < rates.size(); ++j)
      s += static_cast<double>((j + 1) * (j + 1)) * rates[j];
    return s;
  }

  void validate() const {
    if (rates.empty() || rates.size() > kMaxCompositionParts)
      throw std::invalid_argument(
          "GcpParams: need between 1 and " +
          std::to_string(kMaxCompositionParts) + " jump rates");
    for (double r : rates)
      if (!(r > 0.0))
        throw std::invalid_argument("GcpParams: all rates must be > 0");
  }
};

struct MultiGcpParams {
  std::vector<GcpParams> components;

  int q() const { return static_cast<int>(components.size()); }
  void validate() const {
    if (components.empty())
      throw std::invalid_argument("MultiGcpParams: need at least 1 component");
    for (const auto& c : components) c.validate();
  }
};

// P{M(t) = n}: sum over Omega(k, n) of prod_j (lambda_j t)^{n_j}
// e^{-lambda_j t} / n_j!, assembled in log space per composition.
inline double gcp_pmf(const GcpParams& params, long long n, double t) {
  params.validate();
  if (!(t >= 0.0)) throw std::domain_error("gcp_pmf: t must be >= 0");
  if (n < 0) return 0.0;
  if (t == 0.0) return n == 0 ? 1.0 : 0.0;
  const double base = -t * params.total_rate();
  std::vector<double> log_rate(params.rates.size());
  for (std::size_t j = 0; j < params.rates.size(); ++j)
    log_rate[j] = std::log(params.rates[j] * t);
  KahanSum acc;
  for_each_composition(
      params.k(), static_cast<int>(n),
      [&](const std::vector<int>& parts, int) {
        double lg = base;
        for (std::size_t j = 0; j < parts.size(); ++j)
          if (parts[j] != 0)
            lg += parts[j] * log_rate[j] - log_gamma(parts[j] + 1.0);
        acc.add(std::exp(lg));
      });
  return acc.value();
}

inline double multi_gcp_pmf(const MultiGcpParams& params,
                            std::span<const long long> n, double t) {
  if (n.size() != params.components.size())
    throw std::invalid_argument(
        "multi_gcp_pmf: state dimension does not match component count");
  double p = 1.0;
  for (std::size_t i = 0; i < n.size(); ++i)
    p *= gcp_pmf(params.components[i], n[i], t);
  return p;
}

// E u^{M(t)} = exp(-t sum_j lambda_j (1 - u^j)).
inline double gcp_pgf(const GcpParams& params, double u, double t) {
  params.validate();
  if (!(t >= 0.0)) throw std::domain_error("gcp_pgf: t must be >= 0");
  if (!(std::fabs(u) <= 1.0))
    throw std::domain_error("gcp_pgf: |u| must be <= 1");
  double expo = 0.0;
  for (std::size_t j = 0; j < params.rates.size(); ++j)
    expo += params.rates[j] * (1.0 - std::pow(u, static_cast<double>(j + 1)));
  return std::exp(-t * expo);
}

// Levy measure: an atom of mass lambda_j at each jump size j.
inline std::vector<std::pair<int, double>> gcp_levy_measure(
    const GcpParams& params) {
  params.validate();
  std::vector<std::pair<int, double>> atoms;
  atoms.reserve(params.rates.size());
  for (std::size_t j = 0; j < params.rates.size(); ++j)
    atoms.emplace_back(static_cast<int>(j + 1), params.rates[j]);
  return atoms;
}

inline std::pair<double, double> gcp_mean_var(const GcpParams& params,
                                              double t) {
  params.validate();
  if (!(t >= 0.0)) throw std::domain_error("gcp_mean_var: t must be >= 0");
  return {t * params.mean_rate(), t * params.var_rate()};
}

}  // namespace mgcp
