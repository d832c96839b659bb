#include "loopqr/gauss_noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace loopqr {

double squeezing_to_variance(double s_db) {
  if (!std::isfinite(s_db)) throw std::domain_error("squeezing_to_variance: s must be finite");
  return 0.5 * std::pow(10.0, -s_db / 10.0);
}

double variance_to_squeezing(double delta2) {
  if (!(delta2 > 0.0)) throw std::domain_error("variance_to_squeezing: delta2 must be positive");
  return -10.0 * std::log10(2.0 * delta2);
}

double loss_to_shift_variance(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::domain_error("loss_to_shift_variance: eta must lie in [0, 1]");
  return 1.0 - eta;
}

double cc_shift_variance(double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::domain_error("cc_shift_variance: eta must lie in (0, 1]");
  return (1.0 - eta) / eta;
}

double stripe_error_prob(double sigma2_tot) {
  if (!(sigma2_tot >= 0.0)) throw std::domain_error("stripe_error_prob: negative variance");
  if (sigma2_tot == 0.0) return 0.0;

  const double root_pi = std::sqrt(std::numbers::pi);
  const double inv = 1.0 / std::sqrt(2.0 * sigma2_tot);

  // Stripes fade like the Gaussian tail; k_max ~ 6 sigma covers everything,
  // but keep doubling until the first omitted stripe provably holds < 1e-15.
  long long k_max = std::max<long long>(
      3, static_cast<long long>(std::ceil(6.0 * std::sqrt(sigma2_tot) / root_pi)));
  while (std::erfc((2.0 * static_cast<double>(k_max + 1) + 0.5) * root_pi * inv) >= 1e-15)
    k_max *= 2;

  // P(X in [a,b]) + mirror image = erfc(a/(sigma sqrt2)) - erfc(b/(sigma sqrt2));
  // erfc pairs instead of erf differences to dodge cancellation far out.
  double total = 0.0;
  for (long long k = 0; k <= k_max; ++k) {
    const double a = (2.0 * static_cast<double>(k) + 0.5) * root_pi;
    const double b = (2.0 * static_cast<double>(k) + 1.5) * root_pi;
    total += std::erfc(a * inv) - std::erfc(b * inv);
  }
  return total;
}

}  // namespace loopqr
