#include "infoq/stirling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "infoq/errors.hpp"

namespace infoq::stirling {

namespace {

// -count * log(p), with 0 * log(anything) = 0.
double weighted_ic(std::uint64_t count, double p) {
  if (count == 0) return 0.0;
  if (p <= 0.0) return std::numeric_limits<double>::infinity();
  return -static_cast<double>(count) * std::log(p);
}

}  // namespace

double log_binomial_exact(std::uint64_t n, std::uint64_t r, LogBase base) {
  if (r > n) throw DomainError("r = " + std::to_string(r) + " exceeds n = " + std::to_string(n));
  const std::uint64_t k_max = std::min(r, n - r);
  const double rest = static_cast<double>(n - k_max);
  // Neumaier summation; every term is positive.
  double sum = 0.0, carry = 0.0;
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    const double term = std::log1p(rest / static_cast<double>(k));
    const double t = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return in_base(sum + carry, base);
}

StirlingReport stirling_bound(const StirlingQuery& q, LogBase base) {
  if (q.n == 0) throw DomainError("n must be positive");
  if (q.r > q.n) throw DomainError("r = " + std::to_string(q.r) + " exceeds n = " + std::to_string(q.n));
  const double rho = q.rho.value_or(static_cast<double>(q.r) / static_cast<double>(q.n));
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("rho must lie in [0, 1]");

  StirlingReport out;
  out.exact = log_binomial_exact(q.n, q.r);
  out.bound = weighted_ic(q.r, rho) + weighted_ic(q.n - q.r, 1.0 - rho);
  out.error = out.bound - out.exact;
  out.error_bound = std::log(static_cast<double>(q.n));
  out.exact = in_base(out.exact, base);
  out.bound = in_base(out.bound, base);
  out.error = in_base(out.error, base);
  out.error_bound = in_base(out.error_bound, base);
  return out;
}

}  // namespace infoq::stirling
