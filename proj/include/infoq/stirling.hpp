#pragma once

#include <cstdint>
#include <optional>

#include "infoq/quantities.hpp"

namespace infoq::stirling {

struct StirlingQuery {
  std::uint64_t n = 1;
  std::uint64_t r = 0;
  // Success probability; r / n when absent.
  std::optional<double> rho;
};

struct StirlingReport {
  double exact = 0.0;        // log C(n, r)
  double bound = 0.0;        // -r log rho - (n - r) log(1 - rho)
  double error = 0.0;        // bound - exact
  double error_bound = 0.0;  // log n
};

// log C(n, r) as a compensated sum of log1p((n - r') / k), k = 1..r',
// r' = min(r, n - r). Throws DomainError unless r <= n.
double log_binomial_exact(std::uint64_t n, std::uint64_t r, LogBase base = LogBase::Nats);

// 0 log 0 is taken as 0 at r = 0 and r = n; a rho of exactly 0 or 1 against
// a nonzero count gives an infinite bound. Throws DomainError for n = 0,
// r > n or rho outside [0, 1].
StirlingReport stirling_bound(const StirlingQuery& q, LogBase base = LogBase::Nats);

}  // namespace infoq::stirling
