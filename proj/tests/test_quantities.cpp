#include <cmath>
#include <numbers>

#include "doctest.h"
#include "infoq/errors.hpp"
#include "infoq/quantities.hpp"
#include "support.hpp"

using namespace infoq;
using infoq::testing::var;

namespace {

constexpr double kTol = 1e-9;
const double ln2 = std::numbers::ln2;

Term U(const std::string& n) { return Term::untied(n); }
Term T(const std::string& n, std::size_t o) { return Term::at(n, o); }

double H(const JointDistribution& d, TermList head, TermList given = {}) { return entropy(d, {head, given}); }
double I(const JointDistribution& d, TermList a, TermList b, TermList given = {}) {
  return mutual_info(d, {a, b}, given);
}

// Independent oracles: direct sums over the dense two-variable tensor.
double oracle_joint_entropy(const JointDistribution& d) {
  double h = 0.0;
  for (double p : d.probs()) h -= p > 0 ? p * std::log(p) : 0.0;
  return h;
}

double oracle_mi(const JointDistribution& d) {
  const std::size_t nx = d.variables()[0].size(), ny = d.variables()[1].size();
  std::vector<double> px(nx, 0.0), py(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      px[x] += d.probs()[x * ny + y];
      py[y] += d.probs()[x * ny + y];
    }
  double mi = 0.0;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      const double p = d.probs()[x * ny + y];
      if (p > 0) mi += p * std::log(p / (px[x] * py[y]));
    }
  return mi;
}

// X, Y1, Y2 binary; p(y1) = 1/2, p(x, y2 | y1=0) = 1/4, p(x | y2=0, y1=1) = 1/2,
// p(x=0 | y2=1, y1=1) = 1, p(y2 | y1=1) = 1/2.
JointDistribution chaining_witness() {
  // order X, Y1, Y2
  return {{var("X", 2), var("Y1", 2), var("Y2", 2)},
          {0.125, 0.125, 0.125, 0.25, 0.125, 0.125, 0.125, 0.0}};
}

}  // namespace

TEST_CASE("information content") {
  CHECK(information_content(1.0) == 0.0);
  CHECK(information_content(0.5) == doctest::Approx(ln2).epsilon(1e-15));
  CHECK(information_content(1.0 / std::numbers::e) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(information_content(0.5, LogBase::Bits) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(information_content(0.0), NonPositiveProbability);
  CHECK_THROWS_AS(information_content(-0.1), NonPositiveProbability);
}

TEST_CASE("entropy with tied and untied terms") {
  CHECK(H(testing::fair_coin(), {U("X")}) == doctest::Approx(ln2));
  CHECK(entropy(testing::fair_coin(), {{U("X")}, {}}, LogBase::Bits) == doctest::Approx(1.0));

  const auto d = testing::three_cell();
  CHECK(std::abs(H(d, {U("X")}, {T("Y", 1)})) < kTol);
  CHECK(H(d, {U("X")}) == doctest::Approx(std::log(3.0 * std::cbrt(2.0) / 2.0)).epsilon(1e-12));
  // H[y|X] = E_{p(x|y)} IC(p(y|x)) = IC(1/2); H[X,y] = IC(1/3)
  CHECK(H(d, {T("Y", 1)}, {U("X")}) == doctest::Approx(ln2).epsilon(1e-12));
  CHECK(H(d, {U("X"), T("Y", 1)}) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(H(d, {T("Y", 1)}) == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  SUBCASE("zero-probability tied outcome") {
    JointDistribution z({var("X", 2), var("Y", 2)}, {0.5, 0.0, 0.5, 0.0});
    CHECK_THROWS_AS(H(z, {U("X")}, {T("Y", 1)}), ZeroProbabilityEvent);
  }
  SUBCASE("query errors") {
    CHECK_THROWS_AS(H(d, {U("X"), U("X")}), InvalidQuery);
    CHECK_THROWS_AS(H(d, {U("X")}, {U("X")}), InvalidQuery);
    CHECK_THROWS_AS(H(d, {U("Q")}), UnknownVariable);
    CHECK_THROWS_AS(H(d, {T("Y", 5)}), DomainError);
    CHECK_THROWS_AS(H(d, {}), InvalidQuery);
  }
  SUBCASE("0 log 0 contributes nothing") {
    JointDistribution z({var("X", 3)}, {0.5, 0.5, 0.0});
    CHECK(H(z, {U("X")}) == doctest::Approx(ln2));
  }
}

TEST_CASE("entropy agrees with direct tensor sums") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto d = testing::random_distribution(rng, {"X", "Y"});
    CHECK(std::abs(H(d, {U("X"), U("Y")}) - oracle_joint_entropy(d)) < 1e-12);
    CHECK(std::abs(I(d, {U("X")}, {U("Y")}) - oracle_mi(d)) < 1e-12);
  }
}

TEST_CASE("cross-entropy and KL") {
  std::mt19937_64 rng(3);
  const auto p = testing::random_distribution(rng, {"X", "Y"}, {3, 2});
  const auto q = testing::random_distribution(rng, {"X", "Y"}, {3, 2});
  const Spec xy{{U("X"), U("Y")}, {}};

  CHECK(std::abs(cross_entropy(p, p, xy) - H(p, {U("X"), U("Y")})) < kTol);
  const UnnormalizedWeight qw(q);
  CHECK(std::abs(cross_entropy(p, qw.scaled(0.5), xy) - (cross_entropy(p, q, xy) + ln2)) < kTol);
  CHECK(std::abs(cross_entropy(p, qw.power(2.0), xy) - 2.0 * cross_entropy(p, q, xy)) < kTol);
  CHECK(std::abs(kl(p, p, xy)) < kTol);

  SUBCASE("KL(p || 2p) meets the Z_q bound with equality") {
    double oracle = 0.0;
    for (double c : p.probs()) oracle += c * std::log(c / (2.0 * c));
    const double got = kl(p, UnnormalizedWeight(p).scaled(2.0), xy);
    CHECK(std::abs(got - oracle) < kTol);
    CHECK(std::abs(got + ln2) < kTol);
  }

  SUBCASE("conditional cross-entropy averages over head and given") {
    const Spec x_given_y{{U("X")}, {U("Y")}};
    CHECK(std::abs(cross_entropy(p, q, x_given_y, x_given_y) - cross_entropy(p, q, xy, x_given_y)) < kTol);
    const double kl_cond = kl(p, q, x_given_y, x_given_y);
    const double kl_joint = kl(p, q, xy, x_given_y);
    CHECK(std::abs(kl_cond - (cross_entropy(p, q, x_given_y) - H(p, {U("X")}, {U("Y")}))) < kTol);
    CHECK(std::abs(kl_joint - (cross_entropy(p, q, xy, x_given_y) - H(p, {U("X"), U("Y")}))) < kTol);
    CHECK(std::abs(kl_cond - kl_joint) > 1e-3);
  }

  SUBCASE("tied cross-entropy") {
    // CE(p(X|y), q(X|y)) = E_{p(x|y)} IC(q(x|y))
    const Spec s{{U("X")}, {T("Y", 1)}};
    const auto pc = condition(p, {{"Y", 1}});
    const auto qc = condition(q, {{"Y", 1}});
    double oracle = 0.0;
    for (std::size_t x = 0; x < pc.cell_count(); ++x) oracle -= pc.probs()[x] * std::log(qc.probs()[x]);
    CHECK(std::abs(cross_entropy(p, q, s) - oracle) < kTol);
  }

  SUBCASE("support mismatch") {
    JointDistribution z({var("X", 2)}, {1.0, 0.0});
    CHECK_THROWS_AS(cross_entropy(testing::fair_coin(), z, {{U("X")}, {}}), SupportMismatch);
  }
  SUBCASE("q variables must be averaged over or tied") {
    CHECK_THROWS_AS(cross_entropy(p, q, {{U("X")}, {}}, {{U("X")}, {U("Y")}}), InvalidQuery);
    CHECK_NOTHROW(cross_entropy(p, q, {{U("X")}, {}}, {{U("X")}, {T("Y", 0)}}));
  }
  SUBCASE("evaluate requires q for CE") {
    Query query{QueryKind::CrossEntropy, {{U("X")}}, {}, std::nullopt};
    CHECK_THROWS_AS(evaluate(p, nullptr, query), MissingQDistribution);
  }
}

TEST_CASE("mutual information") {
  const auto indep = product(testing::fair_coin("X"), testing::fair_coin("Y"));
  CHECK(std::abs(I(indep, {U("X")}, {U("Y")})) < kTol);

  SUBCASE("surprise chaining counterexample") {
    const auto d = chaining_witness();
    // the sides whose difference breaks the chain
    const double i_y1_X = I(d, {T("Y1", 1)}, {U("X")});
    const double pointwise_avg = expectation(d, {"X"}, {{"Y1", 1}, {"Y2", 1}}, [&](const Assignment& a) {
      return I(d, {T("Y1", 1)}, {T("X", *a.find("X"))});
    });
    CHECK(i_y1_X == doctest::Approx(std::log(2.0 * std::sqrt(3.0) * std::pow(5.0, 0.25) / 5.0)).epsilon(1e-12));
    CHECK(pointwise_avg == doctest::Approx(std::log(6.0 / 5.0)).epsilon(1e-12));

    const double lhs = I(d, {T("Y1", 1), T("Y2", 1)}, {U("X")});
    const double rhs = i_y1_X + I(d, {T("Y2", 1)}, {U("X")}, {T("Y1", 1)});
    CHECK(lhs == doctest::Approx(std::log(8.0 / 5.0)).epsilon(1e-12));
    CHECK(rhs == doctest::Approx(0.3230569630202057).epsilon(1e-12));
    // information gain does chain on the same distribution
    const double ig = I(d, {U("X")}, {T("Y1", 1), T("Y2", 1)});
    CHECK(std::abs(ig - (I(d, {U("X")}, {T("Y1", 1)}) + I(d, {U("X")}, {T("Y2", 1)}, {T("Y1", 1)}))) < kTol);
  }

  SUBCASE("surprise is the KL of the posterior from the prior") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
      const auto d = testing::random_distribution(rng, {"X", "Y", "Z"});
      const auto y = testing::random_outcome(rng, d, "Y");
      const double surprise = I(d, {T("Y", y)}, {U("X")});
      CHECK(std::abs(surprise - kl(d, d, {{U("X")}, {T("Y", y)}}, {{U("X")}, {}})) < kTol);
    }
  }
}

TEST_CASE("triple mutual information") {
  SUBCASE("independent triple") {
    const auto d = product(product(testing::fair_coin("X"), testing::fair_coin("Y")), testing::fair_coin("Z"));
    CHECK(std::abs(triple_mi(d, {{U("X")}, {U("Y")}, {U("Z")}})) < kTol);
  }
  SUBCASE("XOR triple") {
    // Z = X xor Y; brute-force over the 8 cells gives I[X;Y] = 0, I[X;Y|Z] = ln 2
    std::vector<double> cells(8, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) cells[x * 4 + y * 2 + (x ^ y)] = 0.25;
    JointDistribution d({var("X", 2), var("Y", 2), var("Z", 2)}, cells);
    CHECK(triple_mi(d, {{U("X")}, {U("Y")}, {U("Z")}}) == doctest::Approx(-ln2).epsilon(1e-12));
  }
  SUBCASE("averaging I[X;Y;z] over p(z) gives I[X;Y;Z]") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 50; ++i) {
      const auto d = testing::random_distribution(rng, {"X", "Y", "Z"});
      const double avg = expectation(d, {"Z"}, {}, [&](const Assignment& a) {
        return triple_mi(d, {{U("X")}, {U("Y")}, {T("Z", *a.find("Z"))}});
      });
      CHECK(std::abs(avg - triple_mi(d, {{U("X")}, {U("Y")}, {U("Z")}})) < kTol);
    }
  }
  CHECK_THROWS_AS(triple_mi(testing::three_cell(), {{U("X")}, {U("Y")}}), InvalidQuery);
}

TEST_CASE("diagram") {
  SUBCASE("independent X, Y") {
    JointDistribution x({var("X", 3)}, {0.2, 0.3, 0.5});
    JointDistribution y({var("Y", 2)}, {0.4, 0.6});
    const auto t = diagram(product(x, y), {{"Y", 1}});
    CHECK(std::abs(t[3].value) < kTol);
    CHECK(std::abs(t[4].value) < kTol);
    CHECK(std::abs(t[5].value - t[2].value) < kTol);
  }
  SUBCASE("three-cell, y = 1") {
    const auto t = diagram(testing::three_cell(), {{"Y", 1}});
    CHECK(t[7].label == "E_{p(x|y)}H[x]");
    CHECK(t[7].value == doctest::Approx(std::log(1.5)).epsilon(1e-12));
    CHECK(t[2].value == doctest::Approx(std::log(3.0 * std::cbrt(2.0) / 2.0)).epsilon(1e-12));
  }
  SUBCASE("additive relationships") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 200; ++i) {
      const auto d = testing::random_distribution(rng, {"X", "Y"});
      const auto t = diagram(d, {{"Y", testing::random_outcome(rng, d, "Y")}});
      const double hxy = t[0].value, hy = t[1].value, hx = t[2].value, ig = t[3].value, sp = t[4].value,
                   hx_y = t[5].value, hy_x = t[6].value, ehx = t[7].value;
      CHECK(std::abs(hxy - (hx_y + hy)) < kTol);
      CHECK(std::abs(hxy - (hy_x + ehx)) < kTol);
      CHECK(std::abs(ig - (hx - hx_y)) < kTol);
      CHECK(std::abs(sp - (hy - hy_x)) < kTol);
      CHECK(std::abs(sp - (ehx - hx_y)) < kTol);
    }
  }
  CHECK_THROWS_AS(diagram(testing::three_cell(), {}), InvalidQuery);
}

TEST_CASE("identities over random distributions") {
  std::mt19937_64 rng(2024);
  for (int seed = 0; seed < 250; ++seed) {
    const auto d = testing::random_distribution(rng, {"X", "Y", "Z"});
    const auto x = testing::random_outcome(rng, d, "X");
    const auto y = testing::random_outcome(rng, d, "Y");
    const auto z = testing::random_outcome(rng, d, "Z");

    // chain rule and symmetry
    CHECK(std::abs(H(d, {U("X"), U("Y")}) - (H(d, {U("X")}) + H(d, {U("Y")}, {U("X")}))) < kTol);
    CHECK(std::abs(I(d, {U("X")}, {U("Y")}) - I(d, {U("Y")}, {U("X")})) < kTol);
    CHECK(std::abs(I(d, {T("X", x)}, {T("Y", y)}) - I(d, {T("Y", y)}, {T("X", x)})) < kTol);

    // expectations over tied variables recover the untied quantities
    const double mi = I(d, {U("X")}, {U("Y")});
    const auto over_y = [&](auto f) { return expectation(d, {"Y"}, {}, f); };
    CHECK(std::abs(mi - over_y([&](const Assignment& a) { return I(d, {U("X")}, {T("Y", *a.find("Y"))}); })) < kTol);
    CHECK(std::abs(mi - over_y([&](const Assignment& a) { return I(d, {T("Y", *a.find("Y"))}, {U("X")}); })) < kTol);
    CHECK(std::abs(mi - expectation(d, {"X", "Y"}, {}, [&](const Assignment& a) {
                     return I(d, {T("X", *a.find("X"))}, {T("Y", *a.find("Y"))});
                   })) < kTol);
    const double hxy = H(d, {U("X"), U("Y")});
    CHECK(std::abs(hxy - expectation(d, {"X"}, {}, [&](const Assignment& a) {
                     return H(d, {T("X", *a.find("X")), U("Y")});
                   })) < kTol);
    CHECK(std::abs(hxy - over_y([&](const Assignment& a) { return H(d, {U("X"), T("Y", *a.find("Y"))}); })) < kTol);

    // observed conditional identities
    CHECK(std::abs(H(d, {U("X")}, {T("Y", y)}) - (H(d, {U("X"), T("Y", y)}) - H(d, {T("Y", y)}))) < kTol);
    const double ehx = expectation(d, {"X"}, {{"Y", y}}, [&](const Assignment& a) { return H(d, {T("X", *a.find("X"))}); });
    CHECK(std::abs(H(d, {T("Y", y)}, {U("X")}) - (H(d, {U("X"), T("Y", y)}) - ehx)) < kTol);

    // chaining: information gain over tied outcomes, both mixed quantities over
    // untied variables, and the fully pointwise case
    CHECK(std::abs(I(d, {U("X")}, {T("Y", y), T("Z", z)}) -
                   (I(d, {U("X")}, {T("Y", y)}) + I(d, {U("X")}, {T("Z", z)}, {T("Y", y)}))) < kTol);
    CHECK(std::abs(I(d, {U("X"), U("Z")}, {T("Y", y)}) -
                   (I(d, {U("X")}, {T("Y", y)}) + I(d, {U("Z")}, {T("Y", y)}, {U("X")}))) < kTol);
    CHECK(std::abs(I(d, {T("Y", y)}, {U("X"), U("Z")}) -
                   (I(d, {T("Y", y)}, {U("X")}) + I(d, {T("Y", y)}, {U("Z")}, {U("X")}))) < kTol);
    CHECK(std::abs(I(d, {T("X", x)}, {T("Y", y), T("Z", z)}) -
                   (I(d, {T("X", x)}, {T("Y", y)}) + I(d, {T("X", x)}, {T("Z", z)}, {T("Y", y)}))) < kTol);

    // inequalities
    const double hx = H(d, {U("X")}), hy = H(d, {T("Y", y)}), hy_X = H(d, {T("Y", y)}, {U("X")});
    const double hX_y = H(d, {U("X")}, {T("Y", y)}), sp = I(d, {T("Y", y)}, {U("X")});
    CHECK(mi >= -kTol);
    CHECK(hx >= H(d, {U("X")}, {U("Y")}) - kTol);
    CHECK(hx >= -kTol);
    CHECK(mi <= hx + kTol);
    CHECK(sp >= -kTol);
    CHECK(hy >= hy_X - kTol);
    CHECK(ehx >= hX_y - kTol);
    CHECK(hy_X >= -kTol);
    CHECK(sp <= hy + kTol);
    CHECK(sp <= ehx + kTol);
  }
}

TEST_CASE("surprise vanishes exactly under independence") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    const auto px = testing::random_distribution(rng, {"X"});
    const auto py = testing::random_distribution(rng, {"Y"});
    const auto d = product(px, py);
    const auto y = testing::random_outcome(rng, d, "Y");
    CHECK(std::abs(I(d, {T("Y", y)}, {U("X")})) < kTol);
    // a dependent joint with the same marginal on Y has strictly positive surprise somewhere
    const auto dep = testing::random_distribution(rng, {"X", "Y"});
    double best = 0.0;
    for (std::size_t o = 0; o < dep.variable("Y").size(); ++o) best = std::max(best, I(dep, {T("Y", o)}, {U("X")}));
    CHECK(best > 1e-6);
  }
}

TEST_CASE("cross-entropy algebra and Z_q bounds") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  std::uniform_real_distribution<double> mass(0.1, 5.0);
  for (int i = 0; i < 200; ++i) {
    const auto p1 = testing::random_distribution(rng, {"X", "Y"}, {2, 3});
    const auto p2 = testing::random_distribution(rng, {"X", "Y"}, {2, 3});
    const auto qn = testing::random_distribution(rng, {"X", "Y"}, {2, 3});
    const auto q = UnnormalizedWeight(qn).scaled(mass(rng));
    const auto q2 = UnnormalizedWeight(testing::random_distribution(rng, {"X", "Y"}, {2, 3})).scaled(mass(rng));
    const double alpha = unit(rng);
    const Spec s{{U("X"), U("Y")}, {}};

    const double mixed = cross_entropy(mix(p1, p2, alpha), q, s);
    CHECK(std::abs(mixed - (alpha * cross_entropy(p1, q, s) + (1 - alpha) * cross_entropy(p2, q, s))) < kTol);
    CHECK(std::abs(mixed - (cross_entropy(p1, q.power(alpha), s) + cross_entropy(p2, q.power(1 - alpha), s))) < kTol);
    CHECK(std::abs(cross_entropy(p1, q.times(q2), s) - (cross_entropy(p1, q, s) + cross_entropy(p1, q2, s))) < kTol);
    CHECK(std::abs(cross_entropy(p1, q.scaled(alpha), s) - (cross_entropy(p1, q, s) + information_content(alpha))) <
          kTol);

    const double ic_z = information_content(q.total_mass());
    CHECK(cross_entropy(p1, q, s) >= H(p1, {U("X"), U("Y")}) + ic_z - kTol);
    CHECK(kl(p1, q, s) >= ic_z - kTol);
    CHECK(kl(p1, qn, s) >= -kTol);
    // equality exactly when q / Z_q = p
    const auto tight = UnnormalizedWeight(p1).scaled(q.total_mass());
    CHECK(std::abs(kl(p1, tight, s) - ic_z) < kTol);
    CHECK(kl(p1, q, s) - ic_z > 1e-9);
  }
}
