#include <cmath>
#include <set>

#include "doctest.h"
#include "infoq/errors.hpp"
#include "infoq/identities.hpp"
#include "infoq/io.hpp"

using namespace infoq;
using namespace infoq::identities;

namespace {

const SearchReport& find(const std::vector<SearchReport>& reports, const std::string& name) {
  for (const auto& r : reports)
    if (r.name == name) return r;
  throw std::runtime_error("no report named " + name);
}

}  // namespace

TEST_CASE("default suite") {
  const auto suite = default_suite();
  std::set<std::string> names;
  std::size_t always = 0, violation = 0;
  for (const auto& e : suite.entries) {
    CHECK(names.insert(e.name).second);
    (e.expected == Expect::Always ? always : violation) += 1;
  }
  CHECK(always >= 15);
  CHECK(violation == 3);

  const auto reports = check_suite(suite, 500, 1);
  for (const auto& r : reports) {
    INFO(format_report(r));
    CHECK(r.as_expected());
    if (r.expected == Expect::Always) CHECK(r.seeds_tried >= 500);
  }

  SUBCASE("witnesses replay from their serialized form") {
    for (std::size_t i = 0; i < suite.entries.size(); ++i) {
      const auto& r = reports[i];
      if (r.status != Status::Violated || suite.entries[i].native) continue;
      REQUIRE(r.witness);
      CHECK(r.gap > 1e-6);
      const auto reloaded = nlohmann::json::parse(r.witness->dump());
      const auto [lhs, rhs] = replay_witness(suite.entries[i], reloaded);
      CHECK(lhs == r.lhs);
      CHECK(rhs == r.rhs);
    }
  }
  SUBCASE("negative information gain is reported with a witness") {
    const auto& r = find(reports, "negative_information_gain");
    CHECK(r.status == Status::Violated);
    CHECK(r.lhs < -1e-6);
  }
}

TEST_CASE("search is deterministic in the seed") {
  const auto suite = default_suite();
  const auto a = check_suite(suite, 50, 42);
  const auto b = check_suite(suite, 50, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(to_json(a[i]).dump() == to_json(b[i]).dump());
}

TEST_CASE("suite files") {
  const auto suite = parse_suite(R"(# comment line
chain: H[X, Y] == H[X] + H[Y | X]   # expect: always

untied: H[y | X] != H[X, y] - H[X]  # expect: violation
I[X; Y] >= 0
false_claim: H[X] <= 0 # expect: always
)");
  REQUIRE(suite.entries.size() == 4);
  CHECK(suite.entries[0].name == "chain");
  CHECK(suite.entries[1].expected == Expect::Violation);
  CHECK(suite.entries[2].name == "line5");
  CHECK(suite.entries[2].expected == Expect::Always);

  const auto reports = check_suite(suite, 500, 3);
  CHECK(reports[0].status == Status::Held);
  CHECK(reports[1].status == Status::Violated);
  CHECK(reports[2].status == Status::Held);
  CHECK(reports[2].seeds_tried >= 500);
  CHECK(reports[3].status == Status::Violated);
  CHECK_FALSE(reports[3].as_expected());

  CHECK_THROWS_AS(parse_suite("a: H[X] >= 0\na: H[Y] >= 0"), ConfigError);
  CHECK_THROWS_AS(parse_suite("a: H[X] >= 0 # expect: sometimes"), ConfigError);
  CHECK_THROWS_AS(parse_suite("a: H[X]"), ConfigError);
  CHECK_THROWS_AS(parse_suite("a: H[X >= 0"), ConfigError);
  CHECK_THROWS_AS(parse_suite("# nothing here\n"), ConfigError);
}

TEST_CASE("three-cell witness for the untied decomposition") {
  const auto id = make_identity("untied", "H[y | X] != H[X, y] - H[X]", Expect::Violation);
  const nlohmann::json witness{{"distribution", infoq::to_json(three_cell_witness())}, {"bindings", {{"Y", "1"}}}};
  const auto [lhs, rhs] = replay_witness(id, witness);
  CHECK(std::abs(violation_gap(lhs, id.op, rhs) - std::log(2.0) / 3.0) < 1e-9);
}

TEST_CASE("violation gap") {
  using expr::CompareOp;
  CHECK(violation_gap(1.0, CompareOp::Eq, 3.0) == 2.0);
  CHECK(violation_gap(1.0, CompareOp::Ne, 3.0) == 2.0);
  CHECK(violation_gap(1.0, CompareOp::Le, 3.0) == -2.0);
  CHECK(violation_gap(1.0, CompareOp::Ge, 3.0) == 2.0);
}

TEST_CASE("counterexample witnesses") {
  const auto report = verify_paper_witnesses();
  REQUIRE(report.witness1.size() == 3);
  REQUIRE(report.witness2.size() == 4);
  CHECK(report.witness1[0].computed == doctest::Approx(std::log(1.5)).epsilon(1e-12));
  CHECK(report.witness1[1].computed == doctest::Approx(std::log(3.0 * std::cbrt(2.0) / 2.0)).epsilon(1e-12));
  CHECK(report.witness1[2].computed == doctest::Approx(std::log(2.0) / 3.0).epsilon(1e-12));
  // the printed pair, compared without regard to order
  const double a = report.witness2[0].computed, b = report.witness2[1].computed;
  const double large = std::log(6.0 / 5.0), small = std::log(2.0 * std::sqrt(3.0) * std::pow(5.0, 0.25) / 5.0);
  CHECK(std::abs(std::min(a, b) - small) < 1e-9);
  CHECK(std::abs(std::max(a, b) - large) < 1e-9);
  CHECK(std::abs(a - b) > 1e-3);
  CHECK(report.witness2[2].computed - report.witness2[3].computed == doctest::Approx(a - b).epsilon(1e-12));
  CHECK(report.permutation_invariant);
}
