#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "infoq/dist.hpp"
#include "infoq/expr.hpp"
#include "json.hpp"

namespace infoq::identities {

enum class Expect { Always, Violation };
enum class Status { Held, Violated };

// Shape of the random tensors drawn for each sample.
struct GeneratorSpec {
  std::size_t min_variables = 2;
  std::size_t max_variables = 4;
  std::size_t min_support = 2;
  std::size_t max_support = 4;
  double floor = 1e-3;
};

// One evaluated sample of a native check.
struct NativeSample {
  double lhs = 0.0;
  double rhs = 0.0;
  JointDistribution witness;
};

using NativeCheck = std::function<NativeSample(std::mt19937_64&, const GeneratorSpec&)>;

// An identity is either a comparison expression or a native check (for
// algebra the expression grammar cannot state, such as mixtures of p).
struct Identity {
  std::string name;
  std::string text;
  expr::Expression comparison;
  expr::CompareOp op = expr::CompareOp::Eq;
  NativeCheck native;
  Expect expected = Expect::Always;
};

Identity make_identity(std::string name, const std::string& text, Expect expected);
Identity make_native(std::string name, std::string description, expr::CompareOp op, NativeCheck check);

struct IdentitySuite {
  std::vector<Identity> entries;
  GeneratorSpec generator;
};

// The built-in suite: every identity and inequality of the quantities module
// plus the three non-identities.
IdentitySuite default_suite();

// "name: expression  # expect: always|violation" per line; blank lines and
// lines starting with '#' are skipped; the name prefix is optional and the
// directive defaults to always. Throws ConfigError / ParseError (with the line
// number in the message).
IdentitySuite parse_suite(const std::string& text);
IdentitySuite load_suite(const std::string& path);

struct SearchReport {
  std::string name;
  std::string text;
  Expect expected = Expect::Always;
  Status status = Status::Held;
  // The violating sample, or for Held the sample closest to violation.
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  std::size_t seeds_tried = 0;
  std::size_t skipped = 0;
  // {"distribution": ..., "bindings": {...}, "q": ...} when violated.
  std::optional<nlohmann::json> witness;

  // Held for Always entries, Violated for Violation entries.
  bool as_expected() const { return (expected == Expect::Always) == (status == Status::Held); }
};

// Amount by which a sample counts against the stated relation: |l - r| for ==
// and != (for != this is the distance separating the two sides), l - r for <=,
// r - l for >=.
double violation_gap(double lhs, expr::CompareOp op, double rhs);

// A Violation entry is witnessed by a sample with gap > 1e-6 (for != that is
// the comparison holding); an Always entry is violated by any sample on which
// its comparison is false.
std::vector<SearchReport> check_suite(const IdentitySuite& suite, std::size_t seeds, std::uint64_t rng_seed);

// Re-evaluates a serialized witness. Returns {lhs, rhs}.
std::pair<double, double> replay_witness(const Identity& identity, const nlohmann::json& witness);

nlohmann::json to_json(const SearchReport& r);
std::string format_report(const SearchReport& r);

struct PaperValue {
  std::string label;
  double computed = 0.0;
  double expected = 0.0;
};

struct PaperReport {
  // Three-cell witness: E_{p(x|y=1)}H[x], H[X], then the gap of
  // H[y|X] != H[X,y] - H[X].
  std::vector<PaperValue> witness1;
  // Chaining witness: the two sub-terms as printed, then both full sides.
  std::vector<PaperValue> witness2;
  // Every value above recomputed with the variables in reverse order.
  bool permutation_invariant = false;
};

JointDistribution three_cell_witness();
// Order X, Y1, Y2 with p(y2 | y1=1) uniform.
JointDistribution chaining_witness();

// Throws MismatchAgainstPaper when any value is off by more than 1e-9.
PaperReport verify_paper_witnesses();

}  // namespace infoq::identities
