#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "infoq/dist.hpp"
#include "infoq/quantities.hpp"

namespace infoq::expr {

// A variable reference as written. Uppercase names are untied; lowercase names
// are tied, either to the literal after "=" or to a caller-supplied binding.
struct TermRef {
  std::string name;
  std::optional<std::string> outcome;

  bool tied() const;
  friend bool operator==(const TermRef&, const TermRef&) = default;
};

using TermRefs = std::vector<TermRef>;

// p(head | given) or q(head | given).
struct DistRef {
  char which = 'p';
  TermRefs head;
  TermRefs given;

  friend bool operator==(const DistRef&, const DistRef&) = default;
};

enum class NodeKind {
  Entropy,       // H[groups[0] | given]
  CrossEntropy,  // CE[dists[0] || dists[1]]
  KL,            // KL[dists[0] || dists[1]]
  MutualInfo,    // I[groups[0]; groups[1]; ... | given]
  InfoContent,   // IC[number] or IC[dists[0]]
  Scalar,        // number
  Sum,           // children[0] + children[1]
  Diff,          // children[0] - children[1]
  Scaled,        // number * children[0]
  Expectation,   // E_{dists[0]}[children[0]]
  Comparison,    // children[0] op children[1]
};

enum class CompareOp { Eq, Le, Ge, Ne };

struct Expression {
  NodeKind kind = NodeKind::Scalar;
  std::vector<TermRefs> groups;
  TermRefs given;
  std::vector<DistRef> dists;
  double number = 0.0;
  CompareOp op = CompareOp::Eq;
  std::vector<Expression> children;

  friend bool operator==(const Expression&, const Expression&) = default;
};

// Throws ParseError (offset of the failure, expected tokens).
Expression parse(std::string_view text);

// Canonical text; parse(print(e)) == e for every tree the parser can produce.
std::string print(const Expression& e);
std::string print(CompareOp op);

struct Context {
  const JointDistribution* p = nullptr;
  const UnnormalizedWeight* q = nullptr;
  Assignment bindings;
  LogBase base = LogBase::Nats;
};

using Value = std::variant<double, bool>;

// Comparisons yield bool, everything else a number in ctx.base.
Value evaluate(const Expression& e, const Context& ctx);
// Throws InvalidQuery when `e` is a comparison.
double evaluate_number(const Expression& e, const Context& ctx);

// The verdict of `op` on already evaluated sides.
bool compare(double lhs, CompareOp op, double rhs);

// Name lookup used by the evaluator: exact match first, then a unique
// case-insensitive match. Throws UnknownVariable.
const Variable& resolve_variable(const TensorShape& shape, std::string_view name);
// Outcome lookup: support label first, then a plain integer index.
std::size_t resolve_outcome(const Variable& v, std::string_view outcome);

// Turns "name=outcome" pairs (e.g. from --observe) into an Assignment on `shape`.
Assignment resolve_bindings(const TensorShape& shape,
                            const std::vector<std::pair<std::string, std::string>>& pairs);

}  // namespace infoq::expr
