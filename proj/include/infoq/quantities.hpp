#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "infoq/dist.hpp"

namespace infoq {

enum class LogBase { Nats, Bits };

// Converts a value in nats into `base`.
double in_base(double nats, LogBase base) noexcept;

// One variable inside a query. `tied` holds the observed outcome index when the
// variable is tied to an outcome (written lowercase in the notation).
struct Term {
  std::string variable;
  std::optional<std::size_t> tied;

  static Term untied(std::string name) { return {std::move(name), std::nullopt}; }
  static Term at(std::string name, std::size_t outcome) { return {std::move(name), outcome}; }

  friend bool operator==(const Term&, const Term&) = default;
};

using TermList = std::vector<Term>;

// The argument of an entropy or one side of a CE/KL: p(head | given).
struct Spec {
  TermList head;
  TermList given;

  friend bool operator==(const Spec&, const Spec&) = default;
};

enum class QueryKind { Entropy, CrossEntropy, KL, MutualInfo, TripleMI };

// A single information functional. For Entropy/CE/KL `groups` has one entry
// (the head); MutualInfo has >= 2 groups and TripleMI exactly 3. For CE/KL the
// q side reuses the same head/given unless `q_spec` is set.
struct Query {
  QueryKind kind = QueryKind::Entropy;
  std::vector<TermList> groups;
  TermList given;
  std::optional<Spec> q_spec;
};

// -log(rho). Throws NonPositiveProbability for rho <= 0.
double information_content(double rho, LogBase base = LogBase::Nats);

// Expectation of IC(p(head | given)) over the untied variables, conditioned on
// every tied outcome (head and given side), e.g.
//   H[X, y | Z, w] = E_{p(x, z | y, w)} IC(p(x, y | z, w)).
double entropy(const JointDistribution& d, const Spec& spec, LogBase base = LogBase::Nats);

// E over the p-side measure of IC(q(q_head | q_given)). The measure covers all
// variables of p_spec (head and given alike), conditioned on its tied outcomes.
// A q variable either appears in p_spec or is tied in q_spec. An unnormalized q
// keeps its total mass Z_q in every conditional: q(h | g) = Z_q * q_norm(h | g).
double cross_entropy(const JointDistribution& p, const UnnormalizedWeight& q, const Spec& p_spec,
                     const Spec& q_spec, LogBase base = LogBase::Nats);
double cross_entropy(const JointDistribution& p, const JointDistribution& q, const Spec& p_spec,
                     const Spec& q_spec, LogBase base = LogBase::Nats);
double cross_entropy(const JointDistribution& p, const UnnormalizedWeight& q, const Spec& spec,
                     LogBase base = LogBase::Nats);
double cross_entropy(const JointDistribution& p, const JointDistribution& q, const Spec& spec,
                     LogBase base = LogBase::Nats);

// CE minus the entropy of the p side with its own head/given split, so
// KL(p(X|Y) || q(X|Y)) subtracts H(p(X|Y)) while KL(p(X,Y) || q(X|Y))
// subtracts H(p(X,Y)).
double kl(const JointDistribution& p, const UnnormalizedWeight& q, const Spec& p_spec, const Spec& q_spec,
          LogBase base = LogBase::Nats);
double kl(const JointDistribution& p, const JointDistribution& q, const Spec& p_spec, const Spec& q_spec,
          LogBase base = LogBase::Nats);
double kl(const JointDistribution& p, const UnnormalizedWeight& q, const Spec& spec, LogBase base = LogBase::Nats);
double kl(const JointDistribution& p, const JointDistribution& q, const Spec& spec, LogBase base = LogBase::Nats);

// I[G1; G2 | given] = H[G1 | given] - H[G1 | G2, given]; group order matters
// once outcomes are tied. More than two groups recurse on the last one:
// I[G1; ...; Gn | g] = I[G1; ...; Gn-1 | g] - I[G1; ...; Gn-1 | Gn, g].
double mutual_info(const JointDistribution& d, const std::vector<TermList>& groups, const TermList& given = {},
                   LogBase base = LogBase::Nats);

// I[A; B; C | given] = I[A; B | given] - I[A; B | C, given]. May be negative.
double triple_mi(const JointDistribution& d, const std::vector<TermList>& groups, const TermList& given = {},
                 LogBase base = LogBase::Nats);

// E_{p(over | condition)} f(outcome of `over`). Zero-mass outcomes are skipped.
double expectation(const JointDistribution& d, const std::vector<std::string>& over, const Assignment& condition,
                   const std::function<double(const Assignment&)>& f);

// Dispatches on query.kind. `q` is required for CE and KL.
double evaluate(const JointDistribution& d, const UnnormalizedWeight* q, const Query& query,
                LogBase base = LogBase::Nats);

struct DiagramRow {
  std::string label;
  double value = 0.0;
};

// The eight quantities relating X and an observed y, in this order:
// H[X,y], H[y], H[X], I[X;y], I[y;X], H[X|y], H[y|X], E_{p(x|y)} H[x].
using DiagramTable = std::array<DiagramRow, 8>;

// `observed` binds exactly one variable. X is `x_group` when given, otherwise
// every other variable of `d`.
DiagramTable diagram(const JointDistribution& d, const Assignment& observed,
                     const std::vector<std::string>& x_group = {}, LogBase base = LogBase::Nats);

}  // namespace infoq
