#include "infoq/quantities.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "infoq/errors.hpp"

namespace infoq {

namespace {

// Cells below this count as exact zeros for the 0 log 0 = 0 rule.
constexpr double kZeroCell = 1e-15;
constexpr double kZeroEvent = 1e-12;

struct Resolved {
  std::vector<std::string> names;
  Assignment tied;
};

void collect(const TermList& terms, const TensorShape& shape, Resolved& out, std::set<std::string>& seen) {
  for (const auto& t : terms) {
    const auto axis = shape.require_axis(t.variable);
    if (!seen.insert(t.variable).second) {
      throw InvalidQuery("variable '" + t.variable + "' appears more than once in a query");
    }
    out.names.push_back(t.variable);
    if (t.tied) {
      if (*t.tied >= shape.variables()[axis].size()) {
        throw DomainError("outcome index " + std::to_string(*t.tied) + " out of range for '" + t.variable + "'");
      }
      out.tied.bind(t.variable, *t.tied);
    }
  }
}

std::vector<std::string> names_of(const TermList& terms) {
  std::vector<std::string> out;
  for (const auto& t : terms) out.push_back(t.variable);
  return out;
}

// Axis/outcome pairs of `tied` expressed against `shape`.
std::vector<std::pair<std::size_t, std::size_t>> fixed_axes(const TensorShape& shape, const Assignment& tied) {
  std::vector<std::pair<std::size_t, std::size_t>> fixed;
  for (const auto& [name, outcome] : tied) fixed.emplace_back(shape.require_axis(name), outcome);
  return fixed;
}

bool matches(const std::vector<std::size_t>& idx, const std::vector<std::pair<std::size_t, std::size_t>>& fixed) {
  for (const auto& [axis, outcome] : fixed) {
    if (idx[axis] != outcome) return false;
  }
  return true;
}

[[noreturn]] void zero_event(double mass) {
  std::ostringstream os;
  os << "tied outcomes have probability " << mass;
  throw ZeroProbabilityEvent(os.str());
}

double entropy_nats(const JointDistribution& d, const Spec& spec) {
  if (spec.head.empty()) throw InvalidQuery("entropy needs at least one head term");
  Resolved all;
  std::set<std::string> seen;
  collect(spec.head, d.shape(), all, seen);
  collect(spec.given, d.shape(), all, seen);

  const auto joint = detail::marginal_or_scalar(d, all.names);
  const auto given = detail::marginal_or_scalar(d, names_of(spec.given));
  const auto to_given = detail::projection(joint.shape(), given.shape());
  const auto fixed = fixed_axes(joint.shape(), all.tied);

  std::vector<std::size_t> idx(joint.rank());
  double mass = 0.0;
  double acc = 0.0;
  for (std::size_t flat = 0; flat < joint.cell_count(); ++flat) {
    joint.shape().unravel(flat, idx);
    if (!matches(idx, fixed)) continue;
    const double w = joint.probs()[flat];
    mass += w;
    if (w <= kZeroCell) continue;
    acc -= w * std::log(w / given.probs()[to_given[flat]]);
  }
  if (mass <= kZeroEvent) zero_event(mass);
  return acc / mass;
}

double cross_entropy_nats(const JointDistribution& p, const UnnormalizedWeight& q, const Spec& p_spec,
                          const Spec& q_spec) {
  if (p_spec.head.empty() || q_spec.head.empty()) throw InvalidQuery("cross-entropy needs head terms on both sides");
  Resolved p_side;
  std::set<std::string> p_seen;
  collect(p_spec.head, p.shape(), p_side, p_seen);
  collect(p_spec.given, p.shape(), p_side, p_seen);

  Resolved q_side;
  std::set<std::string> q_seen;
  collect(q_spec.head, q.shape(), q_side, q_seen);
  collect(q_spec.given, q.shape(), q_side, q_seen);

  for (const auto& name : q_side.names) {
    const auto q_tie = q_side.tied.find(name);
    if (p_seen.count(name)) {
      if (!(p.variable(name) == q.variables()[q.shape().require_axis(name)])) {
        throw SupportMismatch("variable '" + name + "' has different supports in p and q");
      }
      if (q_tie && p_side.tied.find(name) != q_tie) {
        throw InvalidQuery("variable '" + name + "' is tied on the q side but not to the same outcome on the p side");
      }
    } else if (!q_tie) {
      throw InvalidQuery("q variable '" + name + "' is neither averaged over by p nor tied");
    }
  }

  const auto qn = q.normalized();
  const auto q_joint = detail::marginal_or_scalar(qn, q_side.names);
  const auto q_given = detail::marginal_or_scalar(qn, names_of(q_spec.given));
  const auto q_to_given = detail::projection(q_joint.shape(), q_given.shape());
  const double log_z = std::log(q.total_mass());

  const auto pm = detail::marginal_or_scalar(p, p_side.names);
  const auto fixed = fixed_axes(pm.shape(), p_side.tied);

  // For each q axis: the p axis feeding it, or a fixed outcome.
  struct Source {
    std::optional<std::size_t> p_axis;
    std::size_t outcome = 0;
  };
  std::vector<Source> sources;
  for (const auto& v : q_joint.variables()) {
    if (auto axis = pm.shape().axis_of(v.name)) {
      sources.push_back({axis, 0});
    } else {
      sources.push_back({std::nullopt, *q_side.tied.find(v.name)});
    }
  }

  std::vector<std::size_t> idx(pm.rank());
  std::vector<std::size_t> q_idx(q_joint.rank());
  double mass = 0.0;
  double acc = 0.0;
  for (std::size_t flat = 0; flat < pm.cell_count(); ++flat) {
    pm.shape().unravel(flat, idx);
    if (!matches(idx, fixed)) continue;
    const double w = pm.probs()[flat];
    mass += w;
    if (w <= kZeroCell) continue;
    for (std::size_t a = 0; a < sources.size(); ++a) {
      q_idx[a] = sources[a].p_axis ? idx[*sources[a].p_axis] : sources[a].outcome;
    }
    const auto q_flat = q_joint.shape().flat_index(q_idx);
    const double qv = q_joint.probs()[q_flat];
    if (qv <= 0.0) throw SupportMismatch("q assigns zero mass where p is positive");
    acc -= w * (log_z + std::log(qv / q_given.probs()[q_to_given[q_flat]]));
  }
  if (mass <= kZeroEvent) zero_event(mass);
  return acc / mass;
}

double mutual_info_nats(const JointDistribution& d, const std::vector<TermList>& groups, const TermList& given) {
  if (groups.size() < 2) throw InvalidQuery("mutual information needs at least two groups");
  for (const auto& g : groups) {
    if (g.empty()) throw InvalidQuery("mutual information groups must be non-empty");
  }
  {
    Resolved all;
    std::set<std::string> seen;
    for (const auto& g : groups) collect(g, d.shape(), all, seen);
    collect(given, d.shape(), all, seen);
  }
  if (groups.size() == 2) {
    TermList both = groups[1];
    both.insert(both.end(), given.begin(), given.end());
    return entropy_nats(d, {groups[0], given}) - entropy_nats(d, {groups[0], both});
  }
  std::vector<TermList> head(groups.begin(), groups.end() - 1);
  TermList extended = groups.back();
  extended.insert(extended.end(), given.begin(), given.end());
  return mutual_info_nats(d, head, given) - mutual_info_nats(d, head, extended);
}

}  // namespace

double in_base(double nats, LogBase base) noexcept {
  return base == LogBase::Bits ? nats / std::numbers::ln2 : nats;
}

double information_content(double rho, LogBase base) {
  if (!(rho > 0.0)) {
    std::ostringstream os;
    os << "information content needs a positive probability, got " << rho;
    throw NonPositiveProbability(os.str());
  }
  return in_base(-std::log(rho), base);
}

double entropy(const JointDistribution& d, const Spec& spec, LogBase base) {
  return in_base(entropy_nats(d, spec), base);
}

double cross_entropy(const JointDistribution& p, const UnnormalizedWeight& q, const Spec& p_spec, const Spec& q_spec,
                     LogBase base) {
  return in_base(cross_entropy_nats(p, q, p_spec, q_spec), base);
}

double cross_entropy(const JointDistribution& p, const JointDistribution& q, const Spec& p_spec, const Spec& q_spec,
                     LogBase base) {
  return cross_entropy(p, UnnormalizedWeight(q), p_spec, q_spec, base);
}

double cross_entropy(const JointDistribution& p, const UnnormalizedWeight& q, const Spec& spec, LogBase base) {
  return cross_entropy(p, q, spec, spec, base);
}

double cross_entropy(const JointDistribution& p, const JointDistribution& q, const Spec& spec, LogBase base) {
  return cross_entropy(p, UnnormalizedWeight(q), spec, spec, base);
}

double kl(const JointDistribution& p, const UnnormalizedWeight& q, const Spec& p_spec, const Spec& q_spec,
          LogBase base) {
  return in_base(cross_entropy_nats(p, q, p_spec, q_spec) - entropy_nats(p, p_spec), base);
}

double kl(const JointDistribution& p, const JointDistribution& q, const Spec& p_spec, const Spec& q_spec,
          LogBase base) {
  return kl(p, UnnormalizedWeight(q), p_spec, q_spec, base);
}

double kl(const JointDistribution& p, const UnnormalizedWeight& q, const Spec& spec, LogBase base) {
  return kl(p, q, spec, spec, base);
}

double kl(const JointDistribution& p, const JointDistribution& q, const Spec& spec, LogBase base) {
  return kl(p, UnnormalizedWeight(q), spec, spec, base);
}

double mutual_info(const JointDistribution& d, const std::vector<TermList>& groups, const TermList& given,
                   LogBase base) {
  return in_base(mutual_info_nats(d, groups, given), base);
}

double triple_mi(const JointDistribution& d, const std::vector<TermList>& groups, const TermList& given,
                 LogBase base) {
  if (groups.size() != 3) throw InvalidQuery("triple mutual information needs exactly three groups");
  return mutual_info(d, groups, given, base);
}

double expectation(const JointDistribution& d, const std::vector<std::string>& over, const Assignment& condition_on,
                   const std::function<double(const Assignment&)>& f) {
  if (over.empty()) throw InvalidQuery("expectation needs at least one variable to average over");
  std::vector<std::string> names = over;
  for (const auto& [name, outcome] : condition_on) {
    (void)outcome;
    for (const auto& o : over) {
      if (o == name) throw InvalidQuery("variable '" + name + "' is both averaged over and conditioned on");
    }
    names.push_back(name);
  }
  const auto measure = condition(detail::marginal_or_scalar(d, names), condition_on);
  std::vector<std::size_t> idx(measure.rank());
  double acc = 0.0;
  for (std::size_t flat = 0; flat < measure.cell_count(); ++flat) {
    const double w = measure.probs()[flat];
    if (w <= kZeroCell) continue;
    measure.shape().unravel(flat, idx);
    Assignment a;
    for (std::size_t axis = 0; axis < measure.rank(); ++axis) a.bind(measure.variables()[axis].name, idx[axis]);
    acc += w * f(a);
  }
  return acc;
}

double evaluate(const JointDistribution& d, const UnnormalizedWeight* q, const Query& query, LogBase base) {
  switch (query.kind) {
    case QueryKind::Entropy:
      if (query.groups.size() != 1) throw InvalidQuery("entropy takes a single term list");
      return entropy(d, {query.groups[0], query.given}, base);
    case QueryKind::CrossEntropy:
    case QueryKind::KL: {
      if (!q) throw MissingQDistribution("cross-entropy and KL need a q distribution");
      if (query.groups.size() != 1) throw InvalidQuery("cross-entropy takes a single term list");
      const Spec p_spec{query.groups[0], query.given};
      const Spec q_spec = query.q_spec.value_or(p_spec);
      return query.kind == QueryKind::KL ? kl(d, *q, p_spec, q_spec, base) : cross_entropy(d, *q, p_spec, q_spec, base);
    }
    case QueryKind::MutualInfo:
      return mutual_info(d, query.groups, query.given, base);
    case QueryKind::TripleMI:
      return triple_mi(d, query.groups, query.given, base);
  }
  throw InvalidQuery("unknown query kind");
}

DiagramTable diagram(const JointDistribution& d, const Assignment& observed, const std::vector<std::string>& x_group,
                     LogBase base) {
  if (observed.size() != 1) throw InvalidQuery("diagram needs exactly one observed variable");
  d.shape().check(observed);
  const auto& [y_name, y_outcome] = *observed.begin();

  std::vector<std::string> xs = x_group;
  if (xs.empty()) {
    for (const auto& v : d.variables()) {
      if (v.name != y_name) xs.push_back(v.name);
    }
  }
  if (xs.empty()) throw InvalidQuery("diagram needs at least one X variable besides the observed one");

  TermList x_terms;
  for (const auto& name : xs) {
    if (name == y_name) throw InvalidQuery("the X group must not contain the observed variable");
    x_terms.push_back(Term::untied(name));
  }
  const TermList y_term{Term::at(y_name, y_outcome)};
  TermList xy = x_terms;
  xy.push_back(y_term[0]);

  const auto marginal_x = detail::marginal_or_scalar(d, xs);
  const double expected_hx = expectation(d, xs, observed, [&](const Assignment& x) {
    std::vector<std::size_t> idx;
    for (const auto& v : marginal_x.variables()) idx.push_back(*x.find(v.name));
    return -std::log(marginal_x.at(idx));
  });

  return {{
      {"H[X,y]", entropy(d, {xy, {}}, base)},
      {"H[y]", entropy(d, {y_term, {}}, base)},
      {"H[X]", entropy(d, {x_terms, {}}, base)},
      {"I[X;y]", mutual_info(d, {x_terms, y_term}, {}, base)},
      {"I[y;X]", mutual_info(d, {y_term, x_terms}, {}, base)},
      {"H[X|y]", entropy(d, {x_terms, y_term}, base)},
      {"H[y|X]", entropy(d, {y_term, x_terms}, base)},
      {"E_{p(x|y)}H[x]", in_base(expected_hx, base)},
  }};
}

}  // namespace infoq
