#include "infoq/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

#include "infoq/errors.hpp"

namespace infoq::expr {

namespace {

constexpr int kMaxDepth = 200;

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_ident_char(char c) { return is_alpha(c) || is_digit(c) || c == '_'; }
bool is_outcome_char(char c) { return is_ident_char(c) || c == '.' || c == '+' || c == '-'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expression run() {
    Expression lhs = additive();
    Expression out = std::move(lhs);
    if (auto op = comparison_op()) {
      Expression cmp;
      cmp.kind = NodeKind::Comparison;
      cmp.op = *op;
      cmp.children.push_back(std::move(out));
      cmp.children.push_back(additive());
      out = std::move(cmp);
    }
    skip_ws();
    if (pos_ < s_.size()) {
      note("end of input");
      fail();
    }
    return out;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t furthest_ = 0;
  std::vector<std::string> expected_;
  int depth_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void note(std::string_view what) {
    if (pos_ > furthest_) {
      furthest_ = pos_;
      expected_.clear();
    }
    if (pos_ == furthest_ && std::find(expected_.begin(), expected_.end(), what) == expected_.end())
      expected_.emplace_back(what);
  }

  [[noreturn]] void fail(std::string message = {}) {
    const std::size_t at = std::max(furthest_, pos_);
    if (at > furthest_) expected_.clear();
    if (message.empty())
      message = at >= s_.size() ? "unexpected end of input" : "unexpected '" + std::string(1, s_[at]) + "'";
    throw ParseError(at, expected_, message);
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_).starts_with(tok)) {
      pos_ += tok.size();
      return true;
    }
    note(tok);
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail();
  }

  std::optional<CompareOp> comparison_op() {
    if (accept("==")) return CompareOp::Eq;
    if (accept("<=")) return CompareOp::Le;
    if (accept(">=")) return CompareOp::Ge;
    if (accept("!=")) return CompareOp::Ne;
    return std::nullopt;
  }

  Expression additive() {
    Expression lhs = term();
    for (;;) {
      NodeKind kind;
      if (accept("+"))
        kind = NodeKind::Sum;
      else if (accept("-"))
        kind = NodeKind::Diff;
      else
        return lhs;
      Expression node;
      node.kind = kind;
      node.children.push_back(std::move(lhs));
      node.children.push_back(term());
      lhs = std::move(node);
    }
  }

  bool number_ahead() {
    skip_ws();
    std::size_t i = pos_;
    if (i < s_.size() && (s_[i] == '-' || s_[i] == '+')) ++i;
    if (i < s_.size() && s_[i] == '.') ++i;
    return i < s_.size() && is_digit(s_[i]);
  }

  double number() {
    if (!number_ahead()) {
      note("number");
      fail();
    }
    std::size_t start = pos_;
    if (s_[pos_] == '+') ++start;
    std::size_t end = start;
    if (end < s_.size() && s_[end] == '-') ++end;
    while (end < s_.size() && is_digit(s_[end])) ++end;
    if (end < s_.size() && s_[end] == '.') {
      ++end;
      while (end < s_.size() && is_digit(s_[end])) ++end;
    }
    if (end < s_.size() && (s_[end] == 'e' || s_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < s_.size() && (s_[e] == '+' || s_[e] == '-')) ++e;
      if (e < s_.size() && is_digit(s_[e])) {
        while (e < s_.size() && is_digit(s_[e])) ++e;
        end = e;
      }
    }
    double value = 0.0;
    const std::string_view digits = s_.substr(start, end - start);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || !std::isfinite(value)) {
      note("number");
      fail("malformed number");
    }
    pos_ = end;
    return value;
  }

  std::string keyword() {
    skip_ws();
    std::size_t end = pos_;
    while (end < s_.size() && is_alpha(s_[end])) ++end;
    return std::string(s_.substr(pos_, end - pos_));
  }

  Expression term() {
    if (++depth_ > kMaxDepth) fail("expression nested too deeply");
    Expression out = term_body();
    --depth_;
    return out;
  }

  Expression term_body() {
    Expression node;
    if (number_ahead()) {
      node.number = number();
      if (accept("*")) {
        node.kind = NodeKind::Scaled;
        node.children.push_back(term());
      } else {
        node.kind = NodeKind::Scalar;
      }
      return node;
    }
    const std::string kw = keyword();
    if (kw == "H") {
      pos_ += kw.size();
      node.kind = NodeKind::Entropy;
      expect("[");
      node.groups.push_back(term_list());
      if (accept("|")) node.given = term_list();
      expect("]");
    } else if (kw == "I") {
      pos_ += kw.size();
      node.kind = NodeKind::MutualInfo;
      expect("[");
      node.groups.push_back(term_list());
      expect(";");
      do node.groups.push_back(term_list());
      while (accept(";"));
      if (accept("|")) node.given = term_list();
      expect("]");
    } else if (kw == "CE" || kw == "KL") {
      pos_ += kw.size();
      node.kind = kw == "CE" ? NodeKind::CrossEntropy : NodeKind::KL;
      expect("[");
      node.dists.push_back(dist());
      expect("||");
      node.dists.push_back(dist());
      expect("]");
    } else if (kw == "IC") {
      pos_ += kw.size();
      node.kind = NodeKind::InfoContent;
      expect("[");
      skip_ws();
      if (number_ahead())
        node.number = number();
      else if (pos_ < s_.size() && (s_[pos_] == 'p' || s_[pos_] == 'q'))
        node.dists.push_back(dist());
      else {
        note("number");
        note("p");
        note("q");
        fail();
      }
      expect("]");
    } else if (kw == "E") {
      pos_ += kw.size();
      node.kind = NodeKind::Expectation;
      expect("_");
      expect("{");
      node.dists.push_back(dist());
      expect("}");
      expect("[");
      node.children.push_back(additive());
      expect("]");
    } else {
      for (const char* k : {"H", "I", "CE", "KL", "IC", "E", "number"}) note(k);
      fail();
    }
    return node;
  }

  DistRef dist() {
    DistRef d;
    if (accept("p"))
      d.which = 'p';
    else if (accept("q"))
      d.which = 'q';
    else
      fail();
    expect("(");
    d.head = term_list();
    if (accept("|")) d.given = term_list();
    expect(")");
    return d;
  }

  TermRefs term_list() {
    TermRefs out;
    do out.push_back(term_spec());
    while (accept(","));
    return out;
  }

  TermRef term_spec() {
    skip_ws();
    if (pos_ >= s_.size() || !is_alpha(s_[pos_])) {
      note("identifier");
      fail();
    }
    std::size_t end = pos_;
    while (end < s_.size() && is_ident_char(s_[end])) ++end;
    TermRef t{std::string(s_.substr(pos_, end - pos_)), std::nullopt};
    pos_ = end;
    if (t.tied() && accept("=")) t.outcome = outcome();
    return t;
  }

  std::string outcome() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '"') {
      const std::size_t close = s_.find('"', pos_ + 1);
      if (close == std::string_view::npos) {
        pos_ = s_.size();
        note("\"");
        fail("unterminated quoted outcome");
      }
      std::string label(s_.substr(pos_ + 1, close - pos_ - 1));
      pos_ = close + 1;
      return label;
    }
    std::size_t end = pos_;
    while (end < s_.size() && is_outcome_char(s_[end])) ++end;
    if (end == pos_) {
      note("outcome");
      fail();
    }
    std::string label(s_.substr(pos_, end - pos_));
    pos_ = end;
    return label;
  }
};

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string print_outcome(const std::string& label) {
  const bool bare = !label.empty() && std::all_of(label.begin(), label.end(), is_outcome_char);
  return bare ? label : '"' + label + '"';
}

std::string print_terms(const TermRefs& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += ", ";
    out += terms[i].name;
    if (terms[i].outcome) out += "=" + print_outcome(*terms[i].outcome);
  }
  return out;
}

std::string print_given(const TermRefs& given) { return given.empty() ? "" : " | " + print_terms(given); }

std::string print_dist(const DistRef& d) {
  return std::string(1, d.which) + "(" + print_terms(d.head) + print_given(d.given) + ")";
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

Term to_term(const TermRef& t, const TensorShape& shape, const Assignment& bindings) {
  const Variable& v = resolve_variable(shape, t.name);
  if (!t.tied()) return Term::untied(v.name);
  if (t.outcome) return Term::at(v.name, resolve_outcome(v, *t.outcome));
  if (auto bound = bindings.find(v.name)) return Term::at(v.name, *bound);
  throw UnknownVariable("'" + t.name + "' is tied but has no outcome; write " + t.name +
                        "=<outcome> or bind it");
}

TermList to_terms(const TermRefs& ts, const TensorShape& shape, const Assignment& bindings) {
  TermList out;
  for (const auto& t : ts) out.push_back(to_term(t, shape, bindings));
  return out;
}

Spec to_spec(const DistRef& d, const TensorShape& shape, const Assignment& bindings) {
  return {to_terms(d.head, shape, bindings), to_terms(d.given, shape, bindings)};
}

const UnnormalizedWeight& require_q(const Context& ctx) {
  if (!ctx.q) throw MissingQDistribution("the expression refers to q but no q distribution was supplied");
  return *ctx.q;
}

JointDistribution measure_of(const DistRef& d, const Context& ctx) {
  return d.which == 'p' ? *ctx.p : require_q(ctx).normalized();
}

double eval_number(const Expression& e, const Context& ctx);

double eval_expectation(const Expression& e, const Context& ctx) {
  const DistRef& m = e.dists.at(0);
  const JointDistribution measure = measure_of(m, ctx);
  std::vector<std::string> over;
  for (const auto& t : m.head) {
    if (!t.tied() || t.outcome)
      throw InvalidQuery("expectation variables must be bare lowercase names, got '" + t.name + "'");
    over.push_back(resolve_variable(measure.shape(), t.name).name);
  }
  Assignment condition_on;
  for (const auto& t : m.given) {
    if (!t.tied()) throw InvalidQuery("expectation measure can only condition on tied outcomes, got '" + t.name + "'");
    const Term term = to_term(t, measure.shape(), ctx.bindings);
    condition_on.bind(term.variable, *term.tied);
  }
  return expectation(measure, over, condition_on, [&](const Assignment& a) {
    Context inner = ctx;
    for (const auto& [name, outcome] : a) inner.bindings.bind(name, outcome);
    return eval_number(e.children.at(0), inner);
  });
}

double eval_number(const Expression& e, const Context& ctx) {
  if (!ctx.p) throw InvalidQuery("no distribution to evaluate against");
  const JointDistribution& p = *ctx.p;
  switch (e.kind) {
    case NodeKind::Entropy:
      return entropy(p, {to_terms(e.groups.at(0), p.shape(), ctx.bindings), to_terms(e.given, p.shape(), ctx.bindings)},
                     ctx.base);
    case NodeKind::MutualInfo: {
      std::vector<TermList> groups;
      for (const auto& g : e.groups) groups.push_back(to_terms(g, p.shape(), ctx.bindings));
      return mutual_info(p, groups, to_terms(e.given, p.shape(), ctx.bindings), ctx.base);
    }
    case NodeKind::CrossEntropy:
    case NodeKind::KL: {
      const JointDistribution measure = measure_of(e.dists.at(0), ctx);
      const UnnormalizedWeight weight = e.dists.at(1).which == 'q' ? require_q(ctx) : UnnormalizedWeight(p);
      const Spec p_spec = to_spec(e.dists[0], measure.shape(), ctx.bindings);
      const Spec q_spec = to_spec(e.dists[1], weight.shape(), ctx.bindings);
      return e.kind == NodeKind::KL ? kl(measure, weight, p_spec, q_spec, ctx.base)
                                    : cross_entropy(measure, weight, p_spec, q_spec, ctx.base);
    }
    case NodeKind::InfoContent: {
      if (e.dists.empty()) return information_content(e.number, ctx.base);
      const DistRef& d = e.dists[0];
      for (const auto* list : {&d.head, &d.given})
        for (const auto& t : *list)
          if (!t.tied()) throw InvalidQuery("IC[...] needs every variable tied, '" + t.name + "' is not");
      const JointDistribution measure = measure_of(d, ctx);
      double ic = entropy(measure, to_spec(d, measure.shape(), ctx.bindings), ctx.base);
      if (d.which == 'q') ic += information_content(require_q(ctx).total_mass(), ctx.base);
      return ic;
    }
    case NodeKind::Scalar:
      return e.number;
    case NodeKind::Sum:
      return eval_number(e.children.at(0), ctx) + eval_number(e.children.at(1), ctx);
    case NodeKind::Diff:
      return eval_number(e.children.at(0), ctx) - eval_number(e.children.at(1), ctx);
    case NodeKind::Scaled:
      return e.number * eval_number(e.children.at(0), ctx);
    case NodeKind::Expectation:
      return eval_expectation(e, ctx);
    case NodeKind::Comparison:
      throw InvalidQuery("a comparison has no numeric value");
  }
  throw InvalidQuery("unknown expression node");
}

}  // namespace

bool TermRef::tied() const { return !name.empty() && std::islower(static_cast<unsigned char>(name[0])); }

Expression parse(std::string_view text) { return Parser(text).run(); }

std::string print(CompareOp op) {
  switch (op) {
    case CompareOp::Eq:
      return "==";
    case CompareOp::Le:
      return "<=";
    case CompareOp::Ge:
      return ">=";
    case CompareOp::Ne:
      return "!=";
  }
  return "?";
}

std::string print(const Expression& e) {
  switch (e.kind) {
    case NodeKind::Entropy:
      return "H[" + print_terms(e.groups.at(0)) + print_given(e.given) + "]";
    case NodeKind::MutualInfo: {
      std::string out = "I[";
      for (std::size_t i = 0; i < e.groups.size(); ++i) out += (i ? "; " : "") + print_terms(e.groups[i]);
      return out + print_given(e.given) + "]";
    }
    case NodeKind::CrossEntropy:
    case NodeKind::KL:
      return std::string(e.kind == NodeKind::KL ? "KL[" : "CE[") + print_dist(e.dists.at(0)) + " || " +
             print_dist(e.dists.at(1)) + "]";
    case NodeKind::InfoContent:
      return "IC[" + (e.dists.empty() ? format_number(e.number) : print_dist(e.dists[0])) + "]";
    case NodeKind::Scalar:
      return format_number(e.number);
    case NodeKind::Sum:
      return print(e.children.at(0)) + " + " + print(e.children.at(1));
    case NodeKind::Diff:
      return print(e.children.at(0)) + " - " + print(e.children.at(1));
    case NodeKind::Scaled:
      return format_number(e.number) + " * " + print(e.children.at(0));
    case NodeKind::Expectation:
      return "E_{" + print_dist(e.dists.at(0)) + "}[" + print(e.children.at(0)) + "]";
    case NodeKind::Comparison:
      return print(e.children.at(0)) + " " + print(e.op) + " " + print(e.children.at(1));
  }
  return {};
}

bool compare(double lhs, CompareOp op, double rhs) {
  switch (op) {
    case CompareOp::Eq:
      return std::abs(lhs - rhs) <= 1e-9;
    case CompareOp::Le:
      return lhs <= rhs + 1e-9;
    case CompareOp::Ge:
      return lhs >= rhs - 1e-9;
    case CompareOp::Ne:
      return std::abs(lhs - rhs) > 1e-6;
  }
  return false;
}

Value evaluate(const Expression& e, const Context& ctx) {
  if (e.kind == NodeKind::Comparison)
    return compare(eval_number(e.children.at(0), ctx), e.op, eval_number(e.children.at(1), ctx));
  return eval_number(e, ctx);
}

double evaluate_number(const Expression& e, const Context& ctx) { return eval_number(e, ctx); }

const Variable& resolve_variable(const TensorShape& shape, std::string_view name) {
  if (auto axis = shape.axis_of(name)) return shape.variables()[*axis];
  const Variable* match = nullptr;
  for (const auto& v : shape.variables()) {
    if (!iequals(v.name, name)) continue;
    if (match) throw UnknownVariable("'" + std::string(name) + "' matches more than one variable");
    match = &v;
  }
  if (!match) throw UnknownVariable("no variable named '" + std::string(name) + "'");
  return *match;
}

std::size_t resolve_outcome(const Variable& v, std::string_view outcome) {
  if (auto idx = v.index_of(outcome)) return *idx;
  std::size_t idx = 0;
  const auto [ptr, ec] = std::from_chars(outcome.data(), outcome.data() + outcome.size(), idx);
  if (ec == std::errc() && ptr == outcome.data() + outcome.size() && idx < v.size()) return idx;
  throw DomainError("outcome '" + std::string(outcome) + "' is not in the support of " + v.name);
}

Assignment resolve_bindings(const TensorShape& shape, const std::vector<std::pair<std::string, std::string>>& pairs) {
  Assignment out;
  for (const auto& [name, outcome] : pairs) {
    const Variable& v = resolve_variable(shape, name);
    out.bind(v.name, resolve_outcome(v, outcome));
  }
  return out;
}

}  // namespace infoq::expr
