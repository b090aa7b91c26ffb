#include "infoq/identities.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "infoq/errors.hpp"
#include "infoq/io.hpp"
#include "infoq/quantities.hpp"

namespace infoq::identities {

namespace {

using expr::CompareOp;
using expr::Expression;

constexpr double kWitnessGap = 1e-6;
constexpr std::size_t kGridLevels = 11;  // 0, 0.1, ..., 1
constexpr std::size_t kGridBudget = 3000;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

std::mt19937_64 sample_rng(std::uint64_t rng_seed, const std::string& name, std::uint64_t sample) {
  return std::mt19937_64(splitmix(splitmix(rng_seed ^ fnv1a(name)) + sample));
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<Variable> make_variables(const std::vector<std::string>& names, const std::vector<std::size_t>& sizes) {
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < names.size(); ++i) {
    Variable v{names[i], {}};
    for (std::size_t k = 0; k < sizes[i]; ++k) v.support.push_back(std::to_string(k));
    vars.push_back(std::move(v));
  }
  return vars;
}

std::vector<double> positive_cells(std::mt19937_64& rng, std::size_t n, double floor) {
  std::exponential_distribution<double> draw(1.0);
  std::vector<double> cells(n);
  double sum = 0.0;
  for (double& c : cells) sum += (c = draw(rng) + floor);
  for (double& c : cells) c /= sum;
  return cells;
}

JointDistribution random_tensor(std::mt19937_64& rng, const std::vector<Variable>& vars, double floor) {
  const TensorShape shape(vars);
  return {vars, positive_cells(rng, shape.cell_count(), floor)};
}

std::vector<std::size_t> random_sizes(std::mt19937_64& rng, std::size_t n, const GeneratorSpec& g) {
  std::vector<std::size_t> sizes(n);
  for (auto& s : sizes) s = uniform(rng, g.min_support, g.max_support);
  return sizes;
}

// Variables named by an expression, canonicalized to a leading capital.
void collect(const expr::TermRefs& terms, std::vector<std::string>& out) {
  for (const auto& t : terms) {
    std::string name = t.name;
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
}

void collect(const Expression& e, std::vector<std::string>& out) {
  for (const auto& g : e.groups) collect(g, out);
  collect(e.given, out);
  for (const auto& d : e.dists) {
    collect(d.head, out);
    collect(d.given, out);
  }
  for (const auto& c : e.children) collect(c, out);
}

struct Sample {
  JointDistribution p;
  JointDistribution q;
  Assignment bindings;
};

nlohmann::json witness_json(const Sample& s) {
  nlohmann::json bindings = nlohmann::json::object();
  for (const auto& [name, outcome] : s.bindings) bindings[name] = s.p.variable(name).support[outcome];
  return {{"distribution", to_json(s.p)}, {"q", to_json(s.q)}, {"bindings", bindings}};
}

std::pair<double, double> evaluate_sides(const Identity& id, const Sample& s) {
  const UnnormalizedWeight q(s.q);
  const expr::Context ctx{&s.p, &q, s.bindings, LogBase::Nats};
  return {expr::evaluate_number(id.comparison.children.at(0), ctx),
          expr::evaluate_number(id.comparison.children.at(1), ctx)};
}

Assignment random_bindings(std::mt19937_64& rng, const JointDistribution& p) {
  Assignment a;
  for (const auto& v : p.variables()) a.bind(v.name, uniform(rng, 0, v.size() - 1));
  return a;
}

Sample random_sample(std::mt19937_64& rng, const std::vector<std::string>& referenced, const GeneratorSpec& g) {
  std::vector<std::string> names = referenced;
  const std::size_t target = std::max(names.size(), uniform(rng, g.min_variables, g.max_variables));
  for (std::size_t k = 1; names.size() < target; ++k) {
    const std::string pad = "Pad" + std::to_string(k);
    if (std::find(names.begin(), names.end(), pad) == names.end()) names.push_back(pad);
  }
  const auto vars = make_variables(names, random_sizes(rng, names.size(), g));
  Sample s{random_tensor(rng, vars, g.floor), random_tensor(rng, vars, g.floor), {}};
  s.bindings = random_bindings(rng, s.p);
  return s;
}

// Binary joint over `names` from chain-rule parameters: theta[0] = p(v1=0),
// then p(v2=0 | v1), then p(v3=0 | v1, v2).
JointDistribution grid_distribution(const std::vector<std::string>& names, const std::vector<double>& theta) {
  const std::size_t n = names.size();
  std::vector<double> cells(std::size_t{1} << n, 1.0);
  for (std::size_t cell = 0; cell < cells.size(); ++cell) {
    std::size_t prefix = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t bit = (cell >> (n - 1 - i)) & 1;
      const double p0 = theta[((std::size_t{1} << i) - 1) + prefix];
      cells[cell] *= bit ? 1.0 - p0 : p0;
      prefix = prefix * 2 + bit;
    }
  }
  return {make_variables(names, std::vector<std::size_t>(n, 2)), cells};
}

struct Tracker {
  SearchReport& report;
  const Identity& id;
  bool done = false;
  double worst = -std::numeric_limits<double>::infinity();

  void observe(double lhs, double rhs, const std::function<nlohmann::json()>& witness) {
    ++report.seeds_tried;
    const double gap = violation_gap(lhs, id.op, rhs);
    const bool hit = id.expected == Expect::Violation ? gap > kWitnessGap : !expr::compare(lhs, id.op, rhs);
    if (hit || gap > worst) {
      worst = gap;
      report.lhs = lhs;
      report.rhs = rhs;
      report.gap = gap;
    }
    if (hit) {
      report.status = Status::Violated;
      report.witness = witness();
      done = true;
    }
  }
};

void search_expression(const Identity& id, const GeneratorSpec& g, std::size_t seeds, std::uint64_t rng_seed,
                       Tracker& t) {
  std::vector<std::string> referenced;
  collect(id.comparison, referenced);

  for (std::size_t seed = 0; seed < seeds && !t.done; ++seed) {
    auto rng = sample_rng(rng_seed, id.name, seed);
    const Sample s = random_sample(rng, referenced, g);
    try {
      const auto [lhs, rhs] = evaluate_sides(id, s);
      t.observe(lhs, rhs, [&] { return witness_json(s); });
    } catch (const ZeroProbabilityEvent&) {
      ++t.report.skipped;
    }
  }

  // Deterministic binary grid, zeros included, for two or three variables.
  if (t.done || referenced.empty() || referenced.size() > 3) return;
  std::vector<std::string> names = referenced;
  if (names.size() == 1) names.push_back("Pad1");
  const std::size_t k = (std::size_t{1} << names.size()) - 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= kGridLevels;
  const std::size_t count = std::min(total, kGridBudget);
  // A step coprime with 11^k visits distinct points spread across the grid.
  const std::size_t step = total <= kGridBudget ? 1 : 7919;

  auto rng = sample_rng(rng_seed, id.name + "/grid", 0);
  const JointDistribution q = random_tensor(rng, make_variables(names, std::vector<std::size_t>(names.size(), 2)),
                                            g.floor);
  std::vector<double> theta(k);
  for (std::size_t i = 0; i < count && !t.done; ++i) {
    std::size_t code = (i * step) % total;
    for (auto& th : theta) {
      th = static_cast<double>(code % kGridLevels) / (kGridLevels - 1);
      code /= kGridLevels;
    }
    Sample s{grid_distribution(names, theta), q, {}};
    const std::size_t combos = names.size() == 2 ? 4 : 1;
    for (std::size_t c = 0; c < combos && !t.done; ++c) {
      if (combos == 1) {
        s.bindings = random_bindings(rng, s.p);
      } else {
        for (std::size_t v = 0; v < names.size(); ++v) s.bindings.bind(names[v], (c >> v) & 1);
      }
      try {
        const auto [lhs, rhs] = evaluate_sides(id, s);
        t.observe(lhs, rhs, [&] { return witness_json(s); });
      } catch (const ZeroProbabilityEvent&) {
        ++t.report.skipped;
      }
    }
  }
}

// ---- native checks over the full joint of random tensors ----

struct NativeInputs {
  JointDistribution p1, p2;
  UnnormalizedWeight q1, q2;
  Spec all;
  double alpha;
};

NativeInputs native_inputs(std::mt19937_64& rng, const GeneratorSpec& g) {
  const std::size_t n = uniform(rng, g.min_variables, g.max_variables);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("V" + std::to_string(i + 1));
  const auto vars = make_variables(names, random_sizes(rng, n, g));
  std::uniform_real_distribution<double> mass(0.1, 5.0);
  auto p1 = random_tensor(rng, vars, g.floor);
  auto p2 = random_tensor(rng, vars, g.floor);
  auto q1 = UnnormalizedWeight(random_tensor(rng, vars, g.floor)).scaled(mass(rng));
  auto q2 = UnnormalizedWeight(random_tensor(rng, vars, g.floor)).scaled(mass(rng));
  Spec all;
  for (const auto& v : vars) all.head.push_back(Term::untied(v.name));
  const double alpha = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
  return {std::move(p1), std::move(p2), std::move(q1), std::move(q2), std::move(all), alpha};
}

std::vector<Identity> native_identities() {
  std::vector<Identity> out;
  out.push_back(make_native("ce_mixture_linear", "CE(a p1 + (1-a) p2, q) == a CE(p1, q) + (1-a) CE(p2, q)",
                            CompareOp::Eq, [](std::mt19937_64& rng, const GeneratorSpec& g) {
                              const auto in = native_inputs(rng, g);
                              const auto mixed = mix(in.p1, in.p2, in.alpha);
                              return NativeSample{cross_entropy(mixed, in.q1, in.all),
                                                  in.alpha * cross_entropy(in.p1, in.q1, in.all) +
                                                      (1 - in.alpha) * cross_entropy(in.p2, in.q1, in.all),
                                                  mixed};
                            }));
  out.push_back(make_native("ce_mixture_loglinear", "CE(a p1 + (1-a) p2, q) == CE(p1, q^a) + CE(p2, q^(1-a))",
                            CompareOp::Eq, [](std::mt19937_64& rng, const GeneratorSpec& g) {
                              const auto in = native_inputs(rng, g);
                              const auto mixed = mix(in.p1, in.p2, in.alpha);
                              return NativeSample{cross_entropy(mixed, in.q1, in.all),
                                                  cross_entropy(in.p1, in.q1.power(in.alpha), in.all) +
                                                      cross_entropy(in.p2, in.q1.power(1 - in.alpha), in.all),
                                                  mixed};
                            }));
  out.push_back(make_native("ce_scale", "CE(p, a q) == CE(p, q) + IC(a)", CompareOp::Eq,
                            [](std::mt19937_64& rng, const GeneratorSpec& g) {
                              const auto in = native_inputs(rng, g);
                              return NativeSample{cross_entropy(in.p1, in.q1.scaled(in.alpha), in.all),
                                                  cross_entropy(in.p1, in.q1, in.all) + information_content(in.alpha),
                                                  in.p1};
                            }));
  out.push_back(make_native("ce_power", "CE(p, q^k) == k CE(p, q)", CompareOp::Eq,
                            [](std::mt19937_64& rng, const GeneratorSpec& g) {
                              const auto in = native_inputs(rng, g);
                              const double k = 4.0 * in.alpha;
                              return NativeSample{cross_entropy(in.p1, in.q1.power(k), in.all),
                                                  k * cross_entropy(in.p1, in.q1, in.all), in.p1};
                            }));
  out.push_back(make_native("ce_product", "CE(p, q1 q2) == CE(p, q1) + CE(p, q2)", CompareOp::Eq,
                            [](std::mt19937_64& rng, const GeneratorSpec& g) {
                              const auto in = native_inputs(rng, g);
                              return NativeSample{cross_entropy(in.p1, in.q1.times(in.q2), in.all),
                                                  cross_entropy(in.p1, in.q1, in.all) +
                                                      cross_entropy(in.p1, in.q2, in.all),
                                                  in.p1};
                            }));
  out.push_back(make_native("ce_lower_bound", "CE(p, q) >= H(p) + IC(Z_q)", CompareOp::Ge,
                            [](std::mt19937_64& rng, const GeneratorSpec& g) {
                              const auto in = native_inputs(rng, g);
                              return NativeSample{cross_entropy(in.p1, in.q1, in.all),
                                                  entropy(in.p1, in.all) + information_content(in.q1.total_mass()),
                                                  in.p1};
                            }));
  out.push_back(make_native("kl_lower_bound", "KL(p || q) >= IC(Z_q)", CompareOp::Ge,
                            [](std::mt19937_64& rng, const GeneratorSpec& g) {
                              const auto in = native_inputs(rng, g);
                              return NativeSample{kl(in.p1, in.q1, in.all), information_content(in.q1.total_mass()),
                                                  in.p1};
                            }));
  out.push_back(make_native("kl_bound_equality", "KL(p || Z p) == IC(Z)", CompareOp::Eq,
                            [](std::mt19937_64& rng, const GeneratorSpec& g) {
                              const auto in = native_inputs(rng, g);
                              const double z = in.q1.total_mass();
                              return NativeSample{kl(in.p1, UnnormalizedWeight(in.p1).scaled(z), in.all),
                                                  information_content(z), in.p1};
                            }));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

Identity make_identity(std::string name, const std::string& text, Expect expected) {
  Identity id;
  id.name = std::move(name);
  id.text = text;
  id.comparison = expr::parse(text);
  if (id.comparison.kind != expr::NodeKind::Comparison)
    throw ConfigError("identity '" + id.name + "' is not a comparison: " + text);
  id.op = id.comparison.op;
  id.expected = expected;
  return id;
}

Identity make_native(std::string name, std::string description, CompareOp op, NativeCheck check) {
  Identity id;
  id.name = std::move(name);
  id.text = std::move(description);
  id.op = op;
  id.native = std::move(check);
  return id;
}

IdentitySuite default_suite() {
  static const std::vector<std::pair<const char*, const char*>> always{
      {"chain_rule", "H[X, Y] == H[X] + H[Y | X]"},
      {"mi_symmetry", "I[X; Y] == I[Y; X]"},
      {"pointwise_symmetry", "I[x; y] == I[y; x]"},
      {"expected_information_gain", "I[X; Y] == E_{p(y)}[I[X; y]]"},
      {"expected_surprise", "I[X; Y] == E_{p(y)}[I[y; X]]"},
      {"expected_pointwise", "I[X; Y] == E_{p(x, y)}[I[x; y]]"},
      {"joint_over_x", "H[X, Y] == E_{p(x)}[H[x, Y]]"},
      {"joint_over_y", "H[X, Y] == E_{p(y)}[H[X, y]]"},
      {"observed_conditional", "H[X | y] == H[X, y] - H[y]"},
      {"observed_conditional_tied_head", "H[y | X] == H[X, y] - E_{p(x | y)}[H[x]]"},
      {"information_gain_chaining", "I[X; y1, y2] == I[X; y1] + I[X; y2 | y1]"},
      {"untied_chaining_gain", "I[X1, X2; y] == I[X1; y] + I[X2; y | X1]"},
      {"untied_chaining_surprise", "I[y; X1, X2] == I[y; X1] + I[y; X2 | X1]"},
      {"pointwise_chaining", "I[x; y1, y2] == I[x; y1] + I[x; y2 | y1]"},
      {"surprise_as_kl", "I[y; X] == KL[p(X | y) || p(X)]"},
      {"ce_conditional", "CE[p(X | Y) || q(X | Y)] == CE[p(X, Y) || q(X | Y)]"},
      {"triple_mi_average", "I[X; Y; Z] == E_{p(z)}[I[X; Y; z]]"},
      {"mi_nonnegative", "I[X; Y] >= 0"},
      {"conditioning_reduces_entropy", "H[X] >= H[X | Y]"},
      {"entropy_nonnegative", "H[X] >= 0"},
      {"mi_bounded_by_entropy", "I[X; Y] <= H[X]"},
      {"surprise_nonnegative", "I[y; X] >= 0"},
      {"tied_conditioning_reduces_entropy", "H[y] >= H[y | X]"},
      {"posterior_expected_entropy_bound", "E_{p(x | y)}[H[x]] >= H[X | y]"},
      {"tied_conditional_nonnegative", "H[y | X] >= 0"},
      {"surprise_bounded_by_entropy", "I[y; X] <= H[y]"},
      {"surprise_bounded_by_expected_entropy", "I[y; X] <= E_{p(x | y)}[H[x]]"},
      {"kl_nonnegative", "KL[p(X, Y) || q(X, Y)] >= 0"},
  };
  static const std::vector<std::pair<const char*, const char*>> violations{
      {"observed_conditional_untied", "H[y | X] != H[X, y] - H[X]"},
      {"surprise_chaining", "I[y1, y2; X] != I[y1; X] + I[y2; X | y1]"},
      {"negative_information_gain", "I[X; y] >= 0"},
  };
  IdentitySuite suite;
  for (const auto& [name, text] : always) suite.entries.push_back(make_identity(name, text, Expect::Always));
  for (auto& n : native_identities()) suite.entries.push_back(std::move(n));
  for (const auto& [name, text] : violations) suite.entries.push_back(make_identity(name, text, Expect::Violation));
  return suite;
}

IdentitySuite parse_suite(const std::string& text) {
  IdentitySuite suite;
  std::set<std::string> names;
  std::istringstream in(text);
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto hash = stripped.find('#');
    std::string body = trim(stripped.substr(0, hash));
    Expect expected = Expect::Always;
    if (hash != std::string::npos) {
      const std::string directive = lower(trim(stripped.substr(hash + 1)));
      if (directive.starts_with("expect:")) {
        const std::string value = trim(directive.substr(7));
        if (value == "always")
          expected = Expect::Always;
        else if (value == "violation")
          expected = Expect::Violation;
        else
          throw ConfigError("line " + std::to_string(lineno) + ": expected 'always' or 'violation', got '" + value +
                            "'");
      }
    }
    std::string name = "line" + std::to_string(lineno);
    if (const auto colon = body.find(':'); colon != std::string::npos) {
      name = trim(body.substr(0, colon));
      body = trim(body.substr(colon + 1));
      if (name.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty identity name");
    }
    if (!names.insert(name).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate name '" + name + "'");
    try {
      suite.entries.push_back(make_identity(name, body, expected));
    } catch (const ParseError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (suite.entries.empty()) throw ConfigError("identity suite has no entries");
  return suite;
}

IdentitySuite load_suite(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open suite file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_suite(buf.str());
}

double violation_gap(double lhs, CompareOp op, double rhs) {
  switch (op) {
    case CompareOp::Eq:
    case CompareOp::Ne:
      return std::abs(lhs - rhs);
    case CompareOp::Le:
      return lhs - rhs;
    case CompareOp::Ge:
      return rhs - lhs;
  }
  return 0.0;
}

std::vector<SearchReport> check_suite(const IdentitySuite& suite, std::size_t seeds, std::uint64_t rng_seed) {
  if (seeds == 0) throw InvalidQuery("check_suite needs at least one seed");
  std::vector<SearchReport> reports;
  for (const auto& id : suite.entries) {
    SearchReport report;
    report.name = id.name;
    report.text = id.text;
    report.expected = id.expected;
    Tracker t{report, id};
    if (id.native) {
      for (std::size_t seed = 0; seed < seeds && !t.done; ++seed) {
        auto rng = sample_rng(rng_seed, id.name, seed);
        const NativeSample s = id.native(rng, suite.generator);
        t.observe(s.lhs, s.rhs, [&] { return nlohmann::json{{"distribution", to_json(s.witness)}}; });
      }
    } else {
      search_expression(id, suite.generator, seeds, rng_seed, t);
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

std::pair<double, double> replay_witness(const Identity& identity, const nlohmann::json& witness) {
  if (identity.native) throw InvalidQuery("native checks cannot be replayed from a witness");
  Sample s{distribution_from_json(witness.at("distribution")), {}, {}};
  s.q = witness.contains("q") ? distribution_from_json(witness.at("q")) : s.p;
  std::vector<std::pair<std::string, std::string>> pairs;
  if (witness.contains("bindings"))
    for (const auto& [name, label] : witness.at("bindings").items()) pairs.emplace_back(name, label.get<std::string>());
  s.bindings = expr::resolve_bindings(s.p.shape(), pairs);
  return evaluate_sides(identity, s);
}

nlohmann::json to_json(const SearchReport& r) {
  nlohmann::json j{{"name", r.name},
                   {"expression", r.text},
                   {"expected", r.expected == Expect::Always ? "always" : "violation"},
                   {"status", r.status == Status::Held ? "HELD" : "VIOLATED"},
                   {"as_expected", r.as_expected()},
                   {"lhs", r.lhs},
                   {"rhs", r.rhs},
                   {"gap", r.gap},
                   {"seeds_tried", r.seeds_tried},
                   {"skipped", r.skipped}};
  if (r.witness) j["witness"] = *r.witness;
  return j;
}

std::string format_report(const SearchReport& r) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << (r.as_expected() ? "ok    " : "FAIL  ") << r.name << "  " << (r.status == Status::Held ? "HELD" : "VIOLATED")
     << "  expect=" << (r.expected == Expect::Always ? "always" : "violation") << "  lhs=" << r.lhs
     << "  rhs=" << r.rhs << "  gap=" << r.gap << "  samples=" << r.seeds_tried;
  if (r.skipped) os << "  skipped=" << r.skipped;
  return os.str();
}

JointDistribution three_cell_witness() {
  Variable x{"X", {"0", "1"}}, y{"Y", {"0", "1"}};
  return {{x, y}, {1.0 / 3, 0.0, 1.0 / 3, 1.0 / 3}};
}

JointDistribution chaining_witness() {
  Variable x{"X", {"0", "1"}}, y1{"Y1", {"0", "1"}}, y2{"Y2", {"0", "1"}};
  // p(y1) = 1/2; p(x, y2 | y1=0) = 1/4; p(x | y2=0, y1=1) = 1/2;
  // p(x=0 | y2=1, y1=1) = 1; p(y2 | y1=1) = 1/2
  return {{x, y1, y2}, {0.125, 0.125, 0.125, 0.25, 0.125, 0.125, 0.125, 0.0}};
}

PaperReport verify_paper_witnesses() {
  struct Check {
    const char* label;
    const char* lhs;
    const char* rhs;  // empty: plain value; otherwise |lhs - rhs|
    double expected;
  };
  const double third_ln2 = std::log(2.0) / 3.0;
  const std::vector<Check> w1{
      {"E_{p(x|y=1)}[H[x]]", "E_{p(x | y=1)}[H[x]]", "", std::log(1.5)},
      {"H[X]", "H[X]", "", std::log(3.0 * std::cbrt(2.0) / 2.0)},
      {"|H[y=1 | X] - (H[X, y=1] - H[X])|", "H[y=1 | X]", "H[X, y=1] - H[X]", third_ln2},
  };
  const std::vector<Check> w2{
      {"E_{p(x|y1=1,y2=1)}[I[y1=1; x]]", "E_{p(x | y1=1, y2=1)}[I[y1=1; x]]", "", std::log(6.0 / 5.0)},
      {"I[y1=1; X]", "I[y1=1; X]", "", std::log(2.0 * std::sqrt(3.0) * std::pow(5.0, 0.25) / 5.0)},
      {"I[y1=1, y2=1; X]", "I[y1=1, y2=1; X]", "", std::log(8.0 / 5.0)},
      // exact rational oracle for the right-hand side of the chaining equation
      {"I[y1=1; X] + I[y2=1; X | y1=1]", "I[y1=1; X] + I[y2=1; X | y1=1]", "", 0.3230569630202057},
  };

  const auto run = [](const JointDistribution& d, const std::vector<Check>& checks) {
    std::vector<PaperValue> out;
    const expr::Context ctx{&d, nullptr, {}, LogBase::Nats};
    for (const auto& c : checks) {
      double v = expr::evaluate_number(expr::parse(c.lhs), ctx);
      if (*c.rhs) v = std::abs(v - expr::evaluate_number(expr::parse(c.rhs), ctx));
      out.push_back({c.label, v, c.expected});
    }
    return out;
  };
  const auto reversed = [](const JointDistribution& d) {
    auto names = d.shape().names();
    std::reverse(names.begin(), names.end());
    return reorder(d, names);
  };

  PaperReport report;
  report.witness1 = run(three_cell_witness(), w1);
  report.witness2 = run(chaining_witness(), w2);

  std::ostringstream mismatches;
  mismatches << std::setprecision(17);
  for (const auto* values : {&report.witness1, &report.witness2})
    for (const auto& v : *values)
      if (!(std::abs(v.computed - v.expected) <= 1e-9))
        mismatches << "\n  " << v.label << ": computed " << v.computed << ", expected " << v.expected;
  if (!(std::abs(report.witness2[0].computed - report.witness2[1].computed) > 1e-3))
    mismatches << "\n  the two chaining sub-terms do not differ by more than 1e-3";

  const auto p1 = run(reversed(three_cell_witness()), w1);
  const auto p2 = run(reversed(chaining_witness()), w2);
  report.permutation_invariant = true;
  for (std::size_t i = 0; i < p1.size(); ++i)
    report.permutation_invariant &= std::abs(p1[i].computed - report.witness1[i].computed) <= 1e-12;
  for (std::size_t i = 0; i < p2.size(); ++i)
    report.permutation_invariant &= std::abs(p2[i].computed - report.witness2[i].computed) <= 1e-12;
  if (!report.permutation_invariant) mismatches << "\n  values change when the variable order is reversed";

  if (!mismatches.str().empty()) throw MismatchAgainstPaper("paper witness mismatch:" + mismatches.str());
  return report;
}

}  // namespace infoq::identities
