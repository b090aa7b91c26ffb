#include "cli.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>

#include "CLI11.hpp"
#include "infoq/errors.hpp"
#include "infoq/expr.hpp"
#include "infoq/identities.hpp"
#include "infoq/io.hpp"
#include "infoq/quantities.hpp"
#include "infoq/sim.hpp"
#include "infoq/stirling.hpp"

namespace infoq::cli {

namespace {

const char* const grammar_help = R"(expression grammar:
  H[X, y=1 | Z]              entropy; uppercase names are untied, lowercase are tied
  I[X; Y | z]                mutual information (more ';' groups for higher orders)
  CE[p(X | Y) || q(X | Y)]   cross-entropy, KL[...] the same way
  IC[p(x, y | z)]  IC[0.5]   information content
  E_{p(x | y)}[ ... ]        expectation over tied variables
  2 * H[X] + H[Y] - 0.5      numbers, sums, differences, scaling
  lhs == rhs  (also <=, >=, !=)
a lowercase name without '=' takes its outcome from --observe name=outcome
)";

const char* const exit_codes = "exit codes: 0 success, 1 verification failed, 2 usage or input error";

std::string number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<std::pair<std::string, std::string>> split_bindings(const std::vector<std::string>& items) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : items) {
    std::size_t start = 0;
    while (start <= item.size()) {
      const auto comma = std::min(item.find(',', start), item.size());
      const auto part = item.substr(start, comma - start);
      start = comma + 1;
      if (part.empty()) continue;
      const auto eq = part.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == part.size())
        throw InvalidQuery("--observe expects name=outcome, got '" + part + "'");
      out.emplace_back(part.substr(0, eq), part.substr(eq + 1));
    }
  }
  return out;
}

void report_parse_error(std::ostream& err, const std::string& text, const ParseError& e) {
  err << e.what() << "\n  " << text << "\n  " << std::string(e.offset(), ' ') << "^\n";
  if (!e.expected().empty()) {
    err << "expected one of:";
    for (const auto& t : e.expected()) err << ' ' << t;
    err << '\n';
  }
  err << grammar_help;
}

struct Options {
  std::string base = "nats";
  LogBase log_base() const { return base == "bits" ? LogBase::Bits : LogBase::Nats; }

  std::string expression;
  std::string dist;
  std::string q;
  std::vector<std::string> observe;
  std::vector<std::string> x_group;

  std::string suite;
  std::size_t seeds = 500;
  std::uint64_t seed = 1;
  bool json = false;

  std::uint64_t n = 0, r = 0;
  std::optional<double> rho;
  bool csv = false;

  std::string config;
  std::string out = "-";
};

int run_eval(const Options& o, std::ostream& out, std::ostream& err) {
  expr::Expression e;
  try {
    e = expr::parse(o.expression);
  } catch (const ParseError& pe) {
    report_parse_error(err, o.expression, pe);
    return 2;
  }
  const auto p = load_distribution(o.dist);
  std::optional<UnnormalizedWeight> q;
  if (!o.q.empty()) {
    auto loaded = load_distribution_file(o.q);
    if (auto* d = std::get_if<JointDistribution>(&loaded))
      q.emplace(*d);
    else
      q.emplace(std::get<UnnormalizedWeight>(std::move(loaded)));
  }
  expr::Context ctx{&p, q ? &*q : nullptr, expr::resolve_bindings(p.shape(), split_bindings(o.observe)), o.log_base()};
  if (e.kind == expr::NodeKind::Comparison) {
    const double lhs = expr::evaluate_number(e.children[0], ctx);
    const double rhs = expr::evaluate_number(e.children[1], ctx);
    const bool holds = expr::compare(lhs, e.op, rhs);
    out << (holds ? "true" : "false") << "  lhs=" << number(lhs) << " rhs=" << number(rhs) << '\n';
    return holds ? 0 : 1;
  }
  out << number(expr::evaluate_number(e, ctx)) << '\n';
  return 0;
}

int run_diagram(const Options& o, std::ostream& out) {
  const auto p = load_distribution(o.dist);
  const auto observed = expr::resolve_bindings(p.shape(), split_bindings(o.observe));
  const auto table = diagram(p, observed, o.x_group, o.log_base());
  std::size_t width = 0;
  for (const auto& row : table) width = std::max(width, row.label.size());
  for (const auto& row : table) out << std::left << std::setw(static_cast<int>(width) + 2) << row.label << number(row.value) << '\n';
  return 0;
}

int print_reports(const std::vector<identities::SearchReport>& reports, bool json, std::ostream& out) {
  int failures = 0;
  nlohmann::json all = nlohmann::json::array();
  for (const auto& r : reports) {
    failures += !r.as_expected();
    if (json)
      all.push_back(identities::to_json(r));
    else
      out << format_report(r) << '\n';
  }
  if (json)
    out << all.dump(2) << '\n';
  else
    out << reports.size() - static_cast<std::size_t>(failures) << '/' << reports.size() << " as expected\n";
  return failures ? 1 : 0;
}

int run_check(const Options& o, std::ostream& out) {
  const auto suite = o.suite.empty() ? identities::default_suite() : identities::load_suite(o.suite);
  return print_reports(identities::check_suite(suite, o.seeds, o.seed), o.json, out);
}

int run_search(const Options& o, std::ostream& out, std::ostream& err) {
  identities::IdentitySuite suite;
  try {
    suite.entries.push_back(identities::make_identity("search", o.expression, identities::Expect::Violation));
  } catch (const ParseError& pe) {
    report_parse_error(err, o.expression, pe);
    return 2;
  }
  const auto reports = identities::check_suite(suite, o.seeds, o.seed);
  const auto& r = reports.front();
  if (o.json) {
    out << identities::to_json(r).dump(2) << '\n';
  } else {
    out << format_report(r) << '\n';
    if (r.witness) out << "witness: " << r.witness->dump() << '\n';
  }
  return r.status == identities::Status::Violated ? 0 : 1;
}

int run_verify(const Options& o, std::ostream& out, std::ostream& err) {
  identities::PaperReport rep;
  try {
    rep = identities::verify_paper_witnesses();
  } catch (const MismatchAgainstPaper& e) {
    err << "mismatch: " << e.what() << '\n';
    return 1;
  }
  const auto show = [&](const char* title, const std::vector<identities::PaperValue>& values) {
    out << title << '\n';
    for (const auto& v : values)
      out << "  " << std::left << std::setw(36) << v.label << number(in_base(v.computed, o.log_base()))
          << "  (expected " << number(in_base(v.expected, o.log_base())) << ")\n";
  };
  show("three-cell distribution, y=1 observed:", rep.witness1);
  show("chaining distribution:", rep.witness2);
  out << "variable order reversed: " << (rep.permutation_invariant ? "same values" : "DIFFERENT values") << '\n';
  return rep.permutation_invariant ? 0 : 1;
}

int run_stirling(const Options& o, std::ostream& out) {
  const auto rep = stirling::stirling_bound({o.n, o.r, o.rho}, o.log_base());
  if (o.csv) {
    out << "n,r,rho,exact,bound,error,error_bound\n"
        << o.n << ',' << o.r << ',' << number(o.rho.value_or(static_cast<double>(o.r) / static_cast<double>(o.n)))
        << ',' << number(rep.exact) << ',' << number(rep.bound) << ',' << number(rep.error) << ','
        << number(rep.error_bound) << '\n';
    return 0;
  }
  out << "exact        " << number(rep.exact) << '\n'
      << "bound        " << number(rep.bound) << '\n'
      << "error        " << number(rep.error) << '\n'
      << "error_bound  " << number(rep.error_bound) << '\n';
  return 0;
}

int run_sim(const Options& o, std::ostream& out, std::ostream& err) {
  const auto cfg = sim::load_config(o.config);
  const auto result = sim::run_sim(cfg);
  for (const auto& line : result.log) err << line << '\n';
  if (o.out == "-") {
    sim::write_csv(out, cfg, result, o.log_base());
  } else {
    std::ofstream file(o.out, std::ios::binary);
    if (!file) throw ConfigError("cannot write " + o.out);
    sim::write_csv(file, cfg, result, o.log_base());
  }
  err << "acquisitions to 100% eval accuracy: " << result.acquisitions_to_target
      << (result.reached_target ? "" : " (not reached)") << '\n';
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"exact information quantities over finite distributions", "infoq"};
  app.footer(exit_codes);
  app.require_subcommand(1);
  app.add_option("--base", o.base, "units for printed values")->check(CLI::IsMember({"nats", "bits"}));

  auto* eval = app.add_subcommand("eval", "evaluate an expression against a distribution file");
  eval->add_option("expression", o.expression)->required();
  eval->add_option("--dist", o.dist, "distribution JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--q", o.q, "q distribution or weight JSON")->check(CLI::ExistingFile);
  eval->add_option("--observe", o.observe, "bindings name=outcome");
  eval->footer(grammar_help);

  auto* diag = app.add_subcommand("diagram", "the eight quantities relating X and an observed y");
  diag->add_option("--dist", o.dist)->required()->check(CLI::ExistingFile);
  diag->add_option("--observe", o.observe, "the observed variable, name=outcome")->required();
  diag->add_option("--x", o.x_group, "variables forming X (default: all others)")->delimiter(',');

  auto* check = app.add_subcommand("check", "run an identity suite (the built-in one without a file)");
  check->add_option("suite", o.suite, "suite file: 'name: expr  # expect: always|violation' per line")
      ->check(CLI::ExistingFile);
  check->add_option("--seeds", o.seeds, "random distributions per entry")->check(CLI::PositiveNumber);
  check->add_option("--seed", o.seed);
  check->add_flag("--json", o.json);

  auto* search = app.add_subcommand("search", "look for a distribution violating a comparison");
  search->add_option("expression", o.expression)->required();
  search->add_option("--seeds", o.seeds, "random distributions to try")->check(CLI::PositiveNumber);
  search->add_option("--seed", o.seed);
  search->add_flag("--json", o.json);
  search->footer(grammar_help);

  auto* verify = app.add_subcommand("verify-paper", "recompute the two counterexample distributions");

  auto* stir = app.add_subcommand("stirling", "log binomial against the entropy bound");
  stir->add_option("--n", o.n)->required();
  stir->add_option("--r", o.r)->required();
  stir->add_option("--rho", o.rho, "defaults to r/n");
  stir->add_flag("--csv", o.csv);

  auto* sim = app.add_subcommand("sim", "active-learning simulation, CSV out");
  sim->add_option("--config", o.config)->required()->check(CLI::ExistingFile);
  sim->add_option("--out", o.out, "CSV path, '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*eval) return run_eval(o, out, err);
    if (*diag) return run_diagram(o, out);
    if (*check) return run_check(o, out);
    if (*search) return run_search(o, out, err);
    if (*verify) return run_verify(o, out, err);
    if (*stir) return run_stirling(o, out);
    if (*sim) return run_sim(o, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n' << grammar_help;
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"infoq"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace infoq::cli
