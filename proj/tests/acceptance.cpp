// One line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "expr_gen.hpp"
#include "infoq/bayes.hpp"
#include "infoq/errors.hpp"
#include "infoq/identities.hpp"
#include "infoq/sim.hpp"
#include "infoq/stirling.hpp"

using namespace infoq;

namespace {

const double ln2 = std::numbers::ln2;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Outcome witness_one() {
  Outcome o;
  const auto rep = identities::verify_paper_witnesses();
  const double e_h = std::log(1.5), h = std::log(3 * std::cbrt(2.0) / 2);
  o.require(near(rep.witness1.at(0).computed, e_h, 1e-9), "E H[x] = " + fmt(rep.witness1[0].computed));
  o.require(near(rep.witness1.at(1).computed, h, 1e-9), "H[X] = " + fmt(rep.witness1[1].computed));
  o.require(near(rep.witness1.at(2).computed, ln2 / 3, 1e-9), "gap = " + fmt(rep.witness1[2].computed));
  if (o.pass) o.detail = "ln(3/2), ln(3*2^(1/3)/2), gap ln2/3";
  return o;
}

Outcome witness_two() {
  Outcome o;
  const auto rep = identities::verify_paper_witnesses();
  const double a = rep.witness2.at(0).computed, b = rep.witness2.at(1).computed;
  const double large = std::log(6.0 / 5), small = std::log(2 * std::sqrt(3.0) * std::pow(5.0, 0.25) / 5);
  o.require(near(std::max(a, b), large, 1e-9), "larger side " + fmt(std::max(a, b)));
  o.require(near(std::min(a, b), small, 1e-9), "smaller side " + fmt(std::min(a, b)));
  o.require(std::abs(a - b) > 1e-3, "sides too close");
  o.require(rep.permutation_invariant, "values depend on variable order");
  if (o.pass) o.detail = "{" + fmt(a) + ", " + fmt(b) + "}";
  return o;
}

Outcome identity_suite() {
  Outcome o;
  const auto suite = identities::default_suite();
  const auto reports = identities::check_suite(suite, 500, 1);
  std::size_t always = 0, witnessed = 0;
  for (const auto& r : reports) {
    o.require(r.as_expected(), r.name + " not as expected");
    if (r.expected == identities::Expect::Always) {
      ++always;
      o.require(r.seeds_tried >= 500, r.name + " tried only " + std::to_string(r.seeds_tried));
    } else {
      witnessed += r.status == identities::Status::Violated;
    }
  }
  o.require(always >= 15, "only " + std::to_string(always) + " always-true entries");
  o.require(witnessed == 3, std::to_string(witnessed) + "/3 violations witnessed");
  if (o.pass) o.detail = std::to_string(always) + " identities held over 500 seeds, 3/3 violations witnessed";
  return o;
}

Outcome stirling_sweep() {
  Outcome o;
  std::size_t cases = 0;
  for (std::uint64_t n = 1; n <= 2000; ++n) {
    const long double lg_n = std::lgamma(static_cast<long double>(n) + 1);
    for (std::uint64_t r = 0; r <= n; ++r) {
      const auto rep = stirling::stirling_bound({n, r, std::nullopt});
      ++cases;
      const long double rho = static_cast<long double>(r) / n;
      long double h = -(lg_n - std::lgamma(static_cast<long double>(r) + 1) -
                        std::lgamma(static_cast<long double>(n - r) + 1));
      if (r > 0) h -= r * std::log(rho);
      if (r < n) h -= (n - r) * std::log1p(-rho);
      const std::string at = " at n=" + std::to_string(n) + " r=" + std::to_string(r);
      o.require(rep.exact <= rep.bound + 1e-12 * std::max(1.0, rep.bound), "exact > bound" + at);
      o.require(std::abs(rep.error - static_cast<double>(h)) <= 1e-8 * std::abs(static_cast<double>(h)) + 1e-15,
                "error != H(r)" + at);
      o.require(rep.error <= std::log(static_cast<double>(n)) + 1e-12, "error > log n" + at);
      if (!o.pass) return o;
    }
  }
  o.require(near(stirling::stirling_bound({10, 5, std::nullopt}).error, std::log(1024.0 / 252), 1e-9), "n=10 r=5");
  if (o.pass) o.detail = std::to_string(cases) + " (n, r) pairs";
  return o;
}

Outcome elbo_identities() {
  Outcome o;
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    const auto m = bayes::random_model(rng, 2 + i % 6, 3, 2 + i % 3);
    bayes::Dataset data;
    for (int k = 0; k < i % 7; ++k) data.emplace_back(rng() % 3, rng() % m.labels());
    double logz;
    try {
      logz = bayes::log_evidence(m, data);
    } catch (const ZeroEvidence&) {
      continue;
    }
    const auto r = bayes::elbo_vi(m, data, bayes::random_simplex(rng, m.hypotheses()));
    o.require(near(r.log_evidence, logz, 1e-9), "log evidence mismatch");
    o.require(near(r.log_evidence, r.elbo + r.kl_gap, 1e-9), "VI identity off by " + fmt(r.log_evidence - r.elbo - r.kl_gap));
    o.require(r.elbo <= r.log_evidence + 1e-12, "elbo above evidence");
    const auto exact = bayes::elbo_vi(m, data, bayes::posterior(m, data));
    o.require(near(exact.elbo, exact.log_evidence, 1e-9), "q = posterior leaves a gap");
  }
  for (int i = 0; i < 100; ++i) {
    bayes::LatentVarModel lv;
    const std::size_t nz = 2 + i % 3, nx = 2 + i % 4;
    lv.prior_z = bayes::random_simplex(rng, nz);
    for (std::size_t z = 0; z < nz; ++z) lv.likelihood.push_back(bayes::random_simplex(rng, nx));
    for (std::size_t x = 0; x < nx; ++x) lv.q.push_back(bayes::random_simplex(rng, nz));
    for (const auto& r : {bayes::elbo_vae(lv), bayes::elbo_vae(lv, bayes::random_simplex(rng, nx))}) {
      for (const auto& t : r.per_x) {
        o.require(t.entropy <= t.bound + 1e-12, "per-x bound fails");
        o.require(near(t.gap, t.kl_posterior, 1e-9), "per-x gap identity off by " + fmt(t.gap - t.kl_posterior));
      }
      o.require(r.expected.entropy <= r.expected.bound + 1e-12, "expected bound fails");
      o.require(near(r.expected.gap, r.expected.kl_posterior, 1e-9), "expected gap identity");
    }
  }
  if (o.pass) o.detail = "100 VI instances, 100 latent-variable models";
  return o;
}

Outcome bald_csd_algebra() {
  Outcome o;
  std::mt19937_64 rng(99);
  bool negative = false;
  for (int i = 0; i < 200; ++i) {
    const auto m = bayes::random_model(rng, 2 + i % 5, 3, 2 + i % 3, i % 4 == 0 ? 0.3 : 0.0);
    auto post = bayes::random_simplex(rng, m.hypotheses());
    for (std::size_t x = 0; x < m.inputs(); ++x) {
      const auto pred = bayes::predictive(m, post, x);
      double expected = 0.0;
      for (std::size_t y = 0; y < m.labels(); ++y) {
        if (pred[y] <= 0) continue;
        const auto d = bayes::csd_decomposition(m, post, x, y);
        expected += pred[y] * d.csd;
        o.require(near(d.csd, d.term3 + d.surprise, 1e-9), "csd != term3 + surprise");
        o.require(near(d.conditional_entropy, d.conditional_entropy_importance, 1e-9), "importance identity");
        negative |= d.csd < -1e-6;
      }
      o.require(near(bayes::bald(m, post, x), expected, 1e-9), "bald != E csd");
    }
    const std::vector<double> uniform(m.hypotheses(), 1.0 / static_cast<double>(m.hypotheses()));
    for (std::size_t x = 0; x < m.inputs(); ++x)
      for (std::size_t y = 0; y < m.labels(); ++y) {
        if (bayes::predictive(m, uniform, x)[y] <= 0) continue;
        o.require(std::abs(bayes::csd(m, uniform, x, y) - bayes::surprise(m, uniform, x, y)) <= 1e-9,
                  "uniform posterior: csd != surprise");
      }
  }
  o.require(negative, "no negative csd found");
  if (o.pass) o.detail = "200 models, negative csd witnessed";
  return o;
}

Outcome simulator_ordering() {
  Outcome o;
  const auto median = [](sim::Acquisition a, double noise) {
    std::vector<std::size_t> v;
    for (std::uint64_t s = 0; s < 20; ++s) {
      sim::SimConfig c;
      c.task = sim::ThresholdTask{};
      c.acquisition = a;
      c.seed = s;
      c.noise_rate = noise;
      c.steps = 40;
      v.push_back(sim::run_sim(c).acquisitions_to_target);
    }
    std::sort(v.begin(), v.end());
    return (static_cast<double>(v[9]) + static_cast<double>(v[10])) / 2;
  };
  const double csd = median(sim::Acquisition::Csd, 0), bald = median(sim::Acquisition::Bald, 0),
               uniform = median(sim::Acquisition::Uniform, 0), noisy = median(sim::Acquisition::Csd, 0.3);
  o.require(csd <= bald, "csd median above bald");
  o.require(bald <= uniform, "bald median above uniform");
  o.require(noisy > csd, "noise did not degrade csd");
  o.detail = "medians csd " + fmt(csd) + ", bald " + fmt(bald) + ", uniform " + fmt(uniform) + ", csd@0.3 " + fmt(noisy);
  return o;
}

Outcome parser_properties() {
  Outcome o;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    testing::TreeGen gen(seed);
    const auto e = gen.top();
    const auto text = expr::print(e);
    o.require(expr::parse(text) == e, "round-trip differs: " + text);
  }
  std::mt19937_64 rng(77);
  for (int i = 0; i < 200; ++i) {
    const auto [got, want] = testing::evaluation_pair(rng, i);
    o.require(std::abs(got - want) <= 1e-12, "pair " + std::to_string(i) + " off by " + fmt(got - want));
  }
  const std::vector<std::string> malformed{"",        "H[",          "H[X",        "H[X | Y", "I[X]",
                                           "H[X] +",  "CE[p(X) q(X)]", "E_{p(x)}", "2 *",     "H[X] == ",
                                           "H[X]]",   "IC[]",        "H[x=]",      "@",       "H[X] <> H[Y]"};
  for (const auto& s : malformed) {
    try {
      expr::parse(s);
      o.require(false, "accepted '" + s + "'");
    } catch (const ParseError& e) {
      o.require(e.offset() <= s.size(), "offset out of range for '" + s + "'");
    }
  }
  const std::string alphabet = "HICEKLpq_{}[]()|;,=<>!+-*.0123456789eXYZxyz \t\"#";
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    for (std::size_t k = 0, n = rng() % 40; k < n; ++k) s += alphabet[rng() % alphabet.size()];
    try {
      expr::parse(s);
    } catch (const ParseError& e) {
      o.require(e.offset() <= s.size(), "offset out of range for '" + s + "'");
    } catch (...) {
      o.require(false, "non-parse error for '" + s + "'");
    }
  }
  if (o.pass) o.detail = "500 round-trips, 200 evaluation pairs, malformed inputs rejected";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double limit;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, 1, witness_one},           {2, 1, witness_two},        {3, 60, identity_suite},
      {4, 30, stirling_sweep},       {5, 30, elbo_identities},   {6, 60, bald_csd_algebra},
      {7, 120, simulator_ordering},  {8, 10, parser_properties},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit) {
      o.pass = false;
      o.detail += " (over the " + fmt(c.limit) + " s limit)";
    }
    failed += !o.pass;
    std::printf("criterion %d: %s  %.3fs  %s\n", c.id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
