#include "infoq/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "infoq/errors.hpp"
#include "infoq/io.hpp"

namespace infoq::bayes {

namespace {

constexpr double kZeroMass = 1e-300;

void normalize_row(std::vector<double>& row, const std::string& what) {
  if (row.empty()) throw InvalidDistribution(what + " is empty");
  for (double v : row)
    if (!std::isfinite(v) || v < 0.0) throw InvalidDistribution(what + " has a negative or non-finite entry");
  const double sum = std::accumulate(row.begin(), row.end(), 0.0);
  const double off = std::abs(sum - 1.0);
  if (off > kRenormTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << what << " sums to " << sum << ", not 1";
    throw InvalidDistribution(os.str());
  }
  if (off > kNormTolerance)
    for (double& v : row) v /= sum;
}

void check_unique(const std::vector<std::string>& names, const std::string& what) {
  if (names.empty()) throw InvalidDistribution(what + " must not be empty");
  auto sorted = names;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidDistribution(what + " contains a duplicate name");
}

double log_sum_exp(const std::vector<double>& logs) {
  const double top = *std::max_element(logs.begin(), logs.end());
  if (top == -std::numeric_limits<double>::infinity()) return top;
  double s = 0.0;
  for (double l : logs) s += std::exp(l - top);
  return top + std::log(s);
}

std::vector<double> log_weights(const BayesModel& m, const Posterior& start, const Dataset& data) {
  std::vector<double> logs(m.hypotheses());
  for (std::size_t w = 0; w < m.hypotheses(); ++w) {
    logs[w] = start[w] > 0 ? std::log(start[w]) : -std::numeric_limits<double>::infinity();
    for (const auto& [x, y] : data) {
      const double l = m.likelihood(w, x, y);
      logs[w] += l > 0 ? std::log(l) : -std::numeric_limits<double>::infinity();
    }
  }
  return logs;
}

Posterior normalize_logs(const std::vector<double>& logs) {
  const double z = log_sum_exp(logs);
  if (!std::isfinite(z)) throw ZeroEvidence("the observations have zero probability under every hypothesis");
  Posterior out(logs.size());
  for (std::size_t w = 0; w < logs.size(); ++w) out[w] = std::exp(logs[w] - z);
  return out;
}

void check_data(const BayesModel& m, const Dataset& data) {
  for (const auto& [x, y] : data) m.check(x, y);
}

void check_posterior(const BayesModel& m, const Posterior& post) {
  if (post.size() != m.hypotheses())
    throw InvalidDistribution("posterior has " + std::to_string(post.size()) + " entries, model has " +
                              std::to_string(m.hypotheses()) + " hypotheses");
}

// KL(a || b) over vectors; b must be positive wherever a is.
double kl_vec(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] <= kZeroMass) continue;
    if (b[i] <= 0.0) throw SupportMismatch("KL is infinite: second argument vanishes where the first does not");
    s += a[i] * std::log(a[i] / b[i]);
  }
  return s;
}

std::vector<std::string> string_list(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_array()) throw InvalidDistribution(std::string("model needs a \"") + key + "\" array");
  std::vector<std::string> out;
  for (const auto& v : doc.at(key)) out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  return out;
}

}  // namespace

BayesModel::BayesModel(std::vector<std::string> hypotheses, std::vector<double> prior, std::vector<std::string> inputs,
                       std::vector<std::string> labels, const std::vector<std::vector<std::vector<double>>>& likelihood)
    : hypotheses_(std::move(hypotheses)),
      prior_(std::move(prior)),
      inputs_(std::move(inputs)),
      labels_(std::move(labels)) {
  check_unique(hypotheses_, "hypotheses");
  check_unique(inputs_, "inputs");
  check_unique(labels_, "labels");
  if (prior_.size() != hypotheses_.size()) throw InvalidDistribution("prior length differs from the hypothesis count");
  normalize_row(prior_, "prior");
  if (likelihood.size() != hypotheses_.size()) throw InvalidDistribution("likelihood needs one table per hypothesis");
  table_.reserve(hypotheses_.size() * inputs_.size() * labels_.size());
  for (std::size_t w = 0; w < hypotheses_.size(); ++w) {
    if (likelihood[w].size() != inputs_.size())
      throw InvalidDistribution("likelihood for '" + hypotheses_[w] + "' needs one row per input");
    for (std::size_t x = 0; x < inputs_.size(); ++x) {
      auto row = likelihood[w][x];
      if (row.size() != labels_.size())
        throw InvalidDistribution("likelihood row for '" + hypotheses_[w] + "', '" + inputs_[x] +
                                  "' needs one entry per label");
      normalize_row(row, "likelihood row for '" + hypotheses_[w] + "', '" + inputs_[x] + "'");
      table_.insert(table_.end(), row.begin(), row.end());
    }
  }
}

void BayesModel::check(std::size_t x, std::optional<std::size_t> y) const {
  if (x >= inputs()) throw DomainError("input index " + std::to_string(x) + " is out of range");
  if (y && *y >= labels()) throw DomainError("label index " + std::to_string(*y) + " is out of range");
}

BayesModel model_from_json(const nlohmann::json& doc) {
  try {
    auto hyps = string_list(doc, "hypotheses");
    auto inputs = string_list(doc, "inputs");
    auto labels = string_list(doc, "labels");
    return BayesModel(std::move(hyps), doc.at("prior").get<std::vector<double>>(), std::move(inputs),
                      std::move(labels), doc.at("likelihood").get<std::vector<std::vector<std::vector<double>>>>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidDistribution(std::string("malformed model document: ") + e.what());
  }
}

nlohmann::json to_json(const BayesModel& m) {
  std::vector<std::vector<std::vector<double>>> lik(m.hypotheses(),
                                                    std::vector<std::vector<double>>(m.inputs(), std::vector<double>(m.labels())));
  for (std::size_t w = 0; w < m.hypotheses(); ++w)
    for (std::size_t x = 0; x < m.inputs(); ++x)
      for (std::size_t y = 0; y < m.labels(); ++y) lik[w][x][y] = m.likelihood(w, x, y);
  return {{"hypotheses", m.hypothesis_names()},
          {"prior", m.prior()},
          {"inputs", m.input_names()},
          {"labels", m.label_names()},
          {"likelihood", lik}};
}

BayesModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

Posterior posterior(const BayesModel& m, const Dataset& data) {
  check_data(m, data);
  return normalize_logs(log_weights(m, m.prior(), data));
}

Posterior update(const BayesModel& m, const Posterior& post, std::size_t x, std::size_t y) {
  check_posterior(m, post);
  m.check(x, y);
  return normalize_logs(log_weights(m, post, {{x, y}}));
}

double log_evidence(const BayesModel& m, const Dataset& data) {
  check_data(m, data);
  return log_sum_exp(log_weights(m, m.prior(), data));
}

std::vector<double> predictive(const BayesModel& m, const Posterior& post, std::size_t x) {
  check_posterior(m, post);
  m.check(x);
  std::vector<double> out(m.labels(), 0.0);
  for (std::size_t w = 0; w < m.hypotheses(); ++w)
    for (std::size_t y = 0; y < m.labels(); ++y) out[y] += post[w] * m.likelihood(w, x, y);
  return out;
}

double entropy_of(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > kZeroMass) h -= v * std::log(v);
  return h;
}

JointDistribution joint(const BayesModel& m, const Posterior& post, const std::vector<std::size_t>& xs) {
  check_posterior(m, post);
  std::vector<Variable> vars{{"Omega", m.hypothesis_names()}};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    m.check(xs[i]);
    vars.push_back({"Y" + std::to_string(i + 1), m.label_names()});
  }
  const TensorShape shape(vars);
  std::vector<double> cells(shape.cell_count());
  std::vector<std::size_t> idx(shape.rank());
  for (std::size_t flat = 0; flat < cells.size(); ++flat) {
    shape.unravel(flat, idx);
    double p = post[idx[0]];
    for (std::size_t i = 0; i < xs.size(); ++i) p *= m.likelihood(idx[0], xs[i], idx[i + 1]);
    cells[flat] = p;
  }
  return {std::move(vars), std::move(cells)};
}

ElboReport elbo_vi(const BayesModel& m, const Dataset& data, const std::vector<double>& q_in) {
  if (q_in.size() != m.hypotheses()) throw InvalidDistribution("q needs one entry per hypothesis");
  std::vector<double> q = q_in;
  normalize_row(q, "q");
  const Posterior post = posterior(m, data);
  ElboReport out;
  out.log_evidence = log_evidence(m, data);
  for (std::size_t w = 0; w < m.hypotheses(); ++w) {
    if (q[w] <= kZeroMass) continue;
    if (post[w] <= 0.0)
      throw SupportMismatch("q puts mass on hypothesis '" + m.hypothesis_names()[w] + "', which the data rule out");
    double ll = 0.0;
    for (const auto& [x, y] : data) ll += std::log(m.likelihood(w, x, y));
    out.elbo += q[w] * (ll - std::log(q[w] / m.prior()[w]));
  }
  out.kl_gap = kl_vec(q, post);
  return out;
}

void LatentVarModel::validate() const {
  auto check_row = [](std::vector<double> row, const std::string& what) { normalize_row(row, what); };
  check_row(prior_z, "p(z)");
  if (likelihood.size() != latents()) throw InvalidDistribution("p(x|z) needs one row per latent");
  const std::size_t nx = observations();
  if (nx == 0) throw InvalidDistribution("p(x|z) has no observations");
  for (std::size_t z = 0; z < latents(); ++z) {
    if (likelihood[z].size() != nx) throw InvalidDistribution("p(x|z) rows differ in length");
    check_row(likelihood[z], "p(x|z=" + std::to_string(z) + ")");
  }
  if (q.size() != nx) throw InvalidDistribution("q(z|x) needs one row per observation");
  for (std::size_t x = 0; x < nx; ++x) {
    if (q[x].size() != latents()) throw InvalidDistribution("q(z|x) rows need one entry per latent");
    check_row(q[x], "q(z|x=" + std::to_string(x) + ")");
  }
}

VaeReport elbo_vae(const LatentVarModel& lv, const std::optional<std::vector<double>>& data_marginal) {
  lv.validate();
  const std::size_t nz = lv.latents(), nx = lv.observations();
  std::vector<double> px(nx, 0.0);
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t x = 0; x < nx; ++x) px[x] += lv.prior_z[z] * lv.likelihood[z][x];
  std::vector<double> weights = data_marginal.value_or(px);
  if (weights.size() != nx) throw InvalidDistribution("data marginal needs one entry per observation");
  normalize_row(weights, "data marginal");

  VaeReport out;
  out.per_x.resize(nx);
  for (std::size_t x = 0; x < nx; ++x) {
    if (weights[x] <= kZeroMass) continue;
    if (px[x] <= 0.0) throw ZeroProbabilityEvent("the data marginal weights an x the model gives probability 0");
    VaeTerms& t = out.per_x[x];
    std::vector<double> post_z(nz);
    for (std::size_t z = 0; z < nz; ++z) post_z[z] = lv.prior_z[z] * lv.likelihood[z][x] / px[x];
    t.entropy = -std::log(px[x]);
    for (std::size_t z = 0; z < nz; ++z) {
      const double qz = lv.q[x][z];
      if (qz <= kZeroMass) continue;
      if (post_z[z] <= 0.0) throw SupportMismatch("q(z|x) puts mass where p(z|x) = 0");
      t.cross_entropy -= qz * std::log(lv.likelihood[z][x]);
      t.kl_prior += qz * std::log(qz / lv.prior_z[z]);
    }
    t.kl_posterior = kl_vec(lv.q[x], post_z);
    t.bound = t.cross_entropy + t.kl_prior;
    t.gap = t.bound - t.entropy;

    VaeTerms& e = out.expected;
    e.entropy += weights[x] * t.entropy;
    e.cross_entropy += weights[x] * t.cross_entropy;
    e.kl_prior += weights[x] * t.kl_prior;
    e.bound += weights[x] * t.bound;
    e.gap += weights[x] * t.gap;
    e.kl_posterior += weights[x] * t.kl_posterior;
  }
  return out;
}

double bald(const BayesModel& m, const Posterior& post, std::size_t x) {
  const double marginal = entropy_of(predictive(m, post, x));
  double expected = 0.0;
  std::vector<double> row(m.labels());
  for (std::size_t w = 0; w < m.hypotheses(); ++w) {
    if (post[w] <= 0.0) continue;
    for (std::size_t y = 0; y < m.labels(); ++y) row[y] = m.likelihood(w, x, y);
    expected += post[w] * entropy_of(row);
  }
  return marginal - expected;
}

namespace {

Posterior observed_update(const BayesModel& m, const Posterior& post, std::size_t x, std::size_t y) {
  const auto pred = predictive(m, post, x);
  m.check(x, y);
  if (pred[y] <= 0.0)
    throw ZeroProbabilityEvent("label '" + m.label_names()[y] + "' has probability 0 at input '" +
                               m.input_names()[x] + "'");
  return update(m, post, x, y);
}

}  // namespace

double csd(const BayesModel& m, const Posterior& post, std::size_t x, std::size_t y) {
  return entropy_of(post) - entropy_of(observed_update(m, post, x, y));
}

double surprise(const BayesModel& m, const Posterior& post, std::size_t x, std::size_t y) {
  return kl_vec(observed_update(m, post, x, y), post);
}

CsdDecomposition csd_decomposition(const BayesModel& m, const Posterior& post, std::size_t x, std::size_t y) {
  const Posterior after = observed_update(m, post, x, y);
  const double p_y = predictive(m, post, x)[y];
  CsdDecomposition out;
  // H[w|D] = -log p(w|D) evaluated under the old and the new posterior
  double before_ce = 0.0, after_ce = 0.0;
  for (std::size_t w = 0; w < m.hypotheses(); ++w) {
    if (post[w] <= 0.0) continue;
    before_ce -= post[w] * std::log(post[w]);
    if (after[w] > kZeroMass) after_ce -= after[w] * std::log(post[w]);
    const double lik = m.likelihood(w, x, y);
    if (lik > 0.0) {
      const double ic = -std::log(lik);
      if (after[w] > kZeroMass) out.conditional_entropy += after[w] * ic;
      out.conditional_entropy_importance += post[w] * (lik / p_y) * ic;
    }
  }
  out.term3 = before_ce - after_ce;
  out.surprise = kl_vec(after, post);
  out.csd = entropy_of(post) - entropy_of(after);
  out.surprise_from_entropies = -std::log(p_y) - out.conditional_entropy;
  return out;
}

double batch_score(const BayesModel& m, const Posterior& post, const std::vector<std::size_t>& xs,
                   const std::optional<std::vector<std::size_t>>& ys, const BatchLimits& limits) {
  check_posterior(m, post);
  if (xs.empty()) throw InvalidQuery("batch needs at least one input");
  if (xs.size() > limits.max_batch)
    throw BatchTooLarge("batch of " + std::to_string(xs.size()) + " exceeds the cap of " +
                        std::to_string(limits.max_batch));
  if (m.hypotheses() > limits.max_hypotheses)
    throw BatchTooLarge(std::to_string(m.hypotheses()) + " hypotheses exceed the cap of " +
                        std::to_string(limits.max_hypotheses));
  for (std::size_t x : xs) m.check(x);

  if (ys) {
    if (ys->size() != xs.size()) throw InvalidQuery("batch labels and inputs differ in length");
    Dataset batch;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      m.check(xs[i], (*ys)[i]);
      batch.emplace_back(xs[i], (*ys)[i]);
    }
    const auto logs = log_weights(m, post, batch);
    if (!std::isfinite(log_sum_exp(logs)))
      throw ZeroProbabilityEvent("the batch labels have probability 0 under the posterior");
    return entropy_of(post) - entropy_of(normalize_logs(logs));
  }

  double configs = 1.0;
  for (std::size_t i = 0; i < xs.size(); ++i) configs *= static_cast<double>(m.labels());
  if (configs > static_cast<double>(limits.max_configurations))
    throw BatchTooLarge("|Y|^b = " + std::to_string(static_cast<std::uint64_t>(configs)) + " label configurations exceed the cap of " +
                        std::to_string(limits.max_configurations));

  // H[Y1..Yb | x, D] by enumeration; E_w H[Y1..Yb | x, w] factorizes over i.
  const std::size_t n = static_cast<std::size_t>(configs);
  std::vector<std::size_t> ys_cfg(xs.size(), 0);
  double joint_entropy = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t code = c;
    for (std::size_t i = xs.size(); i-- > 0;) {
      ys_cfg[i] = code % m.labels();
      code /= m.labels();
    }
    double p = 0.0;
    for (std::size_t w = 0; w < m.hypotheses(); ++w) {
      if (post[w] <= 0.0) continue;
      double term = post[w];
      for (std::size_t i = 0; i < xs.size() && term > 0.0; ++i) term *= m.likelihood(w, xs[i], ys_cfg[i]);
      p += term;
    }
    if (p > kZeroMass) joint_entropy -= p * std::log(p);
  }
  double conditional = 0.0;
  std::vector<double> row(m.labels());
  for (std::size_t w = 0; w < m.hypotheses(); ++w) {
    if (post[w] <= 0.0) continue;
    for (std::size_t x : xs) {
      for (std::size_t y = 0; y < m.labels(); ++y) row[y] = m.likelihood(w, x, y);
      conditional += post[w] * entropy_of(row);
    }
  }
  return joint_entropy - conditional;
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n, double floor) {
  std::exponential_distribution<double> draw(1.0);
  std::vector<double> v(n);
  double sum = 0.0;
  for (double& x : v) sum += (x = draw(rng) + floor);
  for (double& x : v) x /= sum;
  return v;
}

BayesModel random_model(std::mt19937_64& rng, std::size_t hypotheses, std::size_t inputs, std::size_t labels,
                        double zero_rate) {
  std::bernoulli_distribution zero(zero_rate);
  std::vector<std::string> hs, xs, ls;
  for (std::size_t i = 0; i < hypotheses; ++i) hs.push_back("w" + std::to_string(i));
  for (std::size_t i = 0; i < inputs; ++i) xs.push_back("x" + std::to_string(i));
  for (std::size_t i = 0; i < labels; ++i) ls.push_back(std::to_string(i));
  std::vector<std::vector<std::vector<double>>> lik(hypotheses, std::vector<std::vector<double>>(inputs));
  for (auto& table : lik)
    for (auto& row : table) {
      row = random_simplex(rng, labels);
      if (zero_rate > 0.0) {
        const std::size_t keep = std::uniform_int_distribution<std::size_t>(0, labels - 1)(rng);
        double sum = 0.0;
        for (std::size_t y = 0; y < labels; ++y) {
          if (y != keep && zero(rng)) row[y] = 0.0;
          sum += row[y];
        }
        for (double& v : row) v /= sum;
      }
    }
  return BayesModel(std::move(hs), random_simplex(rng, hypotheses), std::move(xs), std::move(ls), lik);
}

}  // namespace infoq::bayes
