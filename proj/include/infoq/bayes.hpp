#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "infoq/dist.hpp"
#include "json.hpp"

namespace infoq::bayes {

// A discriminative model over finite hypotheses: p(y, w | x) = p(y | x, w) p(w).
class BayesModel {
 public:
  BayesModel() = default;
  // likelihood[w][x][y] = p(y | x, w). Rows and prior are validated like
  // distributions (renormalized within 1e-6, rejected beyond).
  BayesModel(std::vector<std::string> hypotheses, std::vector<double> prior, std::vector<std::string> inputs,
             std::vector<std::string> labels, const std::vector<std::vector<std::vector<double>>>& likelihood);

  std::size_t hypotheses() const noexcept { return hypotheses_.size(); }
  std::size_t inputs() const noexcept { return inputs_.size(); }
  std::size_t labels() const noexcept { return labels_.size(); }
  const std::vector<std::string>& hypothesis_names() const noexcept { return hypotheses_; }
  const std::vector<std::string>& input_names() const noexcept { return inputs_; }
  const std::vector<std::string>& label_names() const noexcept { return labels_; }
  const std::vector<double>& prior() const noexcept { return prior_; }

  double likelihood(std::size_t w, std::size_t x, std::size_t y) const {
    return table_[(w * inputs() + x) * labels() + y];
  }

  // Throws DomainError when x or y is out of range.
  void check(std::size_t x, std::optional<std::size_t> y = std::nullopt) const;

 private:
  std::vector<std::string> hypotheses_;
  std::vector<double> prior_;
  std::vector<std::string> inputs_;
  std::vector<std::string> labels_;
  std::vector<double> table_;
};

// Labelled pairs (x index, y index).
using Dataset = std::vector<std::pair<std::size_t, std::size_t>>;
// p(w | D), indexed like the model's hypotheses.
using Posterior = std::vector<double>;

BayesModel model_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const BayesModel& m);
BayesModel load_model(const std::string& path);

// Exact posterior by enumeration in log space. Throws ZeroEvidence.
Posterior posterior(const BayesModel& m, const Dataset& data);
// One more observation on top of `post`. Throws ZeroEvidence.
Posterior update(const BayesModel& m, const Posterior& post, std::size_t x, std::size_t y);
double log_evidence(const BayesModel& m, const Dataset& data);

// p(y | x, D) = sum_w p(w | D) p(y | x, w).
std::vector<double> predictive(const BayesModel& m, const Posterior& post, std::size_t x);

// Shannon entropy (nats) of a probability vector, 0 log 0 = 0.
double entropy_of(const std::vector<double>& p);

// The joint over Omega and Y1..Yb for inputs xs under `post`, as a distribution
// for the generic quantities module.
JointDistribution joint(const BayesModel& m, const Posterior& post, const std::vector<std::size_t>& xs);

struct ElboReport {
  double elbo = 0.0;
  double log_evidence = 0.0;
  double kl_gap = 0.0;  // KL(q || p(w | D))
};

// elbo = sum_i E_q log p(y_i | x_i, w) - KL(q || p(w)). Throws SupportMismatch
// when q puts mass on a hypothesis the posterior rules out.
ElboReport elbo_vi(const BayesModel& m, const Dataset& data, const std::vector<double>& q);

// p(x, z) = p(z) p_theta(x | z) with a variational table q_phi(z | x).
struct LatentVarModel {
  std::vector<double> prior_z;
  std::vector<std::vector<double>> likelihood;  // [z][x] = p_theta(x | z)
  std::vector<std::vector<double>> q;           // [x][z] = q_phi(z | x)

  std::size_t latents() const { return prior_z.size(); }
  std::size_t observations() const { return likelihood.empty() ? 0 : likelihood[0].size(); }
  // Throws InvalidDistribution on shape or normalization problems.
  void validate() const;
};

struct VaeTerms {
  double entropy = 0.0;       // IC(p(x)) under the model marginal
  double cross_entropy = 0.0; // CE(q(Z|x), p(x|Z)) = E_q -log p(x|z)
  double kl_prior = 0.0;      // KL(q(Z|x) || p(Z))
  double bound = 0.0;         // cross_entropy + kl_prior
  double gap = 0.0;           // bound - entropy
  double kl_posterior = 0.0;  // KL(q(Z|x) || p(Z|x))
};

struct VaeReport {
  std::vector<VaeTerms> per_x;  // entries for x with p(x) = 0 are left at zero
  VaeTerms expected;            // averaged over the data marginal
};

// `data_marginal` defaults to the model's own p(x). Throws SupportMismatch when
// q(z|x) > 0 where p(z|x) = 0 for an x the marginal weights, and
// ZeroProbabilityEvent when the data marginal weights an x with p(x) = 0.
VaeReport elbo_vae(const LatentVarModel& lv, const std::optional<std::vector<double>>& data_marginal = std::nullopt);

// I[Omega; Y | x, D] = H[Y | x, D] - E_w H[Y | x, w].
double bald(const BayesModel& m, const Posterior& post, std::size_t x);
// I[Omega; y | x, D] = H(p(w | D)) - H(p(w | x, y, D)); may be negative.
// Throws ZeroProbabilityEvent when p(y | x, D) = 0.
double csd(const BayesModel& m, const Posterior& post, std::size_t x, std::size_t y);
// I[y; Omega | x, D] = KL(p(w | x, y, D) || p(w | D)).
double surprise(const BayesModel& m, const Posterior& post, std::size_t x, std::size_t y);

struct CsdDecomposition {
  double term3 = 0.0;  // E_{p(w|D)} H[w|D] - E_{p(w|x,y,D)} H[w|D]
  double surprise = 0.0;
  double csd = 0.0;
  // H[y | x, Omega, D] computed directly and by importance weighting.
  double conditional_entropy = 0.0;
  double conditional_entropy_importance = 0.0;
  // H[y | x, D] - H[y | x, Omega, D]
  double surprise_from_entropies = 0.0;
};

CsdDecomposition csd_decomposition(const BayesModel& m, const Posterior& post, std::size_t x, std::size_t y);

struct BatchLimits {
  std::size_t max_batch = 6;
  std::size_t max_configurations = 1000000;
  std::size_t max_hypotheses = 10000;
};

// Without ys: I[Omega; Y1..Yb | x1..xb, D] by enumerating label configurations.
// With ys: I[Omega; y1..yb | x1..xb, D]. Throws BatchTooLarge.
double batch_score(const BayesModel& m, const Posterior& post, const std::vector<std::size_t>& xs,
                   const std::optional<std::vector<std::size_t>>& ys = std::nullopt, const BatchLimits& limits = {});

// Random model with Dirichlet(1)-like rows; `zero_rate` zeroes likelihood cells
// at random (keeping at least one positive entry per row).
BayesModel random_model(std::mt19937_64& rng, std::size_t hypotheses, std::size_t inputs, std::size_t labels,
                        double zero_rate = 0.0);
std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n, double floor = 0.0);

}  // namespace infoq::bayes
