#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "infoq/bayes.hpp"
#include "infoq/quantities.hpp"
#include "json.hpp"

namespace infoq::sim {

enum class Acquisition { Uniform, Bald, Csd, BatchBald, BatchCsd };

Acquisition parse_acquisition(const std::string& name);
std::string acquisition_name(Acquisition a);

// k-threshold classifiers on a 1-D grid: hypothesis t labels x as 1 iff
// x >= t, for t = 0..grid, and flips labels with probability epsilon.
struct ThresholdTask {
  std::size_t grid = 32;
  std::size_t copies = 2;
  double epsilon = 0.05;
};

struct SimConfig {
  bayes::BayesModel model;
  bayes::Dataset pool;
  bayes::Dataset initial;
  bayes::Dataset eval;
  Acquisition acquisition = Acquisition::Csd;
  std::size_t batch_size = 1;
  std::size_t steps = 40;
  std::uint64_t seed = 0;
  double noise_rate = 0.0;
  // set when the pool and eval set are generated; the true threshold is drawn
  // from the seed
  std::optional<ThresholdTask> task;

  // Throws ConfigError.
  void validate() const;
};

// `base_dir` resolves a relative "model" path.
SimConfig config_from_json(const nlohmann::json& doc, const std::string& base_dir = ".");
SimConfig load_config(const std::string& path);

// Generated model, pool (copies of every grid point) and eval set (each grid
// point once), all labelled by the true threshold.
struct TaskInstance {
  bayes::BayesModel model;
  bayes::Dataset pool;
  bayes::Dataset eval;
  std::size_t threshold = 0;
};

TaskInstance make_threshold_task(const ThresholdTask& task, std::uint64_t seed);

struct SimRow {
  std::size_t step = 0;
  std::size_t pool_index = 0;
  std::size_t x = 0;
  std::size_t y = 0;
  double score = 0.0;
  double posterior_entropy = 0.0;
  double accuracy = 0.0;
  double logloss = 0.0;
};

struct SimResult {
  std::vector<SimRow> rows;
  std::vector<std::string> log;
  double initial_accuracy = 0.0;
  // Rows acquired before eval accuracy first reached 1, or steps * batch_size + 1
  // when it never did.
  std::size_t acquisitions_to_target = 0;
  bool reached_target = false;
};

SimResult run_sim(const SimConfig& cfg);

// Argmax-predictive accuracy (ties to the lowest label) and mean log-loss in nats.
std::pair<double, double> evaluate(const bayes::BayesModel& m, const bayes::Posterior& post,
                                   const bayes::Dataset& eval);

// step,x,y,score,posterior_entropy,accuracy,logloss
void write_csv(std::ostream& out, const SimConfig& cfg, const SimResult& r, LogBase base = LogBase::Nats);

}  // namespace infoq::sim
