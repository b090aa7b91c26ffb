#include "infoq/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "infoq/errors.hpp"
#include "infoq/io.hpp"

namespace infoq::sim {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t which) { return std::mt19937_64(splitmix(splitmix(seed) + which)); }

std::string number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::size_t lookup(const nlohmann::json& v, const std::vector<std::string>& names, const char* what) {
  if (v.is_number_unsigned()) {
    const auto i = v.get<std::size_t>();
    if (i >= names.size()) throw ConfigError(std::string(what) + " index " + std::to_string(i) + " out of range");
    return i;
  }
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    const auto it = std::find(names.begin(), names.end(), s);
    if (it == names.end()) throw ConfigError(std::string("unknown ") + what + " '" + s + "'");
    return static_cast<std::size_t>(it - names.begin());
  }
  throw ConfigError(std::string(what) + " must be a name or an index");
}

bayes::Dataset pairs(const nlohmann::json& doc, const bayes::BayesModel& m, const char* key) {
  bayes::Dataset d;
  if (!doc.contains(key)) return d;
  if (!doc[key].is_array()) throw ConfigError(std::string("'") + key + "' must be a list of [x, y] pairs");
  for (const auto& p : doc[key]) {
    if (!p.is_array() || p.size() != 2) throw ConfigError(std::string("'") + key + "' entries must be [x, y] pairs");
    d.emplace_back(lookup(p[0], m.input_names(), "input"), lookup(p[1], m.label_names(), "label"));
  }
  return d;
}

template <class T>
T field(const nlohmann::json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

// Flips round(rate * |pool|) labels to a different label.
void add_noise(bayes::Dataset& pool, std::size_t labels, double rate, std::mt19937_64& rng) {
  if (rate <= 0 || labels < 2) return;
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const auto flips = static_cast<std::size_t>(std::llround(rate * static_cast<double>(pool.size())));
  std::uniform_int_distribution<std::size_t> other(1, labels - 1);
  for (std::size_t i = 0; i < flips; ++i) {
    auto& y = pool[order[i]].second;
    y = (y + other(rng)) % labels;
  }
}

struct Scored {
  std::size_t slot = 0;  // position in `remaining`
  double score = 0.0;
};

// Highest first, ties to the lowest pool index.
std::vector<Scored> top(std::vector<Scored> scored, std::size_t b) {
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& c) { return a.score > c.score; });
  if (scored.size() > b) scored.resize(b);
  return scored;
}

}  // namespace

Acquisition parse_acquisition(const std::string& name) {
  if (name == "uniform") return Acquisition::Uniform;
  if (name == "bald") return Acquisition::Bald;
  if (name == "csd") return Acquisition::Csd;
  if (name == "batch_bald") return Acquisition::BatchBald;
  if (name == "batch_csd") return Acquisition::BatchCsd;
  throw ConfigError("unknown acquisition '" + name + "' (uniform, bald, csd, batch_bald, batch_csd)");
}

std::string acquisition_name(Acquisition a) {
  switch (a) {
    case Acquisition::Uniform: return "uniform";
    case Acquisition::Bald: return "bald";
    case Acquisition::Csd: return "csd";
    case Acquisition::BatchBald: return "batch_bald";
    case Acquisition::BatchCsd: return "batch_csd";
  }
  return "?";
}

void SimConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(noise_rate >= 0 && noise_rate <= 1)) throw ConfigError("noise_rate must lie in [0, 1]");
  if ((acquisition == Acquisition::BatchBald || acquisition == Acquisition::BatchCsd) && batch_size > 6)
    throw ConfigError("batch acquisition supports batch_size up to 6");
  if (task) {
    if (task->grid < 2) throw ConfigError("task grid must be at least 2");
    if (task->copies < 1) throw ConfigError("task copies must be at least 1");
    if (!(task->epsilon > 0 && task->epsilon < 0.5)) throw ConfigError("task epsilon must lie in (0, 0.5)");
    return;
  }
  if (model.hypotheses() == 0) throw ConfigError("no model given");
  if (eval.empty()) throw ConfigError("the eval set is empty");
  for (const auto* d : {&pool, &initial, &eval})
    for (auto [x, y] : *d)
      if (x >= model.inputs() || y >= model.labels()) throw ConfigError("pair out of the model's range");
}

SimConfig config_from_json(const nlohmann::json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw ConfigError("the config must be a JSON object");
  SimConfig cfg;
  cfg.acquisition = parse_acquisition(field<std::string>(doc, "acquisition", "csd"));
  const auto batch = field<long long>(doc, "batch_size", 1);
  const auto steps = field<long long>(doc, "steps", 40);
  if (batch < 1) throw ConfigError("batch_size must be at least 1");
  if (steps < 0) throw ConfigError("steps must be non-negative");
  cfg.batch_size = static_cast<std::size_t>(batch);
  cfg.steps = static_cast<std::size_t>(steps);
  cfg.seed = field<std::uint64_t>(doc, "seed", 0);
  cfg.noise_rate = field<double>(doc, "noise_rate", 0.0);

  if (doc.contains("task")) {
    if (doc.contains("model") || doc.contains("pool") || doc.contains("eval") || doc.contains("initial"))
      throw ConfigError("'task' generates the model, pool and eval set; drop the explicit ones");
    const auto& t = doc["task"];
    if (field<std::string>(t, "kind", "threshold") != "threshold")
      throw ConfigError("unknown task kind (only 'threshold')");
    ThresholdTask task;
    task.grid = field<std::size_t>(t, "grid", task.grid);
    task.copies = field<std::size_t>(t, "copies", task.copies);
    task.epsilon = field<double>(t, "epsilon", task.epsilon);
    cfg.task = task;
  } else {
    if (!doc.contains("model")) throw ConfigError("either 'model' or 'task' is required");
    const auto& m = doc["model"];
    try {
      if (m.is_string()) {
        std::filesystem::path p = m.get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        cfg.model = bayes::load_model(p.string());
      } else {
        cfg.model = bayes::model_from_json(m);
      }
    } catch (const InvalidDistribution& e) {
      throw ConfigError(std::string("model: ") + e.what());
    }
    cfg.pool = pairs(doc, cfg.model, "pool");
    cfg.initial = pairs(doc, cfg.model, "initial");
    cfg.eval = pairs(doc, cfg.model, "eval");
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = read_json_file(path);
  } catch (const InvalidDistribution& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(doc, std::filesystem::path(path).parent_path().string());
}

TaskInstance make_threshold_task(const ThresholdTask& task, std::uint64_t seed) {
  const std::size_t g = task.grid;
  std::vector<std::string> hyps, inputs;
  for (std::size_t t = 0; t <= g; ++t) hyps.push_back("t" + std::to_string(t));
  for (std::size_t x = 0; x < g; ++x) inputs.push_back(std::to_string(x));
  std::vector<std::vector<std::vector<double>>> lik(g + 1);
  for (std::size_t t = 0; t <= g; ++t)
    for (std::size_t x = 0; x < g; ++x)
      lik[t].push_back(x >= t ? std::vector<double>{task.epsilon, 1 - task.epsilon}
                              : std::vector<double>{1 - task.epsilon, task.epsilon});
  TaskInstance inst{bayes::BayesModel(hyps, std::vector<double>(g + 1, 1.0 / static_cast<double>(g + 1)), inputs,
                                      {"0", "1"}, lik),
                    {}, {}, 0};
  auto rng = stream(seed, 1);
  inst.threshold = std::uniform_int_distribution<std::size_t>(1, g - 1)(rng);
  for (std::size_t c = 0; c < task.copies; ++c)
    for (std::size_t x = 0; x < g; ++x) inst.pool.emplace_back(x, x >= inst.threshold ? 1 : 0);
  for (std::size_t x = 0; x < g; ++x) inst.eval.emplace_back(x, x >= inst.threshold ? 1 : 0);
  return inst;
}

std::pair<double, double> evaluate(const bayes::BayesModel& m, const bayes::Posterior& post,
                                   const bayes::Dataset& eval) {
  double correct = 0, loss = 0;
  for (auto [x, y] : eval) {
    const auto pred = bayes::predictive(m, post, x);
    const auto best = static_cast<std::size_t>(std::max_element(pred.begin(), pred.end()) - pred.begin());
    correct += best == y;
    loss -= std::log(pred[y]);
  }
  const auto n = static_cast<double>(eval.size());
  return {correct / n, loss / n};
}

SimResult run_sim(const SimConfig& cfg_in) {
  cfg_in.validate();
  SimConfig cfg = cfg_in;
  if (cfg.task) {
    auto inst = make_threshold_task(*cfg.task, cfg.seed);
    cfg.model = std::move(inst.model);
    cfg.pool = std::move(inst.pool);
    cfg.eval = std::move(inst.eval);
  }
  auto noise_rng = stream(cfg.seed, 2);
  add_noise(cfg.pool, cfg.model.labels(), cfg.noise_rate, noise_rng);
  auto rng = stream(cfg.seed, 3);
  const auto& m = cfg.model;

  SimResult res;
  auto post = bayes::posterior(m, cfg.initial);
  res.initial_accuracy = evaluate(m, post, cfg.eval).first;
  if (res.initial_accuracy == 1.0) res.reached_target = true;

  std::vector<std::size_t> remaining(cfg.pool.size());
  std::iota(remaining.begin(), remaining.end(), 0);

  // Scorers that may look at the candidate's label get the whole pair; the
  // others only ever see the input.
  const auto blind = [&](const std::vector<std::size_t>& xs) {
    return xs.size() == 1 ? bayes::bald(m, post, xs[0]) : bayes::batch_score(m, post, xs);
  };
  const auto labelled = [&](const bayes::Dataset& batch) {
    std::vector<std::size_t> xs, ys;
    for (auto [x, y] : batch) {
      xs.push_back(x);
      ys.push_back(y);
    }
    return xs.size() == 1 ? bayes::csd(m, post, xs[0], ys[0]) : bayes::batch_score(m, post, xs, ys);
  };

  for (std::size_t step = 1; step <= cfg.steps && !remaining.empty(); ++step) {
    std::vector<Scored> chosen;
    const auto skip_note = [&](std::size_t slot) {
      const auto [x, y] = cfg.pool[remaining[slot]];
      res.log.push_back("step " + std::to_string(step) + ": skipped pool item " + std::to_string(remaining[slot]) +
                        " (x=" + m.input_names()[x] + ", y=" + m.label_names()[y] +
                        "): zero predictive probability");
    };

    switch (cfg.acquisition) {
      case Acquisition::Uniform:
      case Acquisition::Bald:
      case Acquisition::Csd: {
        std::vector<Scored> scored;
        std::uniform_real_distribution<double> u01;
        for (std::size_t s = 0; s < remaining.size(); ++s) {
          const auto [x, y] = cfg.pool[remaining[s]];
          if (cfg.acquisition == Acquisition::Uniform) {
            scored.push_back({s, u01(rng)});
          } else if (cfg.acquisition == Acquisition::Bald) {
            scored.push_back({s, blind({x})});
          } else {
            try {
              scored.push_back({s, labelled({{x, y}})});
            } catch (const ZeroProbabilityEvent&) {
              skip_note(s);
            }
          }
        }
        chosen = top(std::move(scored), cfg.batch_size);
        break;
      }
      case Acquisition::BatchBald:
      case Acquisition::BatchCsd: {
        const bool with_labels = cfg.acquisition == Acquisition::BatchCsd;
        std::vector<bool> taken(remaining.size(), false), dead(remaining.size(), false);
        std::vector<std::size_t> xs;
        bayes::Dataset batch;
        double base = 0.0;
        for (std::size_t k = 0; k < cfg.batch_size; ++k) {
          std::optional<Scored> best;
          for (std::size_t s = 0; s < remaining.size(); ++s) {
            if (taken[s] || dead[s]) continue;
            const auto [x, y] = cfg.pool[remaining[s]];
            double v;
            try {
              if (with_labels) {
                auto trial = batch;
                trial.emplace_back(x, y);
                v = labelled(trial);
              } else {
                auto trial = xs;
                trial.push_back(x);
                v = blind(trial);
              }
            } catch (const ZeroProbabilityEvent&) {
              dead[s] = true;
              skip_note(s);
              continue;
            }
            if (!best || v - base > best->score) best = Scored{s, v - base};
          }
          if (!best) break;
          taken[best->slot] = true;
          const auto [x, y] = cfg.pool[remaining[best->slot]];
          xs.push_back(x);
          batch.emplace_back(x, y);
          base += best->score;
          chosen.push_back(*best);
        }
        break;
      }
    }
    if (chosen.empty()) {
      res.log.push_back("step " + std::to_string(step) + ": no candidate could be scored");
      break;
    }

    std::vector<std::size_t> drop;
    for (const auto& c : chosen) {
      const std::size_t index = remaining[c.slot];
      drop.push_back(c.slot);
      const auto [x, y] = cfg.pool[index];
      try {
        post = bayes::update(m, post, x, y);
      } catch (const ZeroEvidence&) {
        res.log.push_back("step " + std::to_string(step) + ": pool item " + std::to_string(index) +
                          " has zero likelihood under every hypothesis; skipped");
        continue;
      }
      const auto [acc, loss] = evaluate(m, post, cfg.eval);
      res.rows.push_back({step, index, x, y, c.score, bayes::entropy_of(post), acc, loss});
      if (!res.reached_target && acc == 1.0) {
        res.reached_target = true;
        res.acquisitions_to_target = res.rows.size();
      }
    }
    std::sort(drop.rbegin(), drop.rend());
    for (auto s : drop) remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(s));
  }
  if (!res.reached_target) res.acquisitions_to_target = cfg.steps * cfg.batch_size + 1;
  return res;
}

void write_csv(std::ostream& out, const SimConfig& cfg, const SimResult& r, LogBase base) {
  // names come from the generated model when the config only describes a task
  const auto model = cfg.task ? make_threshold_task(*cfg.task, cfg.seed).model : cfg.model;
  out << "step,x,y,score,posterior_entropy,accuracy,logloss\n";
  for (const auto& row : r.rows) {
    out << row.step << ',' << model.input_names()[row.x] << ',' << model.label_names()[row.y] << ','
        << number(cfg.acquisition == Acquisition::Uniform ? row.score : in_base(row.score, base)) << ','
        << number(in_base(row.posterior_entropy, base)) << ',' << number(row.accuracy) << ','
        << number(in_base(row.logloss, base)) << '\n';
  }
}

}  // namespace infoq::sim
