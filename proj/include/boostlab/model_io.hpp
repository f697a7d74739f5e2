#pragma once

#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "boostlab/adversarial.hpp"
#include "boostlab/core.hpp"
#include "boostlab/stump.hpp"

namespace boostlab {

// Ensemble model files: a list of voters, each a list of
// (coefficient, hypothesis) terms. Stumps serialize by their fields,
// adversarial hypotheses by pool index (h0 as index -1) together with the
// universe configuration needed to rebuild the pool.

namespace detail {

inline nlohmann::json threshold_to_json(double t) {
  if (t == std::numeric_limits<double>::infinity()) return "inf";
  if (t == -std::numeric_limits<double>::infinity()) return "-inf";
  return t;
}

inline double threshold_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::runtime_error("model: bad threshold string '" + s + "'");
  }
  return j.get<double>();
}

inline nlohmann::json hypothesis_to_json(const Hypothesis& h) {
  if (const auto* stump = dynamic_cast<const Stump*>(&h)) {
    return {{"type", "stump"},
            {"feature", stump->feature},
            {"threshold", threshold_to_json(stump->threshold)},
            {"polarity", stump->polarity}};
  }
  if (const auto* table = dynamic_cast<const TableHypothesis*>(&h)) {
    return {{"type", "pool"}, {"index", table->pool_index()}};
  }
  throw std::runtime_error("model: hypothesis type is not serializable");
}

}  // namespace detail

struct ModelFile {
  std::string algorithm;
  Ensemble ensemble;
};

inline nlohmann::json model_to_json(const Ensemble& ensemble,
                                    const std::string& algorithm,
                                    const AdversarialUniverse* universe = nullptr) {
  nlohmann::json voters = nlohmann::json::array();
  bool has_pool = false;
  for (const auto& voter : ensemble.voters()) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& term : voter.terms()) {
      nlohmann::json h = detail::hypothesis_to_json(*term.hypothesis);
      if (h["type"] == "pool") has_pool = true;
      terms.push_back({{"coefficient", term.coefficient}, {"hypothesis", h}});
    }
    voters.push_back({{"terms", terms}});
  }

  nlohmann::json model{{"format", "boostlab.ensemble.v1"},
                       {"algorithm", algorithm},
                       {"voters", voters}};
  if (has_pool) {
    if (!universe) {
      throw std::runtime_error(
          "model: ensemble references adversarial pool hypotheses; the universe is "
          "required to serialize it");
    }
    const AdversarialConfig& cfg = universe->config();
    model["adversarial_universe"] = {{"seed", universe->seed()},
                                     {"gamma", cfg.gamma},
                                     {"domain_size", cfg.domain_size},
                                     {"tail_size", cfg.tail_size},
                                     {"probe_size", cfg.probe_size},
                                     {"pool_size", cfg.pool_size},
                                     {"plus_probability", cfg.plus_probability}};
  }
  return model;
}

inline ModelFile model_from_json(const nlohmann::json& model) {
  if (!model.contains("format") || model["format"] != "boostlab.ensemble.v1") {
    throw std::runtime_error("model: unrecognized format");
  }

  std::optional<AdversarialUniverse> universe;
  if (model.contains("adversarial_universe")) {
    const auto& u = model["adversarial_universe"];
    AdversarialConfig cfg;
    cfg.gamma = u.at("gamma").get<double>();
    cfg.domain_size = u.at("domain_size").get<std::size_t>();
    cfg.tail_size = u.at("tail_size").get<std::size_t>();
    cfg.probe_size = u.at("probe_size").get<std::size_t>();
    cfg.pool_size = u.at("pool_size").get<std::size_t>();
    cfg.plus_probability = u.at("plus_probability").get<double>();
    universe.emplace(u.at("seed").get<std::uint64_t>(), cfg);
  }

  std::vector<Voter> voters;
  for (const auto& voter_json : model.at("voters")) {
    std::vector<VoterTerm> terms;
    for (const auto& term_json : voter_json.at("terms")) {
      const auto& h = term_json.at("hypothesis");
      const std::string type = h.at("type").get<std::string>();
      HypothesisPtr hypothesis;
      if (type == "stump") {
        hypothesis = std::make_shared<Stump>(
            h.at("feature").get<std::size_t>(),
            detail::threshold_from_json(h.at("threshold")),
            h.at("polarity").get<int>());
      } else if (type == "pool") {
        if (!universe) {
          throw std::runtime_error("model: pool hypothesis without universe block");
        }
        const int index = h.at("index").get<int>();
        hypothesis = index < 0 ? universe->h0()
                               : universe->pool_hypothesis(static_cast<std::size_t>(index));
      } else {
        throw std::runtime_error("model: unknown hypothesis type '" + type + "'");
      }
      terms.push_back({term_json.at("coefficient").get<double>(), hypothesis});
    }
    voters.emplace_back(std::move(terms));
  }

  return ModelFile{model.value("algorithm", std::string{}), Ensemble(std::move(voters))};
}

inline void save_model(const std::string& path, const Ensemble& ensemble,
                       const std::string& algorithm,
                       const AdversarialUniverse* universe = nullptr) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << model_to_json(ensemble, algorithm, universe).dump(2) << '\n';
}

inline ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  nlohmann::json model;
  in >> model;
  return model_from_json(model);
}

}  // namespace boostlab
