#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "markov/processes.hpp"

// Model config files, e.g.
//   {"type": "markov", "alphabet_size": 2, "order": 1,
//    "transition": [0.7, 0.3, 0.2, 0.8]}           (row-major)
//   {"type": "gmodel", "theta0": 0.3, "c": 0.2, "rho": 0.5}
//   {"type": "iid", "probs": [0.5, 0.5]}

namespace markov {

inline ProcessModel model_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "gmodel") {
    return GeometricBinaryGModel(j.at("theta0").get<double>(), j.at("c").get<double>(),
                                 j.at("rho").get<double>());
  }
  if (type == "iid") {
    const auto probs = j.at("probs").get<std::vector<double>>();
    Vector p(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) p[static_cast<Index>(i)] = probs[i];
    return MarkovChainModel::iid(p);
  }
  if (type == "markov") {
    const Alphabet alphabet(j.at("alphabet_size").get<int>());
    const int order = j.at("order").get<int>();
    const auto flat = j.at("transition").get<std::vector<double>>();
    const Index rows = checked_pow(alphabet.size, order);
    if (static_cast<Index>(flat.size()) != rows * alphabet.size)
      throw std::invalid_argument("model config: transition needs |A|^order * |A| entries");
    Matrix t(rows, alphabet.size);
    for (Index r = 0; r < rows; ++r)
      for (int a = 0; a < alphabet.size; ++a)
        t(r, a) = flat[static_cast<std::size_t>(r * alphabet.size + a)];
    return MarkovChainModel(alphabet, order, std::move(t));
  }
  throw std::invalid_argument("model config: unknown type '" + type + "'");
}

inline nlohmann::json model_to_json(const ProcessModel& model) {
  nlohmann::json j;
  if (const auto* chain = std::get_if<MarkovChainModel>(&model)) {
    j["type"] = "markov";
    j["alphabet_size"] = chain->alphabet().size;
    j["order"] = chain->order();
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(chain->transition().size()));
    for (Index r = 0; r < chain->transition().rows(); ++r)
      for (int a = 0; a < chain->alphabet().size; ++a) flat.push_back(chain->transition()(r, a));
    j["transition"] = flat;
  } else {
    const auto& g = std::get<GeometricBinaryGModel>(model);
    j["type"] = "gmodel";
    j["theta0"] = g.theta0;
    j["c"] = g.c;
    j["rho"] = g.rho;
  }
  return j;
}

inline ProcessModel read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  nlohmann::json j;
  in >> j;
  return model_from_json(j);
}

inline void write_model(const ProcessModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open model file for writing: " + path);
  out << model_to_json(model).dump(2) << "\n";
}

}  // namespace markov
