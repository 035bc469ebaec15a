#include "ndpoly/model.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ndpoly/errors.hpp"
#include "ndpoly/hash.hpp"

namespace ndpoly {

TrainedModel::TrainedModel(const TrainedModel& other)
    : band_count(other.band_count),
      degree(other.degree),
      epsilon(other.epsilon),
      descriptors(other.descriptors),
      bias(other.bias),
      weights(other.weights),
      positive_label(other.positive_label),
      negative_label(other.negative_label),
      bound(other.bound),
      provenance(other.provenance),
      clamp_warnings_(other.clamp_warnings_.load()) {}

TrainedModel& TrainedModel::operator=(const TrainedModel& other) {
  if (this != &other) {
    band_count = other.band_count;
    degree = other.degree;
    epsilon = other.epsilon;
    descriptors = other.descriptors;
    bias = other.bias;
    weights = other.weights;
    positive_label = other.positive_label;
    negative_label = other.negative_label;
    bound = other.bound;
    provenance = other.provenance;
    clamp_warnings_.store(other.clamp_warnings_.load());
  }
  return *this;
}

void TrainedModel::validate() const {
  if (band_count < 2) throw ValidationError("model: band_count must be >= 2");
  if (degree < 1 || degree > 2) throw ValidationError("model: degree must be 1 or 2");
  if (!(epsilon > 0.0)) throw ValidationError("model: epsilon must be > 0");
  if (static_cast<Index>(descriptors.size()) != weights.size()) {
    throw DimensionError("model: descriptor and weight counts differ");
  }
  if (positive_label.empty() || negative_label.empty()) {
    throw ValidationError("model: class labels must be nonempty");
  }
  if (positive_label == negative_label) {
    throw ValidationError("model: class labels must be distinct");
  }
  const FeatureSpace space = enumerate_features(band_count, degree);
  std::vector<Index> seen;
  for (const FeatureDescriptor& d : descriptors) {
    seen.push_back(space.flat_index(d));
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw ValidationError("model: duplicate descriptor");
  }
  if (!(bound.value > 0.0)) throw ValidationError("model: hypercube bound must be positive");
  if (bound.method != "exact_vertex" && bound.method != "heuristic_ascent") {
    throw ValidationError("model: unknown bound method '" + bound.method + "'");
  }
}

double TrainedModel::decision_value(const Eigen::Ref<const Vector>& bands) const {
  if (bands.size() != band_count) {
    throw DimensionError("decision_value: expected " + std::to_string(band_count) +
                         " bands, got " + std::to_string(bands.size()));
  }
  const Vector terms = evaluate_descriptors(bands, descriptors, epsilon);
  double acc = bias;
  for (Index j = 0; j < terms.size(); ++j) acc += weights[j] * terms[j];
  return acc;
}

Vector TrainedModel::decision_values(const Eigen::Ref<const Matrix>& bands) const {
  Vector values(bands.rows());
  for (Index i = 0; i < bands.rows(); ++i) {
    values[i] = decision_value(bands.row(i).transpose());
  }
  return values;
}

std::string TrainedModel::predict(const Eigen::Ref<const Vector>& bands) const {
  return decision_value(bands) > 0.0 ? positive_label : negative_label;
}

std::vector<std::string> TrainedModel::predict_batch(
    const Eigen::Ref<const Matrix>& bands) const {
  const Vector values = decision_values(bands);
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(values.size()));
  for (Index i = 0; i < values.size(); ++i) {
    labels.push_back(values[i] > 0.0 ? positive_label : negative_label);
  }
  return labels;
}

double TrainedModel::confidence(const Eigen::Ref<const Vector>& bands) const {
  const double f = decision_value(bands);
  if (!(bound.value > 0.0)) return 0.0;
  double s = f / bound.value;
  if (s > 1.0) {
    s = 1.0;
    clamp_warnings_.fetch_add(1, std::memory_order_relaxed);
  } else if (s < -1.0) {
    s = -1.0;
    clamp_warnings_.fetch_add(1, std::memory_order_relaxed);
  }
  return s;
}

Vector TrainedModel::class_embedding() const {
  const FeatureSpace space = enumerate_features(band_count, degree);
  Vector embedding = Vector::Zero(space.size() + 1);
  embedding[0] = bias;
  for (std::size_t j = 0; j < descriptors.size(); ++j) {
    embedding[1 + space.flat_index(descriptors[j])] = weights[static_cast<Index>(j)];
  }
  return embedding;
}

namespace {

// One model term rewritten over the cube variables: indices into the distinct
// ND variable list instead of band pairs.
struct CubeTerm {
  FeatureKind kind = FeatureKind::Linear;
  int a = 0;
  int b = 0;
  double w = 0.0;
};

double eval_cube(double bias, const std::vector<CubeTerm>& terms,
                 const std::vector<double>& t) {
  double acc = bias;
  for (const CubeTerm& term : terms) {
    double value = 0.0;
    switch (term.kind) {
      case FeatureKind::Linear: value = t[static_cast<std::size_t>(term.a)]; break;
      case FeatureKind::Squared: {
        const double x = t[static_cast<std::size_t>(term.a)];
        value = x * x;
        break;
      }
      case FeatureKind::Product:
        value = t[static_cast<std::size_t>(term.a)] * t[static_cast<std::size_t>(term.b)];
        break;
    }
    acc += term.w * value;
  }
  return acc;
}

// Maximizes sign*f from one start by cyclic coordinate moves. The restriction
// to one variable is a quadratic A t^2 + B t + C recovered from three
// evaluations; candidates are the endpoints plus the interior critical point
// when it is a maximum.
double ascend(double bias, const std::vector<CubeTerm>& terms, std::vector<double>& t,
              double sign) {
  const std::size_t v = t.size();
  for (int sweep = 0; sweep < 200; ++sweep) {
    bool changed = false;
    for (std::size_t i = 0; i < v; ++i) {
      const double saved = t[i];
      t[i] = 0.0;
      const double g0 = sign * eval_cube(bias, terms, t);
      t[i] = 1.0;
      const double gp = sign * eval_cube(bias, terms, t);
      t[i] = -1.0;
      const double gm = sign * eval_cube(bias, terms, t);
      const double a = 0.5 * (gp + gm) - g0;
      const double b = 0.5 * (gp - gm);

      double best_t = 1.0;
      double best_g = gp;
      if (gm > best_g) {
        best_g = gm;
        best_t = -1.0;
      }
      if (a < 0.0) {
        const double tc = -b / (2.0 * a);
        if (tc > -1.0 && tc < 1.0) {
          const double gc = a * tc * tc + b * tc + g0;
          if (gc > best_g) {
            best_g = gc;
            best_t = tc;
          }
        }
      }
      const double current = a * saved * saved + b * saved + g0;
      if (best_g > current + 1e-15) {
        t[i] = best_t;
        changed = true;
      } else {
        t[i] = saved;
      }
    }
    if (!changed) break;
  }
  return sign * eval_cube(bias, terms, t);
}

}  // namespace

HypercubeBound compute_hypercube_bound(double bias, const Eigen::Ref<const Vector>& weights,
                                       const std::vector<FeatureDescriptor>& descriptors,
                                       std::uint64_t seed) {
  if (static_cast<Index>(descriptors.size()) != weights.size()) {
    throw DimensionError("compute_hypercube_bound: descriptor and weight counts differ");
  }

  std::vector<NdPair> vars;
  bool multilinear = true;
  for (const FeatureDescriptor& d : descriptors) {
    vars.push_back(d.first);
    if (d.kind == FeatureKind::Product) vars.push_back(d.second);
    if (d.kind == FeatureKind::Squared) multilinear = false;
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  const std::size_t v = vars.size();

  auto var_index = [&](NdPair p) {
    return static_cast<int>(std::lower_bound(vars.begin(), vars.end(), p) - vars.begin());
  };
  std::vector<CubeTerm> terms;
  terms.reserve(descriptors.size());
  for (std::size_t j = 0; j < descriptors.size(); ++j) {
    const FeatureDescriptor& d = descriptors[j];
    CubeTerm term;
    term.kind = d.kind;
    term.a = var_index(d.first);
    term.b = d.kind == FeatureKind::Product ? var_index(d.second) : term.a;
    term.w = weights[static_cast<Index>(j)];
    terms.push_back(term);
  }

  HypercubeBound bound;
  if (multilinear && v <= 20) {
    bound.method = "exact_vertex";
    double best = 0.0;
    std::vector<double> t(v, 1.0);
    const std::uint64_t masks = 1ULL << v;
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
      for (std::size_t i = 0; i < v; ++i) {
        t[i] = (mask >> i) & 1ULL ? 1.0 : -1.0;
      }
      best = std::max(best, std::abs(eval_cube(bias, terms, t)));
    }
    bound.value = best;
    return bound;
  }

  bound.method = "heuristic_ascent";
  double best = std::abs(bias);
  std::vector<std::vector<double>> starts;
  if (v <= 12) {
    const std::uint64_t masks = 1ULL << v;
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
      std::vector<double> t(v);
      for (std::size_t i = 0; i < v; ++i) {
        t[i] = (mask >> i) & 1ULL ? 1.0 : -1.0;
      }
      starts.push_back(std::move(t));
    }
  } else {
    std::mt19937_64 rng(seed);
    starts.emplace_back(v, 1.0);
    starts.emplace_back(v, -1.0);
    for (int s = 2; s < 64; ++s) {
      std::vector<double> t(v);
      for (std::size_t i = 0; i < v; ++i) {
        t[i] = rng() & 1ULL ? 1.0 : -1.0;
      }
      starts.push_back(std::move(t));
    }
  }
  for (const double sign : {1.0, -1.0}) {
    for (const std::vector<double>& start : starts) {
      std::vector<double> t = start;
      const double reached = ascend(bias, terms, t, sign);
      best = std::max(best, std::abs(reached));
    }
  }
  bound.value = best;
  return bound;
}

HypercubeBound compute_hypercube_bound(const TrainedModel& model, std::uint64_t seed) {
  return compute_hypercube_bound(model.bias, model.weights, model.descriptors, seed);
}

std::string model_to_json(const TrainedModel& model) {
  nlohmann::json document;
  document["format"] = "nd-polynomial-model";
  document["version"] = 1;
  document["band_count"] = model.band_count;
  document["degree"] = model.degree;
  document["epsilon"] = model.epsilon;
  document["positive_label"] = model.positive_label;
  document["negative_label"] = model.negative_label;
  document["bias"] = model.bias;
  nlohmann::json names = nlohmann::json::array();
  nlohmann::json weights = nlohmann::json::array();
  for (std::size_t j = 0; j < model.descriptors.size(); ++j) {
    names.push_back(descriptor_name(model.descriptors[j]));
    weights.push_back(model.weights[static_cast<Index>(j)]);
  }
  document["descriptors"] = std::move(names);
  document["weights"] = std::move(weights);
  document["hypercube_bound"] = {{"value", model.bound.value}, {"method", model.bound.method}};
  document["provenance"] = {{"selection_method", model.provenance.selection_method},
                            {"k", model.provenance.k},
                            {"seed", model.provenance.seed},
                            {"data_fingerprint", model.provenance.data_fingerprint}};
  const std::string payload = document.dump();
  document["checksum"] = "fnv1a64:" + fnv1a64_hex(payload);
  return document.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
  nlohmann::json document;
  try {
    document = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("model document is not valid JSON: ") + e.what());
  }
  try {
    if (!document.is_object()) {
      throw SchemaError("model document must be a JSON object");
    }
    if (document.value("format", std::string{}) != "nd-polynomial-model") {
      throw SchemaError("not a model document (missing format tag)");
    }
    const int version = document.value("version", -1);
    if (version != 1) {
      throw SchemaError("unsupported model document version " + std::to_string(version));
    }
    if (!document.contains("checksum")) {
      throw SchemaError("model document missing checksum");
    }
    const std::string stored = document.at("checksum").get<std::string>();
    document.erase("checksum");
    if (stored != "fnv1a64:" + fnv1a64_hex(document.dump())) {
      throw SchemaError("model document checksum mismatch");
    }

    TrainedModel model;
    model.band_count = document.at("band_count").get<int>();
    model.degree = document.at("degree").get<int>();
    model.epsilon = document.at("epsilon").get<double>();
    model.positive_label = document.at("positive_label").get<std::string>();
    model.negative_label = document.at("negative_label").get<std::string>();
    model.bias = document.at("bias").get<double>();
    const auto names = document.at("descriptors").get<std::vector<std::string>>();
    const auto weights = document.at("weights").get<std::vector<double>>();
    if (names.size() != weights.size()) {
      throw SchemaError("model document has " + std::to_string(names.size()) +
                        " descriptors but " + std::to_string(weights.size()) + " weights");
    }
    for (const std::string& name : names) {
      model.descriptors.push_back(parse_descriptor(name));
    }
    model.weights = Eigen::Map<const Vector>(weights.data(), static_cast<Index>(weights.size()));
    model.bound.value = document.at("hypercube_bound").at("value").get<double>();
    model.bound.method = document.at("hypercube_bound").at("method").get<std::string>();
    const auto& provenance = document.at("provenance");
    model.provenance.selection_method = provenance.at("selection_method").get<std::string>();
    model.provenance.k = provenance.at("k").get<Index>();
    model.provenance.seed = provenance.at("seed").get<std::uint64_t>();
    model.provenance.data_fingerprint = provenance.at("data_fingerprint").get<std::string>();

    const HypercubeBound recomputed =
        compute_hypercube_bound(model.bias, model.weights, model.descriptors);
    if (recomputed.method != model.bound.method ||
        std::abs(recomputed.value - model.bound.value) >
            1e-9 * (1.0 + std::abs(recomputed.value))) {
      throw SchemaError("stored hypercube bound disagrees with recomputation");
    }
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::string& path) {
  write_file_atomic(path, model_to_json(model));
}

TrainedModel load_model(const std::string& path) {
  return model_from_json(read_file(path));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open '" + path + "' for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string temp = path + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ValidationError("cannot open '" + temp + "' for writing");
    }
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(temp, ec);
      throw ValidationError("failed writing '" + temp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(temp, ignored);
    throw ValidationError("cannot move '" + temp + "' into place at '" + path +
                          "': " + ec.message());
  }
}

}  // namespace ndpoly
