#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "commentqc/error.hpp"

namespace commentqc {

enum class ModelKind {
  LogisticRegression,
  DecisionTree,
  Knn,
  Svm,
  GradientBoosting,
  RandomForest,
  NeuralNetwork,
};

inline constexpr std::array<ModelKind, 7> kAllModelKinds = {
    ModelKind::LogisticRegression, ModelKind::DecisionTree, ModelKind::Knn,
    ModelKind::Svm,                ModelKind::GradientBoosting,
    ModelKind::RandomForest,       ModelKind::NeuralNetwork,
};

/// Table row name used in reports.
inline const char* model_display_name(ModelKind k) {
  switch (k) {
    case ModelKind::LogisticRegression: return "Logistic Regression";
    case ModelKind::DecisionTree: return "Decision Tree";
    case ModelKind::Knn: return "KNN";
    case ModelKind::Svm: return "SVM";
    case ModelKind::GradientBoosting: return "GBT";
    case ModelKind::RandomForest: return "Random Forest";
    case ModelKind::NeuralNetwork: return "Neural Network";
  }
  return "?";
}

/// Short id used on the command line and in file formats.
inline const char* model_id(ModelKind k) {
  switch (k) {
    case ModelKind::LogisticRegression: return "lr";
    case ModelKind::DecisionTree: return "dt";
    case ModelKind::Knn: return "knn";
    case ModelKind::Svm: return "svm";
    case ModelKind::GradientBoosting: return "gbt";
    case ModelKind::RandomForest: return "rf";
    case ModelKind::NeuralNetwork: return "nn";
  }
  return "?";
}

inline std::optional<ModelKind> parse_model_id(std::string_view s) {
  for (auto k : kAllModelKinds)
    if (s == model_id(k)) return k;
  return std::nullopt;
}

struct ClassifierSpec {
  ModelKind kind = ModelKind::LogisticRegression;
  std::map<std::string, double> hyperparams; // missing keys take defaults

  bool operator==(const ClassifierSpec&) const = default;
};

inline ClassifierSpec default_spec(ModelKind kind) {
  ClassifierSpec s;
  s.kind = kind;
  switch (kind) {
    case ModelKind::LogisticRegression:
      s.hyperparams = {{"eta", 0.1}, {"lambda", 1e-4}, {"epochs", 200}};
      break;
    case ModelKind::DecisionTree:
      s.hyperparams = {{"max_depth", 10}, {"min_samples_split", 2}};
      break;
    case ModelKind::Knn:
      s.hyperparams = {{"k", 5}};
      break;
    case ModelKind::Svm:
      s.hyperparams = {{"lambda", 1e-4}, {"epochs", 100}};
      break;
    case ModelKind::GradientBoosting:
      s.hyperparams = {{"rounds", 100}, {"depth", 3}, {"shrinkage", 0.1}};
      break;
    case ModelKind::RandomForest:
      s.hyperparams = {{"trees", 100}, {"max_depth", 12}};
      break;
    case ModelKind::NeuralNetwork:
      // eta and epoch count are pinned, only the width is tunable
      s.hyperparams = {{"hidden", 64}, {"eta", 0.001}, {"epochs", 10}, {"batch", 32}};
      break;
  }
  return s;
}

/// Defaults overlaid with the spec's explicit settings.
inline ClassifierSpec resolve_spec(const ClassifierSpec& spec) {
  ClassifierSpec out = default_spec(spec.kind);
  for (const auto& [key, value] : spec.hyperparams) {
    if (!out.hyperparams.count(key))
      raise(Errc::BadHyperparameter,
            std::string(model_id(spec.kind)) + " has no hyperparameter '" + key + "'");
    out.hyperparams[key] = value;
  }
  return out;
}

namespace detail {

inline double hp(const ClassifierSpec& s, const char* key) { return s.hyperparams.at(key); }

inline int hp_int(const ClassifierSpec& s, const char* key) {
  double v = hp(s, key);
  auto r = static_cast<int>(v);
  if (static_cast<double>(r) != v)
    raise(Errc::BadHyperparameter, std::string(key) + " must be an integer, got " + std::to_string(v));
  return r;
}

inline void require(bool ok, const char* what) {
  if (!ok) raise(Errc::BadHyperparameter, what);
}

} // namespace detail

inline void validate_spec(const ClassifierSpec& spec) {
  using detail::hp;
  using detail::hp_int;
  using detail::require;
  switch (spec.kind) {
    case ModelKind::LogisticRegression:
      require(hp(spec, "eta") > 0, "eta must be > 0");
      require(hp(spec, "lambda") >= 0, "lambda must be >= 0");
      require(hp_int(spec, "epochs") >= 1, "epochs must be >= 1");
      break;
    case ModelKind::DecisionTree:
      require(hp_int(spec, "max_depth") >= 1, "max_depth must be >= 1");
      require(hp_int(spec, "min_samples_split") >= 2, "min_samples_split must be >= 2");
      break;
    case ModelKind::Knn:
      require(hp_int(spec, "k") >= 1, "k must be >= 1");
      break;
    case ModelKind::Svm:
      require(hp(spec, "lambda") > 0, "lambda must be > 0");
      require(hp_int(spec, "epochs") >= 1, "epochs must be >= 1");
      break;
    case ModelKind::GradientBoosting:
      require(hp_int(spec, "rounds") >= 0, "rounds must be >= 0");
      require(hp_int(spec, "depth") >= 1, "depth must be >= 1");
      require(hp(spec, "shrinkage") > 0, "shrinkage must be > 0");
      break;
    case ModelKind::RandomForest:
      require(hp_int(spec, "trees") >= 1, "trees must be >= 1");
      require(hp_int(spec, "max_depth") >= 1, "max_depth must be >= 1");
      break;
    case ModelKind::NeuralNetwork:
      require(hp_int(spec, "hidden") >= 1, "hidden must be >= 1");
      require(hp(spec, "eta") > 0, "eta must be > 0");
      require(hp_int(spec, "epochs") >= 1, "epochs must be >= 1");
      require(hp_int(spec, "batch") >= 1, "batch must be >= 1");
      break;
  }
}

} // namespace commentqc
