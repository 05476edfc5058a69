#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "commentqc/corpus.hpp"
#include "commentqc/error.hpp"
#include "commentqc/models/boosting.hpp"
#include "commentqc/models/forest.hpp"
#include "commentqc/models/knn.hpp"
#include "commentqc/models/linear.hpp"
#include "commentqc/models/neural.hpp"
#include "commentqc/models/spec.hpp"
#include "commentqc/models/tree.hpp"
#include "commentqc/rng.hpp"
#include "commentqc/vectorize.hpp"
#include "commentqc/version.hpp"

namespace commentqc::models {

struct TreeModelParams {
  Tree tree;
};

using ModelParams = std::variant<LogRegParams, TreeModelParams, KnnParams, SvmParams, BoostParams,
                                 ForestParams, NeuralParams>;

struct TrainedModel {
  ClassifierSpec spec; // resolved: every hyperparameter explicit
  std::uint32_t feature_dim = 0;
  ModelParams params;
};

inline bool tolerates_single_class(ModelKind kind) {
  return kind == ModelKind::Knn || kind == ModelKind::DecisionTree ||
         kind == ModelKind::RandomForest || kind == ModelKind::GradientBoosting;
}

/// Trains one classifier. Deterministic for fixed (spec, X, y, seed); the
/// seed is expected to already be derived per (run, kind, fold) by the
/// caller.
inline TrainedModel fit(const ClassifierSpec& user_spec, const FeatureMatrix& X,
                        const std::vector<Label>& labels, std::uint64_t seed) {
  ClassifierSpec spec = resolve_spec(user_spec);
  validate_spec(spec);
  if (X.rows.size() != labels.size())
    raise(Errc::DimensionMismatch, "feature rows (" + std::to_string(X.rows.size()) +
                                       ") != labels (" + std::to_string(labels.size()) + ")");
  if (X.rows.size() < 2) raise(Errc::InvalidArgument, "need at least 2 training rows");

  std::vector<char> y(labels.size());
  std::size_t n_useful = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y[i] = labels[i] == Label::Useful ? 1 : 0;
    n_useful += y[i];
  }
  if (!tolerates_single_class(spec.kind) && (n_useful == 0 || n_useful == y.size()))
    raise(Errc::DegenerateLabels,
          std::string(model_id(spec.kind)) + " needs both classes in the training set");

  TrainedModel model;
  model.spec = spec;
  model.feature_dim = X.dim();
  using detail::hp;
  using detail::hp_int;
  switch (spec.kind) {
    case ModelKind::LogisticRegression:
      model.params =
          fit_logreg(X, y, hp(spec, "eta"), hp(spec, "lambda"), hp_int(spec, "epochs"));
      break;
    case ModelKind::DecisionTree: {
      ColumnStore cols = ColumnStore::build(X);
      TreeConfig cfg;
      cfg.max_depth = hp_int(spec, "max_depth");
      cfg.min_samples_split = static_cast<std::uint64_t>(hp_int(spec, "min_samples_split"));
      TreeBuilder builder(X, cols, cfg);
      std::vector<std::pair<std::uint32_t, std::uint32_t>> samples(X.rows.size());
      for (std::uint32_t i = 0; i < X.rows.size(); ++i) samples[i] = {i, 1};
      model.params = TreeModelParams{builder.build_classification(samples, y)};
      break;
    }
    case ModelKind::Knn: {
      KnnParams p;
      p.train_rows = X.rows;
      p.train_labels = y;
      p.k = static_cast<std::uint32_t>(hp_int(spec, "k"));
      model.params = std::move(p);
      break;
    }
    case ModelKind::Svm:
      model.params = fit_svm(X, y, hp(spec, "lambda"), hp_int(spec, "epochs"));
      break;
    case ModelKind::GradientBoosting:
      model.params =
          fit_boosting(X, y, hp_int(spec, "rounds"), hp_int(spec, "depth"), hp(spec, "shrinkage"));
      break;
    case ModelKind::RandomForest:
      model.params = fit_forest(X, y, hp_int(spec, "trees"), hp_int(spec, "max_depth"), seed);
      break;
    case ModelKind::NeuralNetwork: {
      auto rng = make_rng(derive_seed(seed, "nn_init"));
      model.params = fit_neural(X, y, static_cast<std::uint32_t>(hp_int(spec, "hidden")),
                                hp(spec, "eta"), hp_int(spec, "epochs"),
                                static_cast<std::size_t>(hp_int(spec, "batch")), rng);
      break;
    }
  }
  return model;
}

/// P(Useful) per row: sigmoid for the margin/logit models, vote or leaf
/// fractions for the neighborhood and tree models.
inline std::vector<double> predict_score(const TrainedModel& model, const FeatureMatrix& X) {
  if (X.dim() != model.feature_dim)
    raise(Errc::DimensionMismatch, "input dim " + std::to_string(X.dim()) + " != model dim " +
                                       std::to_string(model.feature_dim));
  std::vector<double> scores;
  scores.reserve(X.rows.size());
  for (const auto& x : X.rows) {
    double s = 0;
    if (const auto* lr = std::get_if<LogRegParams>(&model.params)) {
      s = sigmoid(dot(x, lr->weights) + lr->bias);
    } else if (const auto* dt = std::get_if<TreeModelParams>(&model.params)) {
      s = tree_leaf(dt->tree, x).value;
    } else if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
      s = knn_score(*knn, x);
    } else if (const auto* svm = std::get_if<SvmParams>(&model.params)) {
      s = sigmoid(dot(x, svm->weights));
    } else if (const auto* gbt = std::get_if<BoostParams>(&model.params)) {
      s = sigmoid(boost_raw_score(*gbt, x));
    } else if (const auto* rf = std::get_if<ForestParams>(&model.params)) {
      s = forest_score(*rf, x);
    } else if (const auto* nn = std::get_if<NeuralParams>(&model.params)) {
      s = sigmoid(neural_logit(*nn, x));
    }
    scores.push_back(s);
  }
  return scores;
}

/// Decision rule: score >= 0.5 predicts Useful (ties inclusive). KNN keeps
/// its own rule: an even vote split follows the single nearest neighbor.
inline std::vector<Label> predict(const TrainedModel& model, const FeatureMatrix& X) {
  if (X.dim() != model.feature_dim)
    raise(Errc::DimensionMismatch, "input dim " + std::to_string(X.dim()) + " != model dim " +
                                       std::to_string(model.feature_dim));
  std::vector<Label> out;
  out.reserve(X.rows.size());
  if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
    for (const auto& x : X.rows)
      out.push_back(knn_predict_useful(*knn, x) ? Label::Useful : Label::NotUseful);
    return out;
  }
  for (double s : predict_score(model, X))
    out.push_back(s >= 0.5 ? Label::Useful : Label::NotUseful);
  return out;
}

// ---------------------------------------------------------------------------
// Persistence: versioned line-oriented text format, doubles serialized as
// C99 hex floats so round-trips are bit-exact. See docs/model-format.md.

namespace io {

inline std::string dhex(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

inline double parse_double(const std::string& tok) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    raise(Errc::BadModelFile, "bad numeric token '" + tok + "'");
  return v;
}

inline std::string need_token(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) raise(Errc::BadModelFile, std::string("unexpected end of model file, wanted ") + what);
  return tok;
}

inline void expect_token(std::istream& in, const std::string& want) {
  std::string tok = need_token(in, want.c_str());
  if (tok != want) raise(Errc::BadModelFile, "expected '" + want + "', got '" + tok + "'");
}

inline long need_int(std::istream& in, const char* what) {
  return std::stol(need_token(in, what));
}

inline void write_tree(const Tree& tree, std::ostream& out) {
  out << "tree " << tree.nodes.size() << "\n";
  for (const auto& n : tree.nodes)
    out << n.feature << " " << dhex(n.threshold) << " " << n.left << " " << n.right << " "
        << dhex(n.value) << " " << n.n_useful << " " << n.n_total << "\n";
}

inline Tree read_tree(std::istream& in) {
  expect_token(in, "tree");
  long count = need_int(in, "node count");
  Tree tree;
  tree.nodes.resize(count);
  for (auto& n : tree.nodes) {
    n.feature = static_cast<std::int32_t>(need_int(in, "feature"));
    n.threshold = parse_double(need_token(in, "threshold"));
    n.left = static_cast<std::int32_t>(need_int(in, "left"));
    n.right = static_cast<std::int32_t>(need_int(in, "right"));
    n.value = parse_double(need_token(in, "value"));
    n.n_useful = static_cast<std::uint64_t>(need_int(in, "n_useful"));
    n.n_total = static_cast<std::uint64_t>(need_int(in, "n_total"));
  }
  return tree;
}

inline void write_dvec(const char* name, const std::vector<double>& v, std::ostream& out) {
  out << name << " " << v.size();
  for (double x : v) out << " " << dhex(x);
  out << "\n";
}

inline std::vector<double> read_dvec(std::istream& in, const char* name) {
  expect_token(in, name);
  long count = need_int(in, "vector length");
  std::vector<double> v(count);
  for (auto& x : v) x = parse_double(need_token(in, "vector element"));
  return v;
}

} // namespace io

inline void save_model(const TrainedModel& model, std::ostream& out) {
  out << "commentqc-model " << kModelFormatVersion << "\n";
  out << "kind " << model_id(model.spec.kind) << "\n";
  out << "feature_dim " << model.feature_dim << "\n";
  for (const auto& [key, value] : model.spec.hyperparams)
    out << "hyperparam " << key << " " << io::dhex(value) << "\n";

  if (const auto* lr = std::get_if<LogRegParams>(&model.params)) {
    out << "bias " << io::dhex(lr->bias) << "\n";
    io::write_dvec("weights", lr->weights, out);
  } else if (const auto* dt = std::get_if<TreeModelParams>(&model.params)) {
    io::write_tree(dt->tree, out);
  } else if (const auto* knn = std::get_if<KnnParams>(&model.params)) {
    out << "k " << knn->k << "\n";
    out << "labels " << knn->train_labels.size();
    for (char l : knn->train_labels) out << " " << int(l);
    out << "\n";
    out << "rows " << knn->train_rows.size() << "\n";
    for (const auto& row : knn->train_rows) {
      out << "row " << row.entries.size();
      for (const auto& [c, v] : row.entries) out << " " << c << " " << io::dhex(v);
      out << "\n";
    }
  } else if (const auto* svm = std::get_if<SvmParams>(&model.params)) {
    io::write_dvec("weights", svm->weights, out);
  } else if (const auto* gbt = std::get_if<BoostParams>(&model.params)) {
    out << "f0 " << io::dhex(gbt->f0) << "\n";
    out << "ntrees " << gbt->trees.size() << "\n";
    for (const auto& tree : gbt->trees) io::write_tree(tree, out);
  } else if (const auto* rf = std::get_if<ForestParams>(&model.params)) {
    out << "ntrees " << rf->trees.size() << "\n";
    for (const auto& tree : rf->trees) io::write_tree(tree, out);
  } else if (const auto* nn = std::get_if<NeuralParams>(&model.params)) {
    out << "hidden " << nn->hidden << "\n";
    out << "input_dim " << nn->input_dim << "\n";
    io::write_dvec("w1", nn->w1, out);
    io::write_dvec("b1", nn->b1, out);
    io::write_dvec("w2", nn->w2, out);
    out << "b2 " << io::dhex(nn->b2) << "\n";
  }
  out << "end\n";
}

inline TrainedModel load_model(std::istream& in) {
  io::expect_token(in, "commentqc-model");
  long version = io::need_int(in, "format version");
  if (version != kModelFormatVersion)
    raise(Errc::BadModelFile, "unsupported model format version " + std::to_string(version));
  io::expect_token(in, "kind");
  auto kind = parse_model_id(io::need_token(in, "model kind"));
  if (!kind) raise(Errc::BadModelFile, "unknown model kind");
  io::expect_token(in, "feature_dim");
  long dim = io::need_int(in, "feature_dim");

  TrainedModel model;
  model.spec.kind = *kind;
  model.feature_dim = static_cast<std::uint32_t>(dim);

  std::string tok = io::need_token(in, "hyperparam or params");
  while (tok == "hyperparam") {
    std::string key = io::need_token(in, "hyperparam key");
    model.spec.hyperparams[key] = io::parse_double(io::need_token(in, "hyperparam value"));
    tok = io::need_token(in, "hyperparam or params");
  }

  auto after = [&](const char* want) {
    if (tok != want) raise(Errc::BadModelFile, std::string("expected '") + want + "', got '" + tok + "'");
  };

  switch (*kind) {
    case ModelKind::LogisticRegression: {
      after("bias");
      LogRegParams p;
      p.bias = io::parse_double(io::need_token(in, "bias"));
      p.weights = io::read_dvec(in, "weights");
      model.params = std::move(p);
      break;
    }
    case ModelKind::DecisionTree: {
      after("tree");
      long count = io::need_int(in, "node count");
      Tree tree;
      tree.nodes.resize(count);
      for (auto& n : tree.nodes) {
        n.feature = static_cast<std::int32_t>(io::need_int(in, "feature"));
        n.threshold = io::parse_double(io::need_token(in, "threshold"));
        n.left = static_cast<std::int32_t>(io::need_int(in, "left"));
        n.right = static_cast<std::int32_t>(io::need_int(in, "right"));
        n.value = io::parse_double(io::need_token(in, "value"));
        n.n_useful = static_cast<std::uint64_t>(io::need_int(in, "n_useful"));
        n.n_total = static_cast<std::uint64_t>(io::need_int(in, "n_total"));
      }
      model.params = TreeModelParams{std::move(tree)};
      break;
    }
    case ModelKind::Knn: {
      after("k");
      KnnParams p;
      p.k = static_cast<std::uint32_t>(io::need_int(in, "k"));
      io::expect_token(in, "labels");
      long n_labels = io::need_int(in, "label count");
      p.train_labels.resize(n_labels);
      for (auto& l : p.train_labels) l = static_cast<char>(io::need_int(in, "label"));
      io::expect_token(in, "rows");
      long n_rows = io::need_int(in, "row count");
      p.train_rows.resize(n_rows);
      for (auto& row : p.train_rows) {
        io::expect_token(in, "row");
        long nnz = io::need_int(in, "nnz");
        row.dim = model.feature_dim;
        row.entries.resize(nnz);
        for (auto& [c, v] : row.entries) {
          c = static_cast<std::uint32_t>(io::need_int(in, "column"));
          v = io::parse_double(io::need_token(in, "value"));
        }
      }
      model.params = std::move(p);
      break;
    }
    case ModelKind::Svm: {
      after("weights");
      long count = io::need_int(in, "vector length");
      SvmParams p;
      p.weights.resize(count);
      for (auto& x : p.weights) x = io::parse_double(io::need_token(in, "weight"));
      model.params = std::move(p);
      break;
    }
    case ModelKind::GradientBoosting: {
      after("f0");
      BoostParams p;
      p.f0 = io::parse_double(io::need_token(in, "f0"));
      io::expect_token(in, "ntrees");
      long count = io::need_int(in, "tree count");
      for (long i = 0; i < count; ++i) p.trees.push_back(io::read_tree(in));
      model.params = std::move(p);
      break;
    }
    case ModelKind::RandomForest: {
      after("ntrees");
      long count = io::need_int(in, "tree count");
      ForestParams p;
      for (long i = 0; i < count; ++i) p.trees.push_back(io::read_tree(in));
      model.params = std::move(p);
      break;
    }
    case ModelKind::NeuralNetwork: {
      after("hidden");
      NeuralParams p;
      p.hidden = static_cast<std::uint32_t>(io::need_int(in, "hidden"));
      io::expect_token(in, "input_dim");
      p.input_dim = static_cast<std::uint32_t>(io::need_int(in, "input_dim"));
      p.w1 = io::read_dvec(in, "w1");
      p.b1 = io::read_dvec(in, "b1");
      p.w2 = io::read_dvec(in, "w2");
      io::expect_token(in, "b2");
      p.b2 = io::parse_double(io::need_token(in, "b2"));
      model.params = std::move(p);
      break;
    }
  }
  io::expect_token(in, "end");
  return model;
}

} // namespace commentqc::models
