#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commentqc/corpus.hpp"
#include "commentqc/csv.hpp"
#include "commentqc/error.hpp"
#include "commentqc/models.hpp"
#include "commentqc/parallel.hpp"
#include "commentqc/rng.hpp"
#include "commentqc/vectorize.hpp"

namespace commentqc {

struct ConfusionMatrix {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
};

/// Counts with Useful as the positive class.
inline ConfusionMatrix confusion(const std::vector<Label>& y_true,
                                 const std::vector<Label>& y_pred) {
  if (y_true.size() != y_pred.size())
    raise(Errc::LengthMismatch, std::to_string(y_true.size()) + " truths vs " +
                                    std::to_string(y_pred.size()) + " predictions");
  if (y_true.empty()) raise(Errc::EmptyInput, "no predictions to score");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    bool t = y_true[i] == Label::Useful;
    bool p = y_pred[i] == Label::Useful;
    if (t && p) ++cm.tp;
    else if (!t && p) ++cm.fp;
    else if (t && !p) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

struct MetricsRow {
  double precision = 0, recall = 0, f1 = 0;
};

/// Precision/recall/F1 with 0/0 defined as 0.
inline MetricsRow metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) raise(Errc::EmptyInput, "empty confusion matrix");
  MetricsRow m;
  m.precision = (cm.tp + cm.fp) > 0 ? double(cm.tp) / double(cm.tp + cm.fp) : 0.0;
  m.recall = (cm.tp + cm.fn) > 0 ? double(cm.tp) / double(cm.tp + cm.fn) : 0.0;
  m.f1 = (m.precision + m.recall) > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

inline double f1_of(double precision, double recall) {
  return (precision + recall) > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

struct CVResult {
  std::vector<MetricsRow> per_fold;
  std::vector<ConfusionMatrix> fold_confusions;
  MetricsRow mean;
};

inline MetricsRow mean_of(const std::vector<MetricsRow>& rows) {
  MetricsRow m;
  for (const auto& r : rows) {
    m.precision += r.precision;
    m.recall += r.recall;
    m.f1 += r.f1;
  }
  auto n = static_cast<double>(rows.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  return m;
}

struct FeatureConfig {
  Scheme scheme = Scheme::TfIdf;
  std::size_t min_df = 2;
};

namespace detail {

inline void check_plan_covers(const FoldPlan& plan, const Corpus& corpus) {
  if (plan.assignment.size() != corpus.size())
    raise(Errc::InvalidArgument, "fold plan covers " + std::to_string(plan.assignment.size()) +
                                     " ids, corpus has " + std::to_string(corpus.size()));
  for (const auto& p : corpus.pairs) {
    auto it = plan.assignment.find(p.id);
    if (it == plan.assignment.end())
      raise(Errc::InvalidArgument, "fold plan misses id '" + p.id + "'");
    if (it->second < 0 || it->second >= plan.k)
      raise(Errc::InvalidArgument, "fold index out of range for id '" + p.id + "'");
  }
}

} // namespace detail

/// Stratified cross-validation of one classifier spec. Per fold, the
/// vocabulary and the model are fit on the training rows only; auxiliary
/// rows (when given) join every training fold but are never evaluated.
inline CVResult cross_validate(const ClassifierSpec& spec, const Corpus& corpus,
                               const FoldPlan& plan, const FeatureConfig& features,
                               std::uint64_t seed, const Corpus* aux = nullptr, int jobs = 1) {
  detail::check_plan_covers(plan, corpus);
  bool augmented = aux != nullptr && !aux->empty();
  if (augmented) {
    for (const auto& p : aux->pairs)
      if (plan.assignment.count(p.id))
        raise(Errc::InvalidArgument, "auxiliary id '" + p.id + "' appears in the fold plan");
  }

  // Tokenize every document once; folds then only rebuild vocabularies.
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size() + (augmented ? aux->size() : 0));
  for (const auto& p : corpus.pairs) docs.push_back(tokenize(pair_document(p)));
  if (augmented)
    for (const auto& p : aux->pairs) docs.push_back(tokenize(pair_document(p)));

  std::vector<int> fold_of(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i)
    fold_of[i] = plan.assignment.at(corpus.pairs[i].id);

  int k = plan.k;
  CVResult result;
  result.per_fold.resize(k);
  result.fold_confusions.resize(k);

  parallel_for(static_cast<std::size_t>(k), jobs, [&](std::size_t f) {
    try {
      std::vector<std::size_t> train_idx, test_idx;
      for (std::size_t i = 0; i < corpus.size(); ++i)
        (fold_of[i] == static_cast<int>(f) ? test_idx : train_idx).push_back(i);
      if (augmented)
        for (std::size_t a = 0; a < aux->size(); ++a) train_idx.push_back(corpus.size() + a);

      std::vector<std::vector<std::string>> fit_docs;
      fit_docs.reserve(train_idx.size());
      for (auto i : train_idx) fit_docs.push_back(docs[i]);
      Vocabulary vocab = build_vocabulary(fit_docs, features.min_df);

      auto label_at = [&](std::size_t i) {
        return i < corpus.size() ? corpus.pairs[i].label : aux->pairs[i - corpus.size()].label;
      };
      auto vectorize_rows = [&](const std::vector<std::size_t>& idx) {
        FeatureMatrix m;
        m.scheme = features.scheme;
        m.vocab = vocab;
        m.rows.reserve(idx.size());
        for (auto i : idx)
          m.rows.push_back(features.scheme == Scheme::BoW ? bow_vector(docs[i], vocab)
                                                          : tfidf_vector(docs[i], vocab));
        return m;
      };

      FeatureMatrix X_train = vectorize_rows(train_idx);
      std::vector<Label> y_train;
      y_train.reserve(train_idx.size());
      for (auto i : train_idx) y_train.push_back(label_at(i));

      auto model = models::fit(spec, X_train, y_train,
                               derive_seed(seed, model_id(spec.kind), f));

      FeatureMatrix X_test = vectorize_rows(test_idx);
      std::vector<Label> y_true;
      y_true.reserve(test_idx.size());
      for (auto i : test_idx) y_true.push_back(corpus.pairs[i].label);

      auto y_pred = models::predict(model, X_test);
      result.fold_confusions[f] = confusion(y_true, y_pred);
      result.per_fold[f] = metrics(result.fold_confusions[f]);
    } catch (const Error& e) {
      raise(e.code(), "fold " + std::to_string(f) + ": " + e.detail());
    }
  });

  result.mean = mean_of(result.per_fold);
  return result;
}

// ---------------------------------------------------------------------------
// Random hyperparameter search

struct ParamRange {
  enum class Kind { LogUniform, UniformInt, Choice };
  std::string name;
  Kind kind = Kind::LogUniform;
  double lo = 0, hi = 0;                 // LogUniform bounds
  std::int64_t ilo = 0, ihi = 0;         // UniformInt bounds (inclusive)
  std::vector<double> choices;           // Choice values

  static ParamRange log_uniform(std::string name, double lo, double hi) {
    ParamRange r;
    r.name = std::move(name);
    r.kind = Kind::LogUniform;
    r.lo = lo;
    r.hi = hi;
    return r;
  }
  static ParamRange uniform_int(std::string name, std::int64_t lo, std::int64_t hi) {
    ParamRange r;
    r.name = std::move(name);
    r.kind = Kind::UniformInt;
    r.ilo = lo;
    r.ihi = hi;
    return r;
  }
  static ParamRange choice(std::string name, std::vector<double> values) {
    ParamRange r;
    r.name = std::move(name);
    r.kind = Kind::Choice;
    r.choices = std::move(values);
    return r;
  }
};

struct ParamSpace {
  ModelKind kind = ModelKind::LogisticRegression;
  std::vector<ParamRange> params; // fixed hyperparameters are simply absent
};

/// Search ranges; anything the underlying method pins (neural network
/// learning rate and epoch count, fold count) is excluded.
inline ParamSpace default_param_space(ModelKind kind) {
  ParamSpace space;
  space.kind = kind;
  switch (kind) {
    case ModelKind::LogisticRegression:
      space.params = {ParamRange::log_uniform("eta", 1e-3, 1.0),
                      ParamRange::log_uniform("lambda", 1e-6, 1e-2),
                      ParamRange::uniform_int("epochs", 50, 500)};
      break;
    case ModelKind::DecisionTree:
      space.params = {ParamRange::uniform_int("max_depth", 2, 20),
                      ParamRange::uniform_int("min_samples_split", 2, 10)};
      break;
    case ModelKind::Knn:
      space.params = {ParamRange::choice("k", {1, 3, 5, 7, 9, 11, 13, 15})};
      break;
    case ModelKind::Svm:
      space.params = {ParamRange::log_uniform("lambda", 1e-6, 1e-2),
                      ParamRange::uniform_int("epochs", 20, 300)};
      break;
    case ModelKind::GradientBoosting:
      space.params = {ParamRange::uniform_int("rounds", 20, 300),
                      ParamRange::uniform_int("depth", 1, 4),
                      ParamRange::log_uniform("shrinkage", 0.01, 0.3)};
      break;
    case ModelKind::RandomForest:
      space.params = {ParamRange::uniform_int("trees", 20, 300),
                      ParamRange::uniform_int("max_depth", 4, 20)};
      break;
    case ModelKind::NeuralNetwork:
      space.params = {ParamRange::uniform_int("hidden", 16, 128)};
      break;
  }
  return space;
}

inline ClassifierSpec sample_spec(const ParamSpace& space, Rng& rng) {
  ClassifierSpec spec;
  spec.kind = space.kind;
  for (const auto& range : space.params) {
    double v = 0;
    switch (range.kind) {
      case ParamRange::Kind::LogUniform:
        v = log_uniform(rng, range.lo, range.hi);
        break;
      case ParamRange::Kind::UniformInt:
        v = static_cast<double>(uniform_int(rng, range.ilo, range.ihi));
        break;
      case ParamRange::Kind::Choice: {
        if (range.choices.empty()) raise(Errc::InvalidArgument, "empty choice range " + range.name);
        auto idx = uniform_int(rng, 0, static_cast<std::int64_t>(range.choices.size()) - 1);
        v = range.choices[static_cast<std::size_t>(idx)];
        break;
      }
    }
    spec.hyperparams[range.name] = v;
  }
  return spec;
}

struct SearchTrial {
  int candidate = 0;
  ClassifierSpec spec;
  CVResult cv;
};

struct SearchResult {
  ClassifierSpec best_spec;
  CVResult best_cv;
  std::vector<SearchTrial> trials;
};

/// Evaluates `budget` specs sampled i.i.d. from the space; the winner is
/// the highest mean F1, ties going to the earliest-sampled candidate.
inline SearchResult random_search(const ParamSpace& space, int budget, const Corpus& corpus,
                                  const FoldPlan& plan, const FeatureConfig& features,
                                  std::uint64_t seed, const Corpus* aux = nullptr, int jobs = 1) {
  if (budget < 1) raise(Errc::InvalidArgument, "search budget must be >= 1");

  auto sampler = make_rng(derive_seed(seed, "search", model_id(space.kind)));
  SearchResult result;
  result.trials.resize(budget);
  for (int i = 0; i < budget; ++i) {
    result.trials[i].candidate = i;
    result.trials[i].spec = sample_spec(space, sampler);
  }

  parallel_for(static_cast<std::size_t>(budget), jobs, [&](std::size_t i) {
    result.trials[i].cv = cross_validate(result.trials[i].spec, corpus, plan, features,
                                         derive_seed(seed, "candidate", i), aux, 1);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.trials.size(); ++i)
    if (result.trials[i].cv.mean.f1 > result.trials[best].cv.mean.f1) best = i;
  result.best_spec = result.trials[best].spec;
  result.best_cv = result.trials[best].cv;
  return result;
}

inline nlohmann::json hyperparams_json(const ClassifierSpec& spec) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : spec.hyperparams) j[key] = value;
  return j;
}

/// Trial log export: `kind,candidate,param_json,fold,precision,recall,f1`.
inline void export_trials(ModelKind kind, const std::vector<SearchTrial>& trials,
                          std::ostream& out) {
  out << "kind,candidate,param_json,fold,precision,recall,f1\n";
  char buf[32];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  for (const auto& trial : trials) {
    std::string params = hyperparams_json(trial.spec).dump();
    for (std::size_t f = 0; f < trial.cv.per_fold.size(); ++f) {
      const auto& m = trial.cv.per_fold[f];
      out << csv::join_row({model_id(kind), std::to_string(trial.candidate), params,
                            std::to_string(f), fmt(m.precision), fmt(m.recall), fmt(m.f1)});
    }
  }
}

} // namespace commentqc
