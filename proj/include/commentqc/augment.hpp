#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "commentqc/cextract.hpp"
#include "commentqc/corpus.hpp"
#include "commentqc/error.hpp"
#include "commentqc/evaluate.hpp"
#include "commentqc/models.hpp"
#include "commentqc/preprocess.hpp"
#include "commentqc/rng.hpp"
#include "commentqc/vectorize.hpp"

namespace commentqc {

/// Pseudo-labeling policy: which spec labels, and how confident a score
/// must be before a pair is kept.
struct LabelerPolicy {
  ClassifierSpec base_spec = default_labeler_spec();
  double confidence_threshold = 0.9; // tau in [0.5, 1]

  /// Logistic regression trained harder than the evaluation default; the
  /// stock 0.1/200 schedule rarely produces scores outside (0.1, 0.9) on
  /// normalized rows, which would starve a 0.9 threshold.
  static ClassifierSpec default_labeler_spec() {
    ClassifierSpec spec = default_spec(ModelKind::LogisticRegression);
    spec.hyperparams["eta"] = 0.5;
    spec.hyperparams["epochs"] = 500;
    return spec;
  }
};

namespace detail {

struct CleanPair {
  std::size_t input_index = 0; // position in the original unlabeled list
  std::string comment_text;    // normalized
  std::string code_context;    // normalized
};

/// The seed preprocessing pipeline applied to unlabeled pairs: blank rows
/// out, leading line numbers stripped, length outliers removed over this
/// set, then text normalization.
inline std::vector<CleanPair> clean_unlabeled(const std::vector<ExtractedPair>& pairs,
                                              const PreprocessConfig& cfg) {
  std::vector<CleanPair> complete;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (is_blank(pairs[i].comment_text) || is_blank(pairs[i].code_context)) continue;
    complete.push_back({i, pairs[i].comment_text, strip_leading_numbers(pairs[i].code_context)});
  }
  if (complete.empty()) return {};

  std::vector<std::vector<std::size_t>> columns(2);
  for (const auto& p : complete) {
    columns[0].push_back(utf8_length(p.comment_text));
    columns[1].push_back(utf8_length(p.code_context));
  }
  auto keep = zscore_keep_mask(columns, cfg.z_threshold);

  std::vector<CleanPair> out;
  for (std::size_t i = 0; i < complete.size(); ++i) {
    if (!keep[i]) continue;
    CleanPair p = std::move(complete[i]);
    p.comment_text = normalize_text(p.comment_text, cfg);
    p.code_context = normalize_text(p.code_context, cfg);
    if (p.comment_text.empty() || p.code_context.empty()) continue;
    out.push_back(std::move(p));
  }
  return out;
}

inline std::string aux_id(std::size_t input_index) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%s%06zu", kAuxIdPrefix, input_index);
  return buf;
}

} // namespace detail

/// Scores each unlabeled pair with the given model over the frozen
/// vocabulary and keeps only confident ones: score >= tau labels Useful,
/// score <= 1−tau labels Not Useful, anything between is discarded.
/// Returned ids are "aux:" plus the pair's position in the input list.
inline Corpus pseudo_label(const models::TrainedModel& model,
                           const std::vector<ExtractedPair>& unlabeled, const Vocabulary& vocab,
                           Scheme scheme, double tau, const PreprocessConfig& cfg = {}) {
  if (tau < 0.5 || tau > 1.0)
    raise(Errc::InvalidArgument, "confidence threshold must be in [0.5, 1], got " + std::to_string(tau));

  Corpus aux;
  aux.provenance = Provenance::Auxiliary;
  auto cleaned = detail::clean_unlabeled(unlabeled, cfg);
  if (cleaned.empty()) return aux;

  FeatureMatrix m;
  m.scheme = scheme;
  m.vocab = vocab;
  m.rows.reserve(cleaned.size());
  for (const auto& p : cleaned) {
    auto tokens = tokenize(p.comment_text + " " + p.code_context);
    m.rows.push_back(scheme == Scheme::BoW ? bow_vector(tokens, vocab) : tfidf_vector(tokens, vocab));
  }
  auto scores = models::predict_score(model, m);

  for (std::size_t i = 0; i < cleaned.size(); ++i) {
    Label label;
    if (scores[i] >= tau)
      label = Label::Useful;
    else if (scores[i] <= 1.0 - tau)
      label = Label::NotUseful;
    else
      continue;
    aux.pairs.push_back({detail::aux_id(cleaned[i].input_index), cleaned[i].comment_text,
                         cleaned[i].code_context, label});
  }
  return aux;
}

/// Trains the labeling model on the full (already preprocessed) seed
/// corpus; returns the model plus the vocabulary it was fit on.
struct Labeler {
  models::TrainedModel model;
  Vocabulary vocab;
};

inline Labeler train_labeler(const Corpus& seed, const LabelerPolicy& policy,
                             const FeatureConfig& features, std::uint64_t seed_rng) {
  std::vector<std::size_t> all(seed.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  FeatureMatrix X = featurize_corpus(seed, features.scheme, all, features.min_df);
  std::vector<Label> y;
  y.reserve(seed.size());
  for (const auto& p : seed.pairs) y.push_back(p.label);
  Labeler labeler;
  labeler.model = models::fit(policy.base_spec, X, y, derive_seed(seed_rng, "labeler"));
  labeler.vocab = std::move(X.vocab);
  return labeler;
}

struct ModelComparison {
  ModelKind kind = ModelKind::LogisticRegression;
  CVResult seed_cv;
  CVResult augmented_cv;
  MetricsRow delta; // augmented mean − seed mean, exact arithmetic of stored values
};

struct ComparisonReport {
  std::vector<ModelComparison> per_model;
  std::uint64_t seed = 0;
  int k = 0;
  Scheme scheme = Scheme::TfIdf;
  std::size_t min_df = 0;
  std::size_t seed_rows = 0;
  std::size_t aux_rows = 0;
};

/// The augmentation experiment: one fold plan over the seed corpus, then
/// per model kind two cross-validations with identical folds and fit seeds,
/// without and with the auxiliary rows in the training folds.
inline ComparisonReport run_comparison(const Corpus& seed_corpus, const Corpus& aux,
                                       const std::vector<ModelKind>& kinds, int k,
                                       const FeatureConfig& features, std::uint64_t seed_rng,
                                       int jobs = 1) {
  FoldPlan plan = stratified_kfold(seed_corpus, k, derive_seed(seed_rng, "folds"));

  ComparisonReport report;
  report.seed = seed_rng;
  report.k = k;
  report.scheme = features.scheme;
  report.min_df = features.min_df;
  report.seed_rows = seed_corpus.size();
  report.aux_rows = aux.size();
  report.per_model.resize(kinds.size());
  for (std::size_t ki = 0; ki < kinds.size(); ++ki) report.per_model[ki].kind = kinds[ki];

  // one task per (kind, arm): both arms share the derived fit seeds and
  // write disjoint slots
  parallel_for(kinds.size() * 2, jobs, [&](std::size_t t) {
    std::size_t ki = t / 2;
    bool arm_augmented = (t % 2) == 1;
    ClassifierSpec spec = default_spec(kinds[ki]);
    std::uint64_t cv_seed = derive_seed(seed_rng, "cv");
    CVResult cv = cross_validate(spec, seed_corpus, plan, features, cv_seed,
                                 arm_augmented ? &aux : nullptr, 1);
    auto& slot = report.per_model[ki];
    (arm_augmented ? slot.augmented_cv : slot.seed_cv) = std::move(cv);
  });

  for (auto& m : report.per_model) {
    m.delta.precision = m.augmented_cv.mean.precision - m.seed_cv.mean.precision;
    m.delta.recall = m.augmented_cv.mean.recall - m.seed_cv.mean.recall;
    m.delta.f1 = m.augmented_cv.mean.f1 - m.seed_cv.mean.f1;
  }
  return report;
}

} // namespace commentqc
