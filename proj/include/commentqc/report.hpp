#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "commentqc/augment.hpp"
#include "commentqc/evaluate.hpp"
#include "commentqc/models.hpp"

namespace commentqc {

struct NamedMetrics {
  std::string model;
  MetricsRow metrics;
};

namespace detail {

inline std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

} // namespace detail

/// Markdown metrics table in the published column order: model, precision,
/// recall, F1.
inline std::string render_metrics_markdown(const std::vector<NamedMetrics>& rows,
                                           const std::string& title) {
  std::string out;
  if (!title.empty()) out += "## " + title + "\n\n";
  out += "| # | Model | Precision | Recall | F1 Score |\n";
  out += "|---|-------|-----------|--------|----------|\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += "| " + std::to_string(i) + " | " + rows[i].model + " | " +
           detail::fmt4(rows[i].metrics.precision) + " | " + detail::fmt4(rows[i].metrics.recall) +
           " | " + detail::fmt4(rows[i].metrics.f1) + " |\n";
  }
  return out;
}

inline std::string render_metrics_csv(const std::vector<NamedMetrics>& rows) {
  std::string out = "model,precision,recall,f1\n";
  for (const auto& row : rows)
    out += csv::join_row({row.model, detail::fmt4(row.metrics.precision),
                          detail::fmt4(row.metrics.recall), detail::fmt4(row.metrics.f1)});
  return out;
}

inline std::vector<NamedMetrics> seed_rows(const ComparisonReport& report) {
  std::vector<NamedMetrics> rows;
  for (const auto& m : report.per_model)
    rows.push_back({model_display_name(m.kind), m.seed_cv.mean});
  return rows;
}

inline std::vector<NamedMetrics> augmented_rows(const ComparisonReport& report) {
  std::vector<NamedMetrics> rows;
  for (const auto& m : report.per_model)
    rows.push_back({model_display_name(m.kind), m.augmented_cv.mean});
  return rows;
}

inline std::string render_deltas_csv(const ComparisonReport& report) {
  std::string out = "model,delta_precision,delta_recall,delta_f1\n";
  for (const auto& m : report.per_model)
    out += csv::join_row({model_display_name(m.kind), detail::fmt4(m.delta.precision),
                          detail::fmt4(m.delta.recall), detail::fmt4(m.delta.f1)});
  return out;
}

/// Bar-chart data: per model one entry holding the two F1 values, seed
/// series first.
inline nlohmann::ordered_json f1_plot_json(const ComparisonReport& report) {
  nlohmann::ordered_json plot;
  plot["title"] = "F1 score, existing vs augmented training data";
  plot["series"] = {"Existing Data", "Augmented Data"};
  plot["models"] = nlohmann::ordered_json::array();
  for (const auto& m : report.per_model) {
    nlohmann::ordered_json entry;
    entry["model"] = model_display_name(m.kind);
    entry["f1"] = {m.seed_cv.mean.f1, m.augmented_cv.mean.f1};
    plot["models"].push_back(entry);
  }
  return plot;
}

/// Full-precision dump of a comparison run; `report` re-renders every
/// derived artifact from this.
inline nlohmann::ordered_json comparison_to_json(const ComparisonReport& report) {
  nlohmann::ordered_json j;
  j["seed"] = report.seed;
  j["k"] = report.k;
  j["scheme"] = scheme_name(report.scheme);
  j["min_df"] = report.min_df;
  j["seed_rows"] = report.seed_rows;
  j["aux_rows"] = report.aux_rows;
  auto metrics_json = [](const MetricsRow& m) {
    return nlohmann::ordered_json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
  };
  auto cv_json = [&](const CVResult& cv) {
    nlohmann::ordered_json c;
    c["mean"] = metrics_json(cv.mean);
    c["per_fold"] = nlohmann::ordered_json::array();
    for (const auto& fold : cv.per_fold) c["per_fold"].push_back(metrics_json(fold));
    return c;
  };
  j["models"] = nlohmann::ordered_json::array();
  for (const auto& m : report.per_model) {
    nlohmann::ordered_json entry;
    entry["kind"] = model_id(m.kind);
    entry["display"] = model_display_name(m.kind);
    entry["seed_data"] = cv_json(m.seed_cv);
    entry["augmented"] = cv_json(m.augmented_cv);
    entry["delta"] = metrics_json(m.delta);
    j["models"].push_back(entry);
  }
  return j;
}

inline ComparisonReport comparison_from_json(const nlohmann::json& j) {
  ComparisonReport report;
  report.seed = j.at("seed").get<std::uint64_t>();
  report.k = j.at("k").get<int>();
  auto scheme = parse_scheme(j.at("scheme").get<std::string>());
  if (!scheme) raise(Errc::InvalidArgument, "bad scheme in comparison json");
  report.scheme = *scheme;
  report.min_df = j.at("min_df").get<std::size_t>();
  report.seed_rows = j.at("seed_rows").get<std::size_t>();
  report.aux_rows = j.at("aux_rows").get<std::size_t>();
  auto metrics_from = [](const nlohmann::json& m) {
    MetricsRow row;
    row.precision = m.at("precision").get<double>();
    row.recall = m.at("recall").get<double>();
    row.f1 = m.at("f1").get<double>();
    return row;
  };
  auto cv_from = [&](const nlohmann::json& c) {
    CVResult cv;
    cv.mean = metrics_from(c.at("mean"));
    for (const auto& fold : c.at("per_fold")) cv.per_fold.push_back(metrics_from(fold));
    return cv;
  };
  for (const auto& entry : j.at("models")) {
    ModelComparison m;
    auto kind = parse_model_id(entry.at("kind").get<std::string>());
    if (!kind) raise(Errc::InvalidArgument, "bad model kind in comparison json");
    m.kind = *kind;
    m.seed_cv = cv_from(entry.at("seed_data"));
    m.augmented_cv = cv_from(entry.at("augmented"));
    m.delta = metrics_from(entry.at("delta"));
    report.per_model.push_back(std::move(m));
  }
  return report;
}

inline std::string render_comparison_markdown(const ComparisonReport& report) {
  std::string out;
  out += render_metrics_markdown(seed_rows(report), "Results with seed data");
  out += "\n";
  out += render_metrics_markdown(augmented_rows(report), "Results with seed + auxiliary data");
  out += "\n## Deltas (augmented - seed)\n\n";
  out += "| Model | dPrecision | dRecall | dF1 |\n";
  out += "|-------|------------|---------|-----|\n";
  for (const auto& m : report.per_model)
    out += std::string("| ") + model_display_name(m.kind) + " | " + detail::fmt4(m.delta.precision) +
           " | " + detail::fmt4(m.delta.recall) + " | " + detail::fmt4(m.delta.f1) + " |\n";
  return out;
}

} // namespace commentqc
