#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semscore/corpus.hpp"

namespace semscore {

// A -> 1 ... D -> 4, lower is better.
int grade_to_score(Grade g);

// Converts ratings to a per-(model, record) score slice under `metric_id`
// (lower_better). Multiple annotators on one pair are averaged.
void add_human_scores(const std::vector<HumanRating>& ratings, ScoreMatrix& into,
                      const std::string& metric_id = "human");

// Arithmetic mean per model over its scored records. A metric ingested as
// per-model aggregates (record id "*") passes those through unchanged.
std::map<std::string, double> mean_score_per_model(const ScoreMatrix& matrix,
                                                   const std::string& metric_id);

struct RankEntry {
    std::string model_id;
    double mean_score;
    int rank;  // 1 = best
    bool tied;
};

struct ModelRanking {
    std::string metric_id;
    Direction direction;
    std::vector<RankEntry> entries;  // rank order

    std::optional<int> rank_of(const std::string& model_id) const;
};

// Best-first ranking; exact ties broken lexicographically by model_id and
// flagged.
ModelRanking rank_models(const std::map<std::string, double>& means, Direction direction,
                         const std::string& metric_id = "");

// Tie-corrected Kendall tau-b via O(n log n) inversion counting. Throws on
// length mismatch, n < 2, or both sides all-constant (undefined).
double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y);

// Sample Pearson correlation. Throws on length mismatch, n < 2, or zero
// variance on either side.
double pearson_r(const std::vector<double>& x, const std::vector<double>& y);

struct CorrelationRow {
    std::string metric_id;
    double tau = 0.0;  // signed, kept for diagnostics
    double r = 0.0;
    double reported_tau = 0.0;  // absolute values, as published
    double reported_r = 0.0;
    std::vector<std::string> excluded_models;
    int n_models = 0;
    int unscored_records = 0;  // (model, record) pairs the metric skipped
};

struct CorrelationReport {
    std::vector<CorrelationRow> rows;  // sorted by reported_tau descending

    const CorrelationRow* find(const std::string& metric_id) const;
};

// Correlates each metric's per-model means against the human means over the
// non-excluded intersection of models. Requires >= min_models in every
// intersection.
CorrelationReport correlation_report(
    const std::map<std::string, double>& human_means, const ScoreMatrix& matrix,
    const std::map<std::string, std::set<std::string>>& exclusions = {}, int min_models = 3);

// group -> metric -> tau between per-model mean human and metric scores
// within the group; nullopt marks a defined-group/undefined-tau cell (for
// example when one side is constant). Groups with fewer than min_instances
// rated records are omitted. Models must be the manually rated subset.
using GroupCorrelationTable =
    std::map<std::string, std::map<std::string, std::optional<double>>>;

GroupCorrelationTable per_group_correlation(
    const Dataset& dataset, const ScoreMatrix& matrix, const std::vector<HumanRating>& ratings,
    int min_instances, const std::vector<std::string>& models,
    const std::map<std::string, std::set<std::string>>& exclusions = {});

// Chance-corrected agreement over {A,B,C,D}. nullopt when chance agreement
// is 1 (both annotators constant and identical), where kappa is undefined.
std::optional<double> cohen_kappa(const std::vector<Grade>& a, const std::vector<Grade>& b);

// Kappa per annotator pair over their shared (model, record) set.
struct KappaResult {
    std::string annotator_a;
    std::string annotator_b;
    size_t shared_items;
    std::optional<double> kappa;
};
std::vector<KappaResult> kappa_by_annotator_pair(const std::vector<HumanRating>& ratings);

}  // namespace semscore
