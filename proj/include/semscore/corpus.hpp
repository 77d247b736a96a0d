#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace semscore {

enum class Grade { A, B, C, D };

Grade parse_grade(const std::string& s);  // throws std::runtime_error on anything but "A".."D"
std::string to_string(Grade g);

struct EvalRecord {
    std::string record_id;
    std::string task_group;
    std::string instruction;
    std::optional<std::string> instance_input;
    std::string target_response;

    bool operator==(const EvalRecord&) const = default;
};

struct ModelResponse {
    std::string model_id;
    std::string record_id;
    std::string response_text;  // may be empty, models can emit nothing

    bool operator==(const ModelResponse&) const = default;
};

struct HumanRating {
    std::string model_id;
    std::string record_id;
    std::string annotator_id;
    Grade grade;

    bool operator==(const HumanRating&) const = default;
};

struct Dataset {
    std::string source_name;
    std::vector<EvalRecord> records;  // file order, record_id unique

    const EvalRecord* find(const std::string& record_id) const;
    std::set<std::string> record_ids() const;

    bool operator==(const Dataset&) const = default;
};

enum class Direction { higher_better, lower_better };

Direction parse_direction(const std::string& s);
std::string to_string(Direction d);

// Per-(metric, model, record) scores. record_id "*" holds a per-model
// aggregate, used when a metric is ingested as precomputed per-model means.
class ScoreMatrix {
public:
    static constexpr const char* kAggregate = "*";

    // model -> record -> score
    using Slice = std::map<std::string, std::map<std::string, double>>;

    void declare_metric(const std::string& metric_id, Direction direction);
    void set(const std::string& metric_id, const std::string& model_id,
             const std::string& record_id, double score);

    bool has_metric(const std::string& metric_id) const;
    Direction direction(const std::string& metric_id) const;
    std::vector<std::string> metric_ids() const;
    const Slice& slice(const std::string& metric_id) const;
    std::optional<double> get(const std::string& metric_id, const std::string& model_id,
                              const std::string& record_id) const;
    size_t entry_count(const std::string& metric_id) const;

private:
    std::map<std::string, Slice> entries_;
    std::map<std::string, Direction> directions_;
};

struct ValidationIssue {
    enum class Kind {
        missing_response,         // model has responses but none for this record
        orphan_response,          // response references a record not in the dataset
        orphan_rating,            // rating references a record not in the dataset
        rating_without_response,  // rating for a known record the model never answered
    };
    Kind kind;
    std::string model_id;
    std::string record_id;
    std::string detail;  // annotator id for rating issues, empty otherwise

    bool operator==(const ValidationIssue&) const = default;
};

std::string to_string(ValidationIssue::Kind k);

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool clean() const { return issues.empty(); }
};

// records.jsonl: {"id", "group", "instruction", "input"?, "target"} per line
Dataset load_records(const std::filesystem::path& path);
void save_records(const Dataset& dataset, const std::filesystem::path& path);

// responses.jsonl: {"model", "id", "response"} per line
std::vector<ModelResponse> load_responses(const std::filesystem::path& path);

// ratings.jsonl: {"model", "id", "annotator", "grade"} per line
std::vector<HumanRating> load_ratings(const std::filesystem::path& path);

// external_scores.tsv: metric<TAB>model<TAB>id<TAB>score, id "*" for a
// per-model aggregate. Rows for other metrics are ignored so one file can
// carry several metrics; loading a metric that matched no row is an error.
void load_external_scores(const std::filesystem::path& path, const std::string& metric_id,
                          Direction direction, ScoreMatrix& into,
                          const std::set<std::string>& known_models,
                          const std::set<std::string>& known_records);

ValidationReport validate_join(const Dataset& dataset,
                               const std::vector<ModelResponse>& responses,
                               const std::vector<HumanRating>& ratings);

}  // namespace semscore
