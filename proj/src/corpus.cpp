#include "semscore/corpus.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "semscore/util.hpp"

namespace semscore {

using nlohmann::json;

Grade parse_grade(const std::string& s) {
    if (s == "A") return Grade::A;
    if (s == "B") return Grade::B;
    if (s == "C") return Grade::C;
    if (s == "D") return Grade::D;
    throw std::runtime_error("invalid grade \"" + s + "\" (expected A, B, C or D)");
}

std::string to_string(Grade g) {
    switch (g) {
        case Grade::A: return "A";
        case Grade::B: return "B";
        case Grade::C: return "C";
        case Grade::D: return "D";
    }
    return "?";
}

Direction parse_direction(const std::string& s) {
    if (s == "higher_better" || s == "higher") return Direction::higher_better;
    if (s == "lower_better" || s == "lower") return Direction::lower_better;
    throw std::runtime_error("invalid direction \"" + s + "\"");
}

std::string to_string(Direction d) {
    return d == Direction::higher_better ? "higher_better" : "lower_better";
}

std::string to_string(ValidationIssue::Kind k) {
    switch (k) {
        case ValidationIssue::Kind::missing_response: return "missing_response";
        case ValidationIssue::Kind::orphan_response: return "orphan_response";
        case ValidationIssue::Kind::orphan_rating: return "orphan_rating";
        case ValidationIssue::Kind::rating_without_response: return "rating_without_response";
    }
    return "?";
}

const EvalRecord* Dataset::find(const std::string& record_id) const {
    for (const auto& r : records)
        if (r.record_id == record_id) return &r;
    return nullptr;
}

std::set<std::string> Dataset::record_ids() const {
    std::set<std::string> ids;
    for (const auto& r : records) ids.insert(r.record_id);
    return ids;
}

void ScoreMatrix::declare_metric(const std::string& metric_id, Direction direction) {
    auto it = directions_.find(metric_id);
    if (it != directions_.end()) {
        if (it->second != direction)
            throw std::runtime_error("metric \"" + metric_id + "\" already declared as " +
                                     to_string(it->second) + ", cannot redeclare as " +
                                     to_string(direction));
        return;
    }
    directions_[metric_id] = direction;
    entries_[metric_id];
}

void ScoreMatrix::set(const std::string& metric_id, const std::string& model_id,
                      const std::string& record_id, double score) {
    auto it = directions_.find(metric_id);
    if (it == directions_.end())
        throw std::runtime_error("metric \"" + metric_id + "\" has no declared direction");
    auto& per_model = entries_[metric_id][model_id];
    if (!per_model.emplace(record_id, score).second)
        throw std::runtime_error("duplicate score for (" + metric_id + ", " + model_id +
                                 ", " + record_id + ")");
}

bool ScoreMatrix::has_metric(const std::string& metric_id) const {
    return directions_.count(metric_id) != 0;
}

Direction ScoreMatrix::direction(const std::string& metric_id) const {
    auto it = directions_.find(metric_id);
    if (it == directions_.end())
        throw std::runtime_error("unknown metric \"" + metric_id + "\"");
    return it->second;
}

std::vector<std::string> ScoreMatrix::metric_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, _] : directions_) ids.push_back(id);
    return ids;
}

const ScoreMatrix::Slice& ScoreMatrix::slice(const std::string& metric_id) const {
    auto it = entries_.find(metric_id);
    if (it == entries_.end())
        throw std::runtime_error("unknown metric \"" + metric_id + "\"");
    return it->second;
}

std::optional<double> ScoreMatrix::get(const std::string& metric_id, const std::string& model_id,
                                       const std::string& record_id) const {
    auto it = entries_.find(metric_id);
    if (it == entries_.end()) return std::nullopt;
    auto mit = it->second.find(model_id);
    if (mit == it->second.end()) return std::nullopt;
    auto rit = mit->second.find(record_id);
    if (rit == mit->second.end()) return std::nullopt;
    return rit->second;
}

size_t ScoreMatrix::entry_count(const std::string& metric_id) const {
    auto it = entries_.find(metric_id);
    if (it == entries_.end()) return 0;
    size_t n = 0;
    for (const auto& [_, per_record] : it->second) n += per_record.size();
    return n;
}

namespace {

// Iterates non-empty lines of a file, reporting 1-based line numbers.
// Lines that are pure whitespace are skipped, not errors.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(size_t, const std::string&)>& fn) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        fn(lineno, line);
    }
}

json parse_line(const std::filesystem::path& path, size_t lineno, const std::string& line) {
    try {
        json j = json::parse(line);
        if (!j.is_object()) throw std::runtime_error("not a JSON object");
        return j;
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                 ": malformed line: " + e.what());
    }
}

std::string require_string(const json& j, const char* key, const std::filesystem::path& path,
                           size_t lineno) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                 ": missing string field \"" + key + "\"");
    return j.at(key).get<std::string>();
}

}  // namespace

Dataset load_records(const std::filesystem::path& path) {
    Dataset ds;
    ds.source_name = path.filename().string();
    std::map<std::string, size_t> seen;  // id -> first line
    for_each_line(path, [&](size_t lineno, const std::string& line) {
        json j = parse_line(path, lineno, line);
        EvalRecord rec;
        rec.record_id = require_string(j, "id", path, lineno);
        rec.task_group = require_string(j, "group", path, lineno);
        rec.instruction = require_string(j, "instruction", path, lineno);
        rec.target_response = require_string(j, "target", path, lineno);
        if (j.contains("input")) {
            if (!j.at("input").is_string())
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": field \"input\" must be a string");
            rec.instance_input = j.at("input").get<std::string>();
        }
        if (trim(rec.instruction).empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": empty instruction for record \"" + rec.record_id + "\"");
        if (trim(rec.target_response).empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": empty target for record \"" + rec.record_id + "\"");
        auto [it, inserted] = seen.emplace(rec.record_id, lineno);
        if (!inserted)
            throw std::runtime_error(path.string() + ": duplicate record_id \"" + rec.record_id +
                                     "\" (lines " + std::to_string(it->second) + " and " +
                                     std::to_string(lineno) + ")");
        ds.records.push_back(std::move(rec));
    });
    return ds;
}

void save_records(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& rec : dataset.records) {
        json j;
        j["id"] = rec.record_id;
        j["group"] = rec.task_group;
        j["instruction"] = rec.instruction;
        if (rec.instance_input) j["input"] = *rec.instance_input;
        j["target"] = rec.target_response;
        out << j.dump() << "\n";
    }
}

std::vector<ModelResponse> load_responses(const std::filesystem::path& path) {
    std::vector<ModelResponse> out;
    std::map<std::pair<std::string, std::string>, size_t> seen;
    for_each_line(path, [&](size_t lineno, const std::string& line) {
        json j = parse_line(path, lineno, line);
        ModelResponse resp;
        resp.model_id = require_string(j, "model", path, lineno);
        resp.record_id = require_string(j, "id", path, lineno);
        resp.response_text = require_string(j, "response", path, lineno);
        auto [it, inserted] = seen.emplace(std::make_pair(resp.model_id, resp.record_id), lineno);
        if (!inserted)
            throw std::runtime_error(path.string() + ": duplicate response for (" + resp.model_id +
                                     ", " + resp.record_id + ") (lines " +
                                     std::to_string(it->second) + " and " +
                                     std::to_string(lineno) + ")");
        out.push_back(std::move(resp));
    });
    return out;
}

std::vector<HumanRating> load_ratings(const std::filesystem::path& path) {
    std::vector<HumanRating> out;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for_each_line(path, [&](size_t lineno, const std::string& line) {
        json j = parse_line(path, lineno, line);
        HumanRating rating;
        rating.model_id = require_string(j, "model", path, lineno);
        rating.record_id = require_string(j, "id", path, lineno);
        rating.annotator_id = require_string(j, "annotator", path, lineno);
        std::string grade = require_string(j, "grade", path, lineno);
        try {
            rating.grade = parse_grade(grade);
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " +
                                     e.what());
        }
        if (!seen.emplace(rating.model_id, rating.record_id, rating.annotator_id).second)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": duplicate rating for (" + rating.model_id + ", " +
                                     rating.record_id + ") by annotator \"" +
                                     rating.annotator_id + "\"");
        out.push_back(std::move(rating));
    });
    return out;
}

void load_external_scores(const std::filesystem::path& path, const std::string& metric_id,
                          Direction direction, ScoreMatrix& into,
                          const std::set<std::string>& known_models,
                          const std::set<std::string>& known_records) {
    if (into.has_metric(metric_id)) {
        if (into.direction(metric_id) != direction)
            throw std::runtime_error("metric \"" + metric_id + "\" already loaded as " +
                                     to_string(into.direction(metric_id)) +
                                     ", conflicting direction " + to_string(direction));
        throw std::runtime_error("metric \"" + metric_id + "\" already loaded");
    }
    into.declare_metric(metric_id, direction);
    size_t matched = 0;
    for_each_line(path, [&](size_t lineno, const std::string& line) {
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, '\t')) cols.push_back(col);
        if (cols.size() != 4)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected 4 tab-separated columns, got " +
                                     std::to_string(cols.size()));
        if (cols[0] != metric_id) return;  // other metrics in the same file
        const std::string& model = cols[1];
        const std::string& record = cols[2];
        if (!known_models.count(model))
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": unknown model \"" + model + "\"");
        if (record != ScoreMatrix::kAggregate && !known_records.count(record))
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": unknown record \"" + record + "\" for model \"" + model +
                                     "\"");
        double score = 0.0;
        size_t consumed = 0;
        try {
            score = std::stod(cols[3], &consumed);
        } catch (const std::exception&) {
            consumed = 0;
        }
        if (consumed != cols[3].size() || cols[3].empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": bad score \"" + cols[3] + "\"");
        into.set(metric_id, model, record, score);
        ++matched;
    });
    if (matched == 0)
        throw std::runtime_error(path.string() + ": no rows for metric \"" + metric_id + "\"");
}

ValidationReport validate_join(const Dataset& dataset,
                               const std::vector<ModelResponse>& responses,
                               const std::vector<HumanRating>& ratings) {
    ValidationReport report;
    std::set<std::string> known_records = dataset.record_ids();
    std::set<std::string> models;
    std::set<std::pair<std::string, std::string>> answered;
    for (const auto& r : responses) {
        models.insert(r.model_id);
        answered.emplace(r.model_id, r.record_id);
    }

    for (const auto& model : models)
        for (const auto& rec : dataset.records)
            if (!answered.count({model, rec.record_id}))
                report.issues.push_back({ValidationIssue::Kind::missing_response, model,
                                         rec.record_id, ""});

    for (const auto& r : responses)
        if (!known_records.count(r.record_id))
            report.issues.push_back({ValidationIssue::Kind::orphan_response, r.model_id,
                                     r.record_id, ""});

    for (const auto& r : ratings) {
        if (!known_records.count(r.record_id)) {
            report.issues.push_back({ValidationIssue::Kind::orphan_rating, r.model_id,
                                     r.record_id, r.annotator_id});
        } else if (!answered.count({r.model_id, r.record_id})) {
            report.issues.push_back({ValidationIssue::Kind::rating_without_response, r.model_id,
                                     r.record_id, r.annotator_id});
        }
    }
    return report;
}

}  // namespace semscore
