#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agglearn/similarity.hpp"

namespace agglearn {

/// One aggregation context. Known cases carry an action; query cases do not.
struct Case {
    std::string case_id;
    std::string dataset_id;
    std::string measure_column;
    std::string category_column;
    std::string question;  // informational free text, may be empty
    FeatureVector features;
    std::optional<AggregateAction> action;

    bool operator==(const Case&) const = default;
};

/// Insertion-ordered collection of labeled cases plus the feature weights
/// used when retrieving against it. Immutable during retrieval.
struct CaseBase {
    std::vector<Case> cases;
    FeatureWeights weights;

    std::size_t size() const { return cases.size(); }
    bool empty() const { return cases.empty(); }
    const Case* find(std::string_view case_id) const;

    bool operator==(const CaseBase&) const = default;
};

/// Append a labeled case; rejects duplicates and unlabeled cases.
void add_case(CaseBase& base, Case c);

struct Neighbour {
    std::string case_id;
    double total = 0.0;
    SimilarityBreakdown breakdown;
    AggregateAction action = AggregateAction::sum;
};

struct Suggestion {
    AggregateAction action = AggregateAction::sum;
    std::vector<Neighbour> neighbours;  // sorted by total similarity, descending
    int k = 0;
};

/// Top-k most similar cases, ties broken by insertion order (earlier first).
std::vector<Neighbour> retrieve(const CaseBase& base, const FeatureVector& query, int k);
std::vector<Neighbour> retrieve(const CaseBase& base, const FeatureVector& query, int k,
                                const FeatureWeights& weights);

/// Most frequent action among the neighbours; frequency ties fall to the
/// larger summed similarity, then to alphabetical order of the action name.
AggregateAction majority_vote(const std::vector<Neighbour>& neighbours);

/// Extract features for the (category, measure) context of `table`, retrieve
/// the top-k known cases and vote.
Suggestion suggest(const CaseBase& base, const Table& table, std::string_view category,
                   std::string_view measure, const Lexicon& lexicon, int k);
Suggestion suggest_features(const CaseBase& base, const FeatureVector& query, int k);

nlohmann::json case_to_json(const Case& c);
Case case_from_json(const nlohmann::json& doc);
Case load_case_file(const std::filesystem::path& path);

/// Line-delimited persistence: a versioned header line followed by one JSON
/// record per case. load(save(base)) == base, insertion order included.
void save_casebase(const CaseBase& base, const std::filesystem::path& path);
CaseBase load_casebase(const std::filesystem::path& path);

}  // namespace agglearn
