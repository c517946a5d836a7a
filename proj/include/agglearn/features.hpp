#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "agglearn/lexicon.hpp"
#include "agglearn/table.hpp"

namespace agglearn {

/// Cardinality relationship between category values and measure values,
/// oriented category -> measure.
enum class AssociationType { one_to_one, one_to_many, many_to_one, many_to_many };

std::string_view to_string(AssociationType a);
AssociationType association_from_string(std::string_view s);

/// Default aggregation behaviour of a measure within a category context.
/// Enumerators are in alphabetical order of their names; vote tie-breaking
/// relies on that.
enum class AggregateAction { average, last_period, sum };

std::string_view to_string(AggregateAction a);
AggregateAction action_from_string(std::string_view s);
inline constexpr AggregateAction kAllActions[] = {AggregateAction::average,
                                                  AggregateAction::last_period,
                                                  AggregateAction::sum};

/// The three case features: column concepts, association type, and the
/// partition-averaged coefficient of variation of the measure.
struct FeatureVector {
    ConceptSet measure_concepts;
    ConceptSet category_concepts;
    AssociationType association = AssociationType::many_to_many;
    double avg_cov = 0.0;

    bool operator==(const FeatureVector&) const = default;
};

/// Classify the category->measure association by distinct-value counts over
/// rows where both cells are non-empty. Let R be the largest number of
/// distinct measure values paired with one category value and L the largest
/// number of distinct category values paired with one measure value; the
/// result is (L==1 ? one : many)-to-(R==1 ? one : many).
AssociationType detect_association(const Table& table, std::string_view category,
                                   std::string_view measure);

/// Shift all values up by |min| when the minimum is negative; identity
/// otherwise. Output minimum is always >= 0.
std::vector<double> shift_positive(std::vector<double> values);

/// Population coefficient of variation sigma/mu; 0 when sigma is 0. Inputs
/// are expected non-negative (already shifted).
double cov(const std::vector<double>& values);

/// Shift the whole measure column positive, partition the shifted values by
/// category value, average cov over partitions with at least two values.
/// Falls back to the cov of the entire shifted column when every partition
/// is a singleton.
double averaged_partitioned_cov(const Table& table, std::string_view category,
                                std::string_view measure);

/// Rule-of-thumb mapping from averaged CoV to an action: below 0.25
/// last-period, below 0.75 average, otherwise sum.
AggregateAction baseline_rule(double avg_cov);

FeatureVector extract_case_features(const Table& table, std::string_view category,
                                    std::string_view measure, const Lexicon& lexicon);

}  // namespace agglearn
