#include "agglearn/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace agglearn {

namespace {

// Canonical key for distinct-value comparisons; numbers and text never
// collide.
std::string cell_key(const Cell& c) {
    if (is_number(c)) return "n:" + format_number(as_number(c));
    return "t:" + as_text(c);
}

double mean(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

std::string_view to_string(AssociationType a) {
    switch (a) {
        case AssociationType::one_to_one: return "one-to-one";
        case AssociationType::one_to_many: return "one-to-many";
        case AssociationType::many_to_one: return "many-to-one";
        case AssociationType::many_to_many: return "many-to-many";
    }
    return "unknown";
}

AssociationType association_from_string(std::string_view s) {
    if (s == "one-to-one") return AssociationType::one_to_one;
    if (s == "one-to-many") return AssociationType::one_to_many;
    if (s == "many-to-one") return AssociationType::many_to_one;
    if (s == "many-to-many") return AssociationType::many_to_many;
    throw std::runtime_error("unknown association type '" + std::string(s) + "'");
}

std::string_view to_string(AggregateAction a) {
    switch (a) {
        case AggregateAction::average: return "average";
        case AggregateAction::last_period: return "last-period";
        case AggregateAction::sum: return "sum";
    }
    return "unknown";
}

AggregateAction action_from_string(std::string_view s) {
    if (s == "average") return AggregateAction::average;
    if (s == "last-period") return AggregateAction::last_period;
    if (s == "sum") return AggregateAction::sum;
    throw std::runtime_error("unknown aggregate action '" + std::string(s) + "'");
}

AssociationType detect_association(const Table& table, std::string_view category,
                                   std::string_view measure) {
    const Column& cat = table.column(category);
    const Column& meas = table.column(measure);

    std::map<std::string, std::set<std::string>> per_category;
    std::map<std::string, std::set<std::string>> per_measure;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const Cell& c = cat.cells[r];
        const Cell& m = meas.cells[r];
        if (is_empty(c) || is_empty(m)) continue;
        std::string ck = cell_key(c);
        std::string mk = cell_key(m);
        per_category[ck].insert(mk);
        per_measure[std::move(mk)].insert(std::move(ck));
    }
    if (per_category.empty())
        throw std::runtime_error("no co-occurring values between '" + std::string(category) +
                                 "' and '" + std::string(measure) + "'");

    std::size_t right = 0;
    for (const auto& [key, values] : per_category) right = std::max(right, values.size());
    std::size_t left = 0;
    for (const auto& [key, values] : per_measure) left = std::max(left, values.size());

    if (left == 1)
        return right == 1 ? AssociationType::one_to_one : AssociationType::one_to_many;
    return right == 1 ? AssociationType::many_to_one : AssociationType::many_to_many;
}

std::vector<double> shift_positive(std::vector<double> values) {
    if (values.empty()) return values;
    double min = *std::min_element(values.begin(), values.end());
    if (min < 0.0)
        for (double& v : values) v += -min;
    return values;
}

double cov(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("cov of empty value list");
    double mu = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mu) * (v - mu);
    double sigma = std::sqrt(ss / static_cast<double>(values.size()));
    if (sigma == 0.0) return 0.0;
    return sigma / mu;
}

double averaged_partitioned_cov(const Table& table, std::string_view category,
                                std::string_view measure) {
    const Column& cat = table.column(category);
    const Column& meas = table.column(measure);

    // The shift baseline is the minimum over the whole measure column.
    std::vector<double> all_values;
    for (const Cell& m : meas.cells)
        if (is_number(m)) all_values.push_back(as_number(m));
    if (all_values.empty())
        throw std::runtime_error("measure column '" + std::string(measure) + "' not numeric");
    double min = *std::min_element(all_values.begin(), all_values.end());
    double shift = min < 0.0 ? -min : 0.0;

    std::map<std::string, std::vector<double>> partitions;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const Cell& c = cat.cells[r];
        const Cell& m = meas.cells[r];
        if (is_empty(c) || !is_number(m)) continue;
        partitions[cell_key(c)].push_back(as_number(m) + shift);
    }

    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& [key, values] : partitions) {
        if (values.size() < 2) continue;
        sum += cov(values);
        ++counted;
    }
    if (counted == 0) {
        for (double& v : all_values) v += shift;
        return cov(all_values);
    }
    return sum / static_cast<double>(counted);
}

AggregateAction baseline_rule(double avg_cov) {
    if (avg_cov < 0.25) return AggregateAction::last_period;
    if (avg_cov < 0.75) return AggregateAction::average;
    return AggregateAction::sum;
}

FeatureVector extract_case_features(const Table& table, std::string_view category,
                                    std::string_view measure, const Lexicon& lexicon) {
    const Column& cat = table.column(category);
    const Column& meas = table.column(measure);

    FeatureVector fv;
    fv.measure_concepts =
        lexicon.annotate(meas.name, classify_column(meas.cells).kind, meas.currency_flag);
    fv.category_concepts =
        lexicon.annotate(cat.name, classify_column(cat.cells).kind, cat.currency_flag);
    fv.association = detect_association(table, category, measure);
    fv.avg_cov = averaged_partitioned_cov(table, category, measure);
    return fv;
}

}  // namespace agglearn
