#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "agglearn/eval.hpp"

namespace test_support {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(FIXTURE_DIR) / name;
}

// Two-column table from parallel cell lists.
inline agglearn::Table make_table(const std::string& dataset_id, const std::string& cat_name,
                                  std::vector<agglearn::Cell> cat_cells,
                                  const std::string& meas_name,
                                  std::vector<agglearn::Cell> meas_cells) {
    agglearn::Table t;
    t.dataset_id = dataset_id;
    t.columns.push_back({cat_name, std::move(cat_cells), false});
    t.columns.push_back({meas_name, std::move(meas_cells), false});
    return t;
}

inline agglearn::FeatureVector make_features(agglearn::ConceptSet measure,
                                             agglearn::ConceptSet category,
                                             agglearn::AssociationType assoc, double avg_cov) {
    agglearn::FeatureVector fv;
    fv.measure_concepts = std::move(measure);
    fv.category_concepts = std::move(category);
    fv.association = assoc;
    fv.avg_cov = avg_cov;
    return fv;
}

inline agglearn::Case make_case(const std::string& id, agglearn::FeatureVector fv,
                                std::optional<agglearn::AggregateAction> action) {
    agglearn::Case c;
    c.case_id = id;
    c.dataset_id = id + ".csv";
    c.measure_column = "m";
    c.category_column = "c";
    c.features = std::move(fv);
    c.action = action;
    return c;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "agglearn-tests" / name;
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace test_support
