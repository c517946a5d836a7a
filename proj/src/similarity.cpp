#include "agglearn/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agglearn {

void FeatureWeights::validate() const {
    for (double w : {concepts, association, cov})
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("feature weights must be non-negative finite numbers");
    if (!(sum() > 0.0)) throw std::invalid_argument("feature weights must not all be zero");
}

double dice_coefficient(const ConceptSet& a, const ConceptSet& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("dice coefficient of an empty concept set");
    std::size_t common = 0;
    for (const auto& tag : a) common += b.count(tag);
    return 2.0 * static_cast<double>(common) / static_cast<double>(a.size() + b.size());
}

double concept_sim(const ConceptSet& a_measure, const ConceptSet& a_category,
                   const ConceptSet& b_measure, const ConceptSet& b_category) {
    return (dice_coefficient(a_measure, b_measure) + dice_coefficient(a_category, b_category)) /
           2.0;
}

double concept_sim(const FeatureVector& a, const FeatureVector& b) {
    return concept_sim(a.measure_concepts, a.category_concepts, b.measure_concepts,
                       b.category_concepts);
}

double association_sim(AssociationType a, AssociationType b) {
    if (a == b) return 1.0;
    if (a == AssociationType::one_to_one || b == AssociationType::one_to_one) return 0.0;
    // Remaining unequal pairs among {one-to-many, many-to-one, many-to-many}:
    // sharing a "many" side with many-to-many scores 0.5, the fully crossed
    // one-to-many/many-to-one pair scores 0.
    if (a == AssociationType::many_to_many || b == AssociationType::many_to_many) return 0.5;
    return 0.0;
}

double cov_sim(double a, double b) {
    double d = std::abs(a - b);
    if (d == 0.0) return 1.0;
    return 1.0 / (1.0 + std::exp(-1.0 / d));
}

double total_sim(const FeatureVector& a, const FeatureVector& b, const FeatureWeights& w) {
    return similarity_breakdown(a, b, w).total;
}

SimilarityBreakdown similarity_breakdown(const FeatureVector& a, const FeatureVector& b,
                                         const FeatureWeights& w) {
    w.validate();
    SimilarityBreakdown out;
    out.concepts = concept_sim(a, b);
    out.association = association_sim(a.association, b.association);
    out.cov = cov_sim(a.avg_cov, b.avg_cov);
    out.total = (w.concepts * out.concepts + w.association * out.association + w.cov * out.cov) /
                w.sum();
    return out;
}

}  // namespace agglearn
