#pragma once

#include "agglearn/features.hpp"

namespace agglearn {

/// Per-feature weights for the total similarity (concepts, association,
/// CoV). All defaults are 1.
struct FeatureWeights {
    double concepts = 1.0;
    double association = 1.0;
    double cov = 1.0;

    double sum() const { return concepts + association + cov; }
    void validate() const;  // non-negative finite weights, positive sum

    bool operator==(const FeatureWeights&) const = default;
};

/// Dice coefficient 2|X n Y| / (|X| + |Y|). Throws on an empty set.
double dice_coefficient(const ConceptSet& a, const ConceptSet& b);

/// Concept similarity of two cases: Dice over the measure-concept pair and
/// over the category-concept pair, averaged.
double concept_sim(const ConceptSet& a_measure, const ConceptSet& a_category,
                   const ConceptSet& b_measure, const ConceptSet& b_category);
double concept_sim(const FeatureVector& a, const FeatureVector& b);

/// Symmetric association lookup: equal types 1; many-to-many paired with
/// either one-sided "many" type 0.5; one-to-one against anything else 0;
/// one-to-many against many-to-one 0.
double association_sim(AssociationType a, AssociationType b);

/// Sigmoid closeness of two CoV values: 1/(1 + e^(-1/|a-b|)), extended by
/// continuity to 1 when the values are equal. Stays above 0.5.
double cov_sim(double a, double b);

/// Weighted mean of the three per-feature similarities; lies in [0, 1].
double total_sim(const FeatureVector& a, const FeatureVector& b,
                 const FeatureWeights& w = {});

/// Per-feature breakdown of one comparison.
struct SimilarityBreakdown {
    double concepts = 0.0;
    double association = 0.0;
    double cov = 0.0;
    double total = 0.0;
};

SimilarityBreakdown similarity_breakdown(const FeatureVector& a, const FeatureVector& b,
                                         const FeatureWeights& w = {});

}  // namespace agglearn
