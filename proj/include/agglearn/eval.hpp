#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "agglearn/casebase.hpp"

namespace agglearn {

/// Deterministic RNG used wherever evaluation needs randomness. mt19937_64
/// output is pinned by the standard, so seeded runs reproduce across
/// platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double range(double lo, double hi) { return lo + (hi - lo) * unit(); }
    double normal();
    bool chance(double p) { return unit() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct SplitResult {
    std::vector<Case> train;
    std::vector<Case> test;
};

/// Seeded shuffle, then |train| = round(ratio * n) clamped so neither side
/// is empty. Requires at least two cases.
SplitResult split(const std::vector<Case>& cases, double train_ratio, std::uint64_t seed);

/// Which of the three features participate in retrieval. F1 = concepts,
/// F2 = association type, F3 = averaged CoV.
struct FeatureMask {
    bool concepts = true;
    bool association = true;
    bool cov = true;

    static FeatureMask all() { return {}; }
    static FeatureMask only_concepts() { return {true, false, false}; }
    static FeatureMask only_association() { return {false, true, false}; }
    static FeatureMask only_cov() { return {false, false, true}; }
    static FeatureMask parse(std::string_view names);  // "F1,F3" etc.

    FeatureWeights apply(const FeatureWeights& base) const;
    std::string to_string() const;
};

/// 3x3 action confusion counts indexed [actual][predicted] in the order
/// average, last-period, sum.
struct Confusion {
    std::array<std::array<int, 3>, 3> counts{};

    int total() const;
    int trace() const;
};

struct EvalResult {
    double accuracy = 0.0;
    Confusion confusion;
    int k = 0;
    FeatureMask mask;
};

/// Accuracy of majority-vote suggestions over a labeled test set, with
/// retrieval restricted to the masked features. Base and test must be
/// disjoint by case id.
EvalResult evaluate(const CaseBase& base, const std::vector<Case>& test, int k,
                    FeatureMask mask = FeatureMask::all());

/// One experiment at a fixed split: per-feature ablations at
/// `single_feature_k` plus the all-features majority vote at `vote_k`.
struct EvalReport {
    double accuracy = 0.0;  // all features, majority vote at vote_k
    Confusion confusion;
    double f1_accuracy = 0.0;
    double f2_accuracy = 0.0;
    double f3_accuracy = 0.0;
    double all_single_accuracy = 0.0;  // all features at single_feature_k
    int vote_k = 0;
    int single_feature_k = 0;
    std::uint64_t seed = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
};

EvalReport run_experiment(const std::vector<Case>& cases, double train_ratio, std::uint64_t seed,
                          int vote_k = 3, int single_feature_k = 1,
                          const FeatureWeights& weights = {});

struct LearningPoint {
    std::size_t train_size = 0;
    double accuracy = 0.0;
};

/// Accuracy against one fixed test set while the known-case pool grows;
/// training subsets are nested (each size extends the previous one).
std::vector<LearningPoint> learning_curve(const std::vector<Case>& cases,
                                          const std::vector<std::size_t>& sizes,
                                          std::uint64_t seed, int k, double train_ratio = 0.65,
                                          const FeatureWeights& weights = {});

struct BenchContext {
    const Table* table = nullptr;
    std::string category;
    std::string measure;
};

struct TimingReport {
    double feature_extraction_total_ms = 0.0;  // summed over timed suggestions
    double mean_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
    int warmup_runs = 0;
    int timed_runs = 0;
};

/// Wall-clock latency of end-to-end suggestions (feature extraction included,
/// as it happens at suggestion time). The first `warmup` runs are excluded.
TimingReport bench(const CaseBase& base, const std::vector<BenchContext>& contexts,
                   const Lexicon& lexicon, int k, int warmup = 3);

/// Controls for the synthetic corpus generator.
struct SynthSpec {
    std::size_t n_cases = 100;
    double noise = 0.05;  // relative value jitter
    std::uint64_t seed = 0;
    double sum_share = 0.40;
    double average_share = 0.30;
    double last_period_share = 0.30;

    void validate() const;
};

struct CorpusEntry {
    Case labeled;  // features extracted through the normal pipeline
    Table table;
    RoleManifest manifest;
};
using SyntheticCorpus = std::vector<CorpusEntry>;

/// Small labeled tables whose measure dispersion concentrates near the CoV
/// band of their action, with header vocabulary and association cardinality
/// drawn from per-label priors. Deterministic under the seed.
SyntheticCorpus generate_synthetic_corpus(const SynthSpec& spec,
                                          const Lexicon& lexicon = Lexicon::defaults());

std::vector<Case> corpus_cases(const SyntheticCorpus& corpus);

/// Directory layout: corpus.json index plus tables/ and manifests/.
void save_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir);
SyntheticCorpus load_corpus(const std::filesystem::path& dir,
                            const Lexicon& lexicon = Lexicon::defaults());

}  // namespace agglearn
