#include "agglearn/eval.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace agglearn {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = unit();
    while (u1 <= 1e-12) u1 = unit();
    double u2 = unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

SplitResult split(const std::vector<Case>& cases, double train_ratio, std::uint64_t seed) {
    if (cases.size() < 2) throw std::invalid_argument("split needs at least two cases");
    if (!(train_ratio > 0.0 && train_ratio < 1.0))
        throw std::invalid_argument("train ratio must be strictly between 0 and 1");

    std::vector<std::size_t> order(cases.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    // round half up, clamped so both sides stay non-empty
    auto train_n = static_cast<std::size_t>(
        std::floor(train_ratio * static_cast<double>(cases.size()) + 0.5));
    train_n = std::clamp<std::size_t>(train_n, 1, cases.size() - 1);

    SplitResult out;
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < train_n ? out.train : out.test).push_back(cases[order[i]]);
    return out;
}

FeatureMask FeatureMask::parse(std::string_view names) {
    FeatureMask mask{false, false, false};
    std::string token;
    auto flush = [&] {
        std::string t = trim(token);
        token.clear();
        if (t.empty()) return;
        for (char& c : t) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (t == "F1") mask.concepts = true;
        else if (t == "F2") mask.association = true;
        else if (t == "F3") mask.cov = true;
        else throw std::invalid_argument("unknown feature name '" + t + "' (expected F1, F2, F3)");
    };
    for (char c : names) {
        if (c == ',') flush();
        else token += c;
    }
    flush();
    if (!mask.concepts && !mask.association && !mask.cov)
        throw std::invalid_argument("feature mask selects no features");
    return mask;
}

FeatureWeights FeatureMask::apply(const FeatureWeights& base) const {
    FeatureWeights w;
    w.concepts = concepts ? base.concepts : 0.0;
    w.association = association ? base.association : 0.0;
    w.cov = cov ? base.cov : 0.0;
    if (!(w.sum() > 0.0))
        throw std::invalid_argument("feature mask removes all similarity weight");
    return w;
}

std::string FeatureMask::to_string() const {
    std::string out;
    auto add = [&](const char* name) {
        if (!out.empty()) out += ',';
        out += name;
    };
    if (concepts) add("F1");
    if (association) add("F2");
    if (cov) add("F3");
    return out;
}

int Confusion::total() const {
    int n = 0;
    for (const auto& row : counts)
        for (int v : row) n += v;
    return n;
}

int Confusion::trace() const {
    int n = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) n += counts[i][i];
    return n;
}

EvalResult evaluate(const CaseBase& base, const std::vector<Case>& test, int k,
                    FeatureMask mask) {
    if (base.empty()) throw std::invalid_argument("evaluate: empty case base");
    if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
    FeatureWeights weights = mask.apply(base.weights);

    EvalResult result;
    result.k = k;
    result.mask = mask;
    for (const auto& query : test) {
        if (!query.action)
            throw std::invalid_argument("evaluate: test case '" + query.case_id + "' unlabeled");
        if (base.find(query.case_id))
            throw std::invalid_argument("evaluate: case '" + query.case_id +
                                        "' appears in both base and test set");
        auto neighbours = retrieve(base, query.features, k, weights);
        AggregateAction predicted = majority_vote(neighbours);
        result.confusion.counts[static_cast<std::size_t>(*query.action)]
                               [static_cast<std::size_t>(predicted)] += 1;
    }
    result.accuracy =
        static_cast<double>(result.confusion.trace()) / static_cast<double>(test.size());
    return result;
}

EvalReport run_experiment(const std::vector<Case>& cases, double train_ratio, std::uint64_t seed,
                          int vote_k, int single_feature_k, const FeatureWeights& weights) {
    SplitResult parts = split(cases, train_ratio, seed);
    CaseBase base{parts.train, weights};

    EvalReport report;
    report.vote_k = vote_k;
    report.single_feature_k = single_feature_k;
    report.seed = seed;
    report.train_size = parts.train.size();
    report.test_size = parts.test.size();

    report.f1_accuracy =
        evaluate(base, parts.test, single_feature_k, FeatureMask::only_concepts()).accuracy;
    report.f2_accuracy =
        evaluate(base, parts.test, single_feature_k, FeatureMask::only_association()).accuracy;
    report.f3_accuracy =
        evaluate(base, parts.test, single_feature_k, FeatureMask::only_cov()).accuracy;
    report.all_single_accuracy =
        evaluate(base, parts.test, single_feature_k, FeatureMask::all()).accuracy;

    EvalResult main = evaluate(base, parts.test, vote_k, FeatureMask::all());
    report.accuracy = main.accuracy;
    report.confusion = main.confusion;
    return report;
}

std::vector<LearningPoint> learning_curve(const std::vector<Case>& cases,
                                          const std::vector<std::size_t>& sizes,
                                          std::uint64_t seed, int k, double train_ratio,
                                          const FeatureWeights& weights) {
    if (sizes.empty()) throw std::invalid_argument("learning curve needs at least one size");
    SplitResult parts = split(cases, train_ratio, seed);

    std::vector<LearningPoint> points;
    for (std::size_t size : sizes) {
        if (size == 0) throw std::invalid_argument("learning curve size must be positive");
        if (size > parts.train.size())
            throw std::invalid_argument("learning curve size " + std::to_string(size) +
                                        " exceeds training pool of " +
                                        std::to_string(parts.train.size()));
        // nested subsets: the first `size` cases of the shuffled pool
        CaseBase base;
        base.cases.assign(parts.train.begin(), parts.train.begin() + static_cast<long>(size));
        base.weights = weights;
        points.push_back({size, evaluate(base, parts.test, k).accuracy});
    }
    return points;
}

TimingReport bench(const CaseBase& base, const std::vector<BenchContext>& contexts,
                   const Lexicon& lexicon, int k, int warmup) {
    if (contexts.empty()) throw std::invalid_argument("bench needs at least one context");
    using clock = std::chrono::steady_clock;
    auto ms_between = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };

    for (int i = 0; i < warmup; ++i) {
        const BenchContext& ctx = contexts[static_cast<std::size_t>(i) % contexts.size()];
        (void)suggest(base, *ctx.table, ctx.category, ctx.measure, lexicon, k);
    }

    TimingReport report;
    report.warmup_runs = warmup;
    report.min_ms = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (const auto& ctx : contexts) {
        auto t0 = clock::now();
        FeatureVector fv = extract_case_features(*ctx.table, ctx.category, ctx.measure, lexicon);
        auto t1 = clock::now();
        (void)suggest_features(base, fv, k);
        auto t2 = clock::now();

        report.feature_extraction_total_ms += ms_between(t0, t1);
        double elapsed = ms_between(t0, t2);
        total += elapsed;
        report.min_ms = std::min(report.min_ms, elapsed);
        report.max_ms = std::max(report.max_ms, elapsed);
        ++report.timed_runs;
    }
    report.mean_ms = total / static_cast<double>(report.timed_runs);
    return report;
}

void SynthSpec::validate() const {
    if (n_cases < 3) throw std::invalid_argument("synthetic corpus needs at least 3 cases");
    if (noise < 0.0) throw std::invalid_argument("noise must be non-negative");
    for (double share : {sum_share, average_share, last_period_share})
        if (share < 0.0) throw std::invalid_argument("action shares must be non-negative");
    if (std::abs(sum_share + average_share + last_period_share - 1.0) > 1e-9)
        throw std::invalid_argument("action shares must sum to 1");
}

namespace {

struct HeaderPool {
    std::vector<std::string> names;
};

const HeaderPool kSharedMeasures{{"Value", "Reading", "Index", "Level", "Figure"}};
const HeaderPool kSumMeasures{
    {"Sales Amount", "Loan Amount", "Shipping Cost", "Ticket Price", "Total Units"}};
const HeaderPool kAverageMeasures{
    {"Utilization Percent", "Score", "Mean Temp", "Rating", "Price Index"}};
const HeaderPool kLastMeasures{
    {"Coverage Percent", "Total Employed", "Headcount", "Balance", "Inventory Level"}};

const HeaderPool kSharedCategories{{"Region", "Group", "Segment", "Zone"}};
const HeaderPool kSumCategories{{"Branch", "Store", "Department", "EventName"}};
const HeaderPool kAverageCategories{{"City", "Account Code", "Gender", "Team"}};
const HeaderPool kLastCategories{{"Year", "Month", "Date", "Period Code"}};

const std::string& pick(const HeaderPool& pool, Rng& rng) {
    return pool.names[rng.below(pool.names.size())];
}

double measure_scale(const std::string& header, Rng& rng) {
    std::string lowered;
    for (char c : header) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lowered.find("amount") != std::string::npos || lowered.find("price") != std::string::npos ||
        lowered.find("cost") != std::string::npos)
        return rng.range(500.0, 5000.0);
    if (lowered.find("percent") != std::string::npos ||
        lowered.find("coverage") != std::string::npos)
        return rng.range(20.0, 80.0);
    return rng.range(50.0, 500.0);
}

Cell category_value(const std::string& header, std::size_t index) {
    static const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    if (header == "Year") return static_cast<double>(2001 + index);
    if (header == "Month") return std::string(kMonths[index % 12]);
    if (header == "Date") {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "2021-%02zu", index + 1);
        return std::string(buf);
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%c%02zu", header.empty() ? 'g' : header.front(), index + 1);
    return std::string(buf);
}

struct CasePlan {
    AggregateAction label;
    std::string category_header;
    std::string measure_header;
    bool many_to_many = false;
    double cov_target = 0.0;
    bool zero_block = false;  // sum pattern reaching CoV >= 1
};

double draw_cov_target(AggregateAction label, bool tail, Rng& rng) {
    switch (label) {
        case AggregateAction::last_period:
            return tail ? rng.range(0.20, 0.45) : rng.range(0.02, 0.16);
        case AggregateAction::average:
            return tail ? rng.range(0.15, 0.90) : rng.range(0.32, 0.68);
        case AggregateAction::sum:
            return tail ? rng.range(0.50, 0.78) : rng.range(0.80, 0.97);
    }
    return 0.5;
}

CasePlan plan_case(AggregateAction label, Rng& rng) {
    CasePlan plan;
    plan.label = label;

    double shared_p = 0.30;
    const HeaderPool* measures = &kSharedMeasures;
    const HeaderPool* categories = &kSharedCategories;
    double mm_p = 0.3;
    switch (label) {
        case AggregateAction::sum:
            if (!rng.chance(shared_p)) measures = &kSumMeasures;
            if (!rng.chance(shared_p)) categories = &kSumCategories;
            mm_p = 0.30;
            break;
        case AggregateAction::average:
            if (!rng.chance(shared_p)) measures = &kAverageMeasures;
            if (!rng.chance(shared_p)) categories = &kAverageCategories;
            mm_p = 0.40;
            break;
        case AggregateAction::last_period:
            if (!rng.chance(shared_p)) measures = &kLastMeasures;
            if (!rng.chance(shared_p)) categories = &kLastCategories;
            mm_p = 0.60;
            break;
    }
    plan.measure_header = pick(*measures, rng);
    plan.category_header = pick(*categories, rng);
    plan.many_to_many = rng.chance(mm_p);

    bool tail = rng.chance(0.08);
    plan.cov_target = draw_cov_target(label, tail, rng);
    plan.zero_block = label == AggregateAction::sum && plan.many_to_many && !tail;
    return plan;
}

Table build_case_table(const CasePlan& plan, const std::string& dataset_id, double noise,
                       Rng& rng) {
    std::size_t n_cats = 4 + rng.below(5);  // 4..8 categories
    if (plan.many_to_many && n_cats % 2 != 0) ++n_cats;
    std::size_t part_size = 6 + 2 * rng.below(4);  // 6, 8, 10, 12 rows each

    Table table;
    table.dataset_id = dataset_id;
    table.columns.resize(2);
    table.columns[0].name = plan.category_header;
    table.columns[1].name = plan.measure_header;

    std::vector<double> means(n_cats);
    for (std::size_t p = 0; p < n_cats; ++p)
        means[p] = measure_scale(plan.measure_header, rng) * rng.range(0.5, 1.5);
    if (plan.many_to_many && !plan.zero_block) {
        // paired partitions share exact values, forcing measure values to
        // repeat across categories
        for (std::size_t p = 0; p + 1 < n_cats; p += 2) means[p + 1] = means[p];
    }

    for (std::size_t p = 0; p < n_cats; ++p) {
        Cell cat = category_value(plan.category_header, p);
        double mu = means[p];
        std::vector<double> values;

        if (plan.zero_block) {
            // m equal positives among zeros: CoV = sqrt(n/m - 1)
            double c = plan.cov_target;
            auto m = static_cast<std::size_t>(std::lround(
                static_cast<double>(part_size) / (1.0 + c * c)));
            m = std::clamp<std::size_t>(m, 1, part_size - 1);
            while (m > 1 && std::sqrt(static_cast<double>(part_size) / static_cast<double>(m) -
                                      1.0) < 0.78)
                --m;
            double v = mu * (1.0 + rng.range(-0.05, 0.05));
            values.assign(part_size, 0.0);
            for (std::size_t i = 0; i < m; ++i) values[i] = v;
        } else {
            double c = plan.cov_target;
            for (std::size_t i = 0; i < part_size; ++i) {
                double v = mu * (i % 2 == 0 ? 1.0 + c : 1.0 - c);
                if (!plan.many_to_many) v *= 1.0 + noise * rng.normal();
                values.push_back(std::max(v, 0.0));
            }
        }

        for (double v : values) {
            table.columns[0].cells.push_back(cat);
            table.columns[1].cells.push_back(v);
        }
    }
    return table;
}

std::vector<AggregateAction> label_sequence(const SynthSpec& spec, Rng& rng) {
    // largest-remainder apportionment, then one shuffle
    const std::array<std::pair<AggregateAction, double>, 3> shares{{
        {AggregateAction::sum, spec.sum_share},
        {AggregateAction::average, spec.average_share},
        {AggregateAction::last_period, spec.last_period_share},
    }};
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < shares.size(); ++i) {
        double exact = shares[i].second * static_cast<double>(spec.n_cases);
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        remainders[i] = exact - std::floor(exact);
        assigned += counts[i];
    }
    while (assigned < spec.n_cases) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < remainders.size(); ++i)
            if (remainders[i] > remainders[best]) best = i;
        ++counts[best];
        remainders[best] = -1.0;
        ++assigned;
    }
    std::vector<AggregateAction> labels;
    for (std::size_t i = 0; i < shares.size(); ++i)
        labels.insert(labels.end(), counts[i], shares[i].first);
    rng.shuffle(labels);
    return labels;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SynthSpec& spec, const Lexicon& lexicon) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<AggregateAction> labels = label_sequence(spec, rng);

    SyntheticCorpus corpus;
    corpus.reserve(spec.n_cases);
    for (std::size_t i = 0; i < spec.n_cases; ++i) {
        CasePlan plan = plan_case(labels[i], rng);
        char id[32];
        std::snprintf(id, sizeof(id), "synth-%03zu", i);

        CorpusEntry entry;
        entry.table = build_case_table(plan, std::string(id) + ".csv", spec.noise, rng);
        entry.manifest.dataset_id = entry.table.dataset_id;
        entry.manifest.category_columns = {plan.category_header};
        entry.manifest.measure_columns = {plan.measure_header};

        entry.labeled.case_id = id;
        entry.labeled.dataset_id = entry.table.dataset_id;
        entry.labeled.category_column = plan.category_header;
        entry.labeled.measure_column = plan.measure_header;
        entry.labeled.question = "What are values of " + plan.measure_header + " by " +
                                 plan.category_header + "?";
        entry.labeled.features = extract_case_features(entry.table, plan.category_header,
                                                       plan.measure_header, lexicon);
        entry.labeled.action = plan.label;
        corpus.push_back(std::move(entry));
    }
    return corpus;
}

std::vector<Case> corpus_cases(const SyntheticCorpus& corpus) {
    std::vector<Case> cases;
    cases.reserve(corpus.size());
    for (const auto& entry : corpus) cases.push_back(entry.labeled);
    return cases;
}

void save_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "tables");
    fs::create_directories(dir / "manifests");

    nlohmann::json index;
    index["format"] = "agglearn-corpus";
    index["version"] = 1;
    index["cases"] = nlohmann::json::array();
    for (const auto& entry : corpus) {
        std::string table_rel = "tables/" + entry.labeled.case_id + ".csv";
        std::string manifest_rel = "manifests/" + entry.labeled.case_id + ".roles.json";
        save_table(entry.table, dir / table_rel);
        save_manifest(entry.manifest, dir / manifest_rel);
        index["cases"].push_back({{"case_id", entry.labeled.case_id},
                                  {"table", table_rel},
                                  {"manifest", manifest_rel},
                                  {"category", entry.labeled.category_column},
                                  {"measure", entry.labeled.measure_column},
                                  {"question", entry.labeled.question},
                                  {"action", to_string(*entry.labeled.action)}});
    }
    std::ofstream out(dir / "corpus.json");
    if (!out) throw std::runtime_error("cannot write corpus index in '" + dir.string() + "'");
    out << index.dump(2) << '\n';
}

SyntheticCorpus load_corpus(const std::filesystem::path& dir, const Lexicon& lexicon) {
    std::ifstream in(dir / "corpus.json");
    if (!in) throw std::runtime_error("cannot read corpus index '" +
                                      (dir / "corpus.json").string() + "'");
    nlohmann::json index;
    try {
        in >> index;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corpus index: " + std::string(e.what()));
    }
    if (index.value("format", "") != "agglearn-corpus")
        throw std::runtime_error("'" + dir.string() + "' is not an agglearn corpus directory");

    SyntheticCorpus corpus;
    for (const auto& doc : index.at("cases")) {
        CorpusEntry entry;
        // Table files are comma-delimited; dataset_id comes from the file name.
        entry.table = load_table(dir / doc.at("table").get<std::string>());
        entry.manifest = load_manifest(dir / doc.at("manifest").get<std::string>());
        entry.labeled.case_id = doc.at("case_id").get<std::string>();
        entry.labeled.dataset_id = entry.table.dataset_id;
        entry.labeled.category_column = doc.at("category").get<std::string>();
        entry.labeled.measure_column = doc.at("measure").get<std::string>();
        entry.labeled.question = doc.value("question", "");
        entry.labeled.features = extract_case_features(
            entry.table, entry.labeled.category_column, entry.labeled.measure_column, lexicon);
        entry.labeled.action = action_from_string(doc.at("action").get<std::string>());
        corpus.push_back(std::move(entry));
    }
    return corpus;
}

}  // namespace agglearn
