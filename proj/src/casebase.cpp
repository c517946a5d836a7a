#include "agglearn/casebase.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace agglearn {

namespace {

constexpr std::string_view kFormatName = "agglearn-casebase";
constexpr int kFormatVersion = 1;

ConceptSet concepts_from_json(const nlohmann::json& arr) {
    ConceptSet out;
    for (const auto& tag : arr) out.insert(tag.get<std::string>());
    return out;
}

}  // namespace

const Case* CaseBase::find(std::string_view case_id) const {
    for (const auto& c : cases)
        if (c.case_id == case_id) return &c;
    return nullptr;
}

void add_case(CaseBase& base, Case c) {
    if (!c.action)
        throw std::runtime_error("case '" + c.case_id + "' has no action (query cases cannot "
                                 "be added to a case base)");
    if (base.find(c.case_id))
        throw std::runtime_error("duplicate case id '" + c.case_id + "'");
    base.cases.push_back(std::move(c));
}

std::vector<Neighbour> retrieve(const CaseBase& base, const FeatureVector& query, int k) {
    return retrieve(base, query, k, base.weights);
}

std::vector<Neighbour> retrieve(const CaseBase& base, const FeatureVector& query, int k,
                                const FeatureWeights& weights) {
    if (base.empty()) throw std::runtime_error("case base is empty");
    if (k < 1) throw std::invalid_argument("k must be at least 1");

    std::vector<Neighbour> scored;
    scored.reserve(base.size());
    for (const auto& c : base.cases) {
        Neighbour n;
        n.case_id = c.case_id;
        n.breakdown = similarity_breakdown(query, c.features, weights);
        n.total = n.breakdown.total;
        n.action = *c.action;
        scored.push_back(std::move(n));
    }
    // stable: equal totals keep insertion order
    std::stable_sort(scored.begin(), scored.end(),
                     [](const Neighbour& a, const Neighbour& b) { return a.total > b.total; });
    scored.resize(std::min<std::size_t>(static_cast<std::size_t>(k), scored.size()));
    return scored;
}

AggregateAction majority_vote(const std::vector<Neighbour>& neighbours) {
    if (neighbours.empty()) throw std::invalid_argument("majority vote over no neighbours");

    std::array<int, 3> counts{};
    std::array<double, 3> sums{};
    for (const auto& n : neighbours) {
        auto idx = static_cast<std::size_t>(n.action);
        counts[idx] += 1;
        sums[idx] += n.total;
    }
    // Winner by count, then summed similarity, then alphabetical action name
    // (the enum is declared in alphabetical order).
    std::size_t best = 0;
    bool have = false;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue;
        if (!have || counts[i] > counts[best] ||
            (counts[i] == counts[best] && sums[i] > sums[best])) {
            best = i;
            have = true;
        }
    }
    return static_cast<AggregateAction>(best);
}

Suggestion suggest_features(const CaseBase& base, const FeatureVector& query, int k) {
    Suggestion s;
    s.k = k;
    s.neighbours = retrieve(base, query, k);
    s.action = majority_vote(s.neighbours);
    return s;
}

Suggestion suggest(const CaseBase& base, const Table& table, std::string_view category,
                   std::string_view measure, const Lexicon& lexicon, int k) {
    return suggest_features(base, extract_case_features(table, category, measure, lexicon), k);
}

nlohmann::json case_to_json(const Case& c) {
    nlohmann::json doc{
        {"case_id", c.case_id},
        {"dataset_id", c.dataset_id},
        {"measure_column", c.measure_column},
        {"category_column", c.category_column},
        {"features",
         {{"measure_concepts", c.features.measure_concepts},
          {"category_concepts", c.features.category_concepts},
          {"association", to_string(c.features.association)},
          {"avg_cov", c.features.avg_cov}}},
    };
    if (!c.question.empty()) doc["question"] = c.question;
    if (c.action) doc["action"] = to_string(*c.action);
    return doc;
}

Case case_from_json(const nlohmann::json& doc) {
    Case c;
    c.case_id = doc.at("case_id").get<std::string>();
    c.dataset_id = doc.at("dataset_id").get<std::string>();
    c.measure_column = doc.at("measure_column").get<std::string>();
    c.category_column = doc.at("category_column").get<std::string>();
    c.question = doc.value("question", "");
    const auto& f = doc.at("features");
    c.features.measure_concepts = concepts_from_json(f.at("measure_concepts"));
    c.features.category_concepts = concepts_from_json(f.at("category_concepts"));
    c.features.association = association_from_string(f.at("association").get<std::string>());
    c.features.avg_cov = f.at("avg_cov").get<double>();
    if (doc.contains("action")) c.action = action_from_string(doc.at("action").get<std::string>());
    return c;
}

Case load_case_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read case file '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
        return case_from_json(doc);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("case file '" + path.string() + "': " + e.what());
    }
}

void save_casebase(const CaseBase& base, const std::filesystem::path& path) {
    base.weights.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write case base '" + path.string() + "'");
    nlohmann::json header{{"format", kFormatName},
                          {"version", kFormatVersion},
                          {"weights",
                           {{"concepts", base.weights.concepts},
                            {"association", base.weights.association},
                            {"cov", base.weights.cov}}}};
    out << header.dump() << '\n';
    for (const auto& c : base.cases) out << case_to_json(c).dump() << '\n';
}

CaseBase load_casebase(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read case base '" + path.string() + "'");

    CaseBase base;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            nlohmann::json doc = nlohmann::json::parse(line);
            if (!have_header) {
                if (doc.value("format", "") != kFormatName)
                    throw std::runtime_error("not an " + std::string(kFormatName) + " file");
                if (doc.at("version").get<int>() != kFormatVersion)
                    throw std::runtime_error("unsupported version");
                const auto& w = doc.at("weights");
                base.weights.concepts = w.at("concepts").get<double>();
                base.weights.association = w.at("association").get<double>();
                base.weights.cov = w.at("cov").get<double>();
                base.weights.validate();
                have_header = true;
                continue;
            }
            add_case(base, case_from_json(doc));
        } catch (const std::exception& e) {
            throw std::runtime_error("case base '" + path.string() + "' line " +
                                     std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_header)
        throw std::runtime_error("case base '" + path.string() + "': missing header line");
    return base;
}

}  // namespace agglearn
