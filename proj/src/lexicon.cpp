#include "agglearn/lexicon.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace agglearn {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

ConceptSet lower_tags(const std::vector<std::string>& tags, const std::string& where) {
    ConceptSet out;
    for (const auto& t : tags) {
        std::string tag = to_lower(trim(t));
        if (tag.empty()) throw std::runtime_error(where + ": empty tag");
        out.insert(std::move(tag));
    }
    if (out.empty()) throw std::runtime_error(where + ": empty tag list");
    return out;
}

ColumnKind::Kind kind_from_string(const std::string& s, const std::string& where) {
    if (s == "numeric") return ColumnKind::Kind::numeric;
    if (s == "textual") return ColumnKind::Kind::textual;
    if (s == "mixed") return ColumnKind::Kind::mixed;
    if (s == "empty") return ColumnKind::Kind::empty;
    throw std::runtime_error(where + ": unknown column kind '" + s + "'");
}

}  // namespace

std::string join_concepts(const ConceptSet& set, std::string_view sep) {
    std::string out;
    for (const auto& tag : set) {
        if (!out.empty()) out += sep;
        out += tag;
    }
    return out;
}

Lexicon Lexicon::defaults() {
    Lexicon lex;
    lex.rules = {
        {"amount", false, {"monetary"}},
        {"price", false, {"monetary"}},
        {"cost", false, {"monetary"}},
        {"salary", false, {"monetary"}},
        {"year", false, {"temporal"}},
        {"date", false, {"temporal"}},
        {"day", false, {"temporal"}},
        {"month", false, {"temporal"}},
        {"(id|code|number)\\s*$", true, {"identifier"}},
        {"%", false, {"percentage"}},
        {"percent", false, {"percentage"}},
        {"coverage", false, {"percentage"}},
        {"^\\s*(number of|total)\\b", true, {"count"}},
    };
    lex.kind_rules = {
        {ColumnKind::Kind::numeric, {"metric"}},
        {ColumnKind::Kind::textual, {"attribute"}},
        {ColumnKind::Kind::mixed, {"attribute"}},
        {ColumnKind::Kind::empty, {"attribute"}},
    };
    lex.currency_tags = {"monetary"};
    lex.compile();
    return lex;
}

void Lexicon::compile() {
    compiled_.clear();
    compiled_.reserve(rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) {
        if (!rules[i].is_regex) {
            compiled_.emplace_back();
            continue;
        }
        try {
            compiled_.emplace_back(rules[i].pattern,
                                   std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
            throw std::runtime_error("lexicon rule " + std::to_string(i) + ": invalid regex '" +
                                     rules[i].pattern + "': " + e.what());
        }
    }
}

ConceptSet Lexicon::annotate(std::string_view header, ColumnKind::Kind kind,
                             bool currency_flag) const {
    if (compiled_.size() != rules.size())
        throw std::logic_error("lexicon used before compile()");

    const std::string lowered = to_lower(header);
    ConceptSet out;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        bool hit = rules[i].is_regex
                       ? std::regex_search(lowered, compiled_[i])
                       : lowered.find(to_lower(rules[i].pattern)) != std::string::npos;
        if (hit) out.insert(rules[i].tags.begin(), rules[i].tags.end());
    }
    if (currency_flag) out.insert(currency_tags.begin(), currency_tags.end());
    if (auto it = kind_rules.find(kind); it != kind_rules.end())
        out.insert(it->second.begin(), it->second.end());
    return out;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read lexicon '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("lexicon '" + path.string() + "': " + e.what());
    }

    Lexicon lex;
    const Lexicon fallback = Lexicon::defaults();
    lex.kind_rules = fallback.kind_rules;
    lex.currency_tags = fallback.currency_tags;

    if (doc.contains("rules")) {
        std::size_t index = 0;
        for (const auto& entry : doc.at("rules")) {
            const std::string where = "lexicon rule " + std::to_string(index);
            LexiconRule rule;
            try {
                rule.pattern = entry.at("pattern").get<std::string>();
                rule.is_regex = entry.value("regex", false);
                rule.tags = lower_tags(entry.at("tags").get<std::vector<std::string>>(), where);
            } catch (const nlohmann::json::exception& e) {
                throw std::runtime_error(where + ": " + e.what());
            }
            lex.rules.push_back(std::move(rule));
            ++index;
        }
    }
    if (doc.contains("kind_rules")) {
        for (const auto& [key, value] : doc.at("kind_rules").items()) {
            const std::string where = "lexicon kind_rules['" + key + "']";
            lex.kind_rules[kind_from_string(key, where)] =
                lower_tags(value.get<std::vector<std::string>>(), where);
        }
    }
    if (doc.contains("currency_tags"))
        lex.currency_tags = lower_tags(doc.at("currency_tags").get<std::vector<std::string>>(),
                                       "lexicon currency_tags");

    lex.compile();
    return lex;
}

}  // namespace agglearn
