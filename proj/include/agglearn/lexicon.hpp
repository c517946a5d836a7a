#pragma once

#include <filesystem>
#include <map>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "agglearn/table.hpp"

namespace agglearn {

// Lowercase semantic tags attached to a column (metric, monetary, attribute,
// temporal, ...). Open vocabulary; may be empty only transiently — annotation
// always yields at least the kind fallback tag.
using ConceptSet = std::set<std::string>;

std::string join_concepts(const ConceptSet& set, std::string_view sep = ",");

struct LexiconRule {
    std::string pattern;   // case-insensitive substring, or ECMAScript regex
    bool is_regex = false;
    ConceptSet tags;
};

/// Header-pattern rules plus per-kind fallback tags. Rules only ever add
/// tags; conflicts resolve by union.
class Lexicon {
public:
    std::vector<LexiconRule> rules;
    std::map<ColumnKind::Kind, ConceptSet> kind_rules;
    ConceptSet currency_tags;  // emitted when the column carries a currency flag

    /// Built-in vocabulary: metric, attribute, monetary, temporal,
    /// identifier, percentage, count.
    static Lexicon defaults();

    /// Compile regex rules; throws naming the offending rule index.
    void compile();

    ConceptSet annotate(std::string_view header, ColumnKind::Kind kind, bool currency_flag) const;

private:
    std::vector<std::regex> compiled_;  // parallel to rules, empty regex for substring rules
};

/// Read a lexicon file (schema documented in the README). A missing `rules`
/// array means kind-fallback-only; missing kind_rules entries are filled
/// from the built-in defaults.
Lexicon load_lexicon(const std::filesystem::path& path);

inline ConceptSet annotate_column(std::string_view header, ColumnKind kind, bool currency_flag,
                                  const Lexicon& lexicon) {
    return lexicon.annotate(header, kind.kind, currency_flag);
}

}  // namespace agglearn
