// agglearn — suggest default aggregation behaviour (sum / average /
// last-period) for measure columns in delimited tabular data.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agglearn/eval.hpp"

namespace {

using namespace agglearn;

std::vector<double> parse_doubles(const std::string& text, std::size_t expected,
                                  const std::string& what) {
    std::vector<double> out;
    std::string token;
    auto flush = [&] {
        if (trim(token).empty()) return;
        out.push_back(std::stod(trim(token)));
        token.clear();
    };
    try {
        for (char c : text) {
            if (c == ',') flush();
            else token += c;
        }
        flush();
    } catch (const std::exception&) {
        throw std::invalid_argument(what + ": cannot parse '" + text + "'");
    }
    if (out.size() != expected)
        throw std::invalid_argument(what + ": expected " + std::to_string(expected) +
                                    " comma-separated numbers, got " + std::to_string(out.size()));
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    for (double v : parse_doubles(text, 0, "sizes")) out.push_back(static_cast<std::size_t>(v));
    return out;
}

FeatureWeights parse_weights(const std::string& text) {
    auto v = parse_doubles(text, 3, "weights");
    FeatureWeights w{v[0], v[1], v[2]};
    w.validate();
    return w;
}

Lexicon lexicon_from(const std::string& path) {
    return path.empty() ? Lexicon::defaults() : load_lexicon(path);
}

char delimiter_from(bool tab) { return tab ? '\t' : ','; }

void require_context(const Table& table, const RoleManifest& manifest,
                     const std::string& category, const std::string& measure) {
    auto contexts = bind_roles(table, manifest);
    for (const auto& ctx : contexts)
        if (ctx.category == category && ctx.measure == measure) return;
    throw std::runtime_error("context (" + category + " -> " + measure +
                             ") is not declared by the manifest");
}

nlohmann::json feature_record(const std::string& dataset_id, const ContextPair& ctx,
                              const FeatureVector& fv) {
    return {{"dataset_id", dataset_id},
            {"category", ctx.category},
            {"measure", ctx.measure},
            {"category_concepts", fv.category_concepts},
            {"measure_concepts", fv.measure_concepts},
            {"association", to_string(fv.association)},
            {"avg_cov", fv.avg_cov},
            {"baseline_action", to_string(baseline_rule(fv.avg_cov))}};
}

void print_neighbours(const std::vector<Neighbour>& neighbours) {
    std::cout << "rank  total     concepts  assoc  cov      action       case\n";
    int rank = 1;
    for (const auto& n : neighbours) {
        std::cout << std::left << std::setw(6) << rank++ << std::fixed << std::setprecision(4)
                  << std::setw(10) << n.total << std::setw(10) << n.breakdown.concepts
                  << std::setw(7) << std::setprecision(2) << n.breakdown.association
                  << std::setw(9) << std::setprecision(4) << n.breakdown.cov << std::setw(13)
                  << to_string(n.action) << n.case_id << '\n';
    }
}

void print_confusion(const Confusion& confusion) {
    static const char* kNames[] = {"average", "last-period", "sum"};
    std::cout << "confusion (rows actual, cols predicted):\n";
    std::cout << "             ";
    for (const char* n : kNames) std::cout << std::setw(13) << n;
    std::cout << '\n';
    for (std::size_t i = 0; i < 3; ++i) {
        std::cout << std::setw(13) << std::left << kNames[i] << std::right;
        for (std::size_t j = 0; j < 3; ++j) std::cout << std::setw(13) << confusion.counts[i][j];
        std::cout << '\n' << std::left;
    }
}

struct CommonOpts {
    std::string data;
    std::string manifest;
    std::string lexicon;
    std::string casebase;
    std::string weights;
    bool tab = false;
    int k = 3;
};

int run(int argc, char** argv) {
    CLI::App app{"agglearn — learn and suggest default aggregation behaviour "
                 "(sum, average, last-period) for measure columns"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "agglearn 0.1.0");

    CommonOpts opt;
    std::string category, measure, action, case_id, question;
    std::string case_a, case_b, corpus_dir, out_dir, mask_text, mix_text, sizes_text;
    bool quiet = false, ablate = false;
    std::uint64_t seed = 0;
    double ratio = 0.65, noise = 0.05;
    std::size_t n_cases = 100;
    int single_k = 1, warmup = 3;

    auto add_data = [&](CLI::App* cmd) {
        cmd->add_option("--data", opt.data, "delimited data file (first row = headers)")
            ->required();
        cmd->add_flag("--tab", opt.tab, "tab-delimited input instead of comma");
    };
    auto add_lexicon = [&](CLI::App* cmd) {
        cmd->add_option("--lexicon", opt.lexicon, "lexicon file (built-in default when omitted)")
            ->envname("AGGLEARN_LEXICON");
    };
    auto add_casebase = [&](CLI::App* cmd, bool required) {
        auto* o = cmd->add_option("--casebase", opt.casebase, "case base file")
                      ->envname("AGGLEARN_CASEBASE");
        if (required) o->required();
    };

    // ingest ---------------------------------------------------------------
    auto* ingest = app.add_subcommand("ingest", "load a table and profile its columns");
    add_data(ingest);
    ingest->callback([&] {
        Table table = load_table(opt.data, delimiter_from(opt.tab));
        std::cout << "dataset: " << table.dataset_id << "  rows: " << table.row_count() << '\n';
        std::cout << "column                          kind     numeric_fraction  currency  empty\n";
        for (const auto& col : table.columns) {
            ColumnKind kind = classify_column(col.cells);
            std::size_t empties = 0;
            for (const auto& c : col.cells)
                if (is_empty(c)) ++empties;
            std::cout << std::left << std::setw(32) << col.name << std::setw(9)
                      << to_string(kind.kind) << std::setw(18) << std::fixed
                      << std::setprecision(3) << kind.numeric_fraction << std::setw(10)
                      << (col.currency_flag ? "yes" : "no") << empties << '\n';
        }
    });

    // annotate -------------------------------------------------------------
    auto* annotate = app.add_subcommand("annotate", "assign concept tags to every column");
    add_data(annotate);
    add_lexicon(annotate);
    annotate->callback([&] {
        Table table = load_table(opt.data, delimiter_from(opt.tab));
        Lexicon lex = lexicon_from(opt.lexicon);
        for (const auto& col : table.columns) {
            ConceptSet tags =
                lex.annotate(col.name, classify_column(col.cells).kind, col.currency_flag);
            std::cout << col.name << '\t' << join_concepts(tags) << '\n';
        }
    });

    // features -------------------------------------------------------------
    auto* features =
        app.add_subcommand("features", "extract case features for every manifest context");
    add_data(features);
    add_lexicon(features);
    features->add_option("--manifest", opt.manifest, "role manifest file")->required();
    features->callback([&] {
        Table table = load_table(opt.data, delimiter_from(opt.tab));
        RoleManifest manifest = load_manifest(opt.manifest);
        Lexicon lex = lexicon_from(opt.lexicon);
        for (const auto& ctx : bind_roles(table, manifest)) {
            FeatureVector fv = extract_case_features(table, ctx.category, ctx.measure, lex);
            std::cout << feature_record(table.dataset_id, ctx, fv).dump() << '\n';
        }
    });

    // sim ------------------------------------------------------------------
    auto* sim = app.add_subcommand("sim", "similarity diagnostics between two case files");
    sim->add_option("--case-a", case_a, "first serialized case (JSON)")->required();
    sim->add_option("--case-b", case_b, "second serialized case (JSON)")->required();
    sim->add_option("--weights", opt.weights, "feature weights w1,w2,w3 (default 1,1,1)");
    sim->callback([&] {
        Case a = load_case_file(case_a);
        Case b = load_case_file(case_b);
        FeatureWeights w = opt.weights.empty() ? FeatureWeights{} : parse_weights(opt.weights);
        SimilarityBreakdown s = similarity_breakdown(a.features, b.features, w);
        std::cout << std::fixed << std::setprecision(6);
        std::cout << "concepts     " << s.concepts << '\n';
        std::cout << "association  " << s.association << '\n';
        std::cout << "cov          " << s.cov << '\n';
        std::cout << "total        " << s.total << '\n';
    });

    // case -----------------------------------------------------------------
    auto* case_cmd = app.add_subcommand("case", "maintain the case base");
    case_cmd->require_subcommand(1);

    auto* case_add = case_cmd->add_subcommand("add", "extract features and store a labeled case");
    add_data(case_add);
    add_lexicon(case_add);
    add_casebase(case_add, true);
    case_add->add_option("--category", category, "category column")->required();
    case_add->add_option("--measure", measure, "measure column")->required();
    case_add->add_option("--action", action, "aggregate action: sum, average or last-period")
        ->required();
    case_add->add_option("--id", case_id, "case id (default <dataset>#<category>-><measure>)");
    case_add->add_option("--question", question, "informational question text");
    case_add->callback([&] {
        Table table = load_table(opt.data, delimiter_from(opt.tab));
        Lexicon lex = lexicon_from(opt.lexicon);

        CaseBase base;
        if (std::filesystem::exists(opt.casebase)) base = load_casebase(opt.casebase);

        Case c;
        c.case_id = case_id.empty()
                        ? table.dataset_id + "#" + category + "->" + measure
                        : case_id;
        c.dataset_id = table.dataset_id;
        c.category_column = category;
        c.measure_column = measure;
        c.question = question;
        c.features = extract_case_features(table, category, measure, lex);
        c.action = action_from_string(action);
        add_case(base, std::move(c));
        save_casebase(base, opt.casebase);
        std::cout << "added case '" << base.cases.back().case_id << "' (" << base.size()
                  << " cases)\n";
    });

    auto* case_list = case_cmd->add_subcommand("list", "print the stored cases");
    add_casebase(case_list, true);
    case_list->callback([&] {
        CaseBase base = load_casebase(opt.casebase);
        std::cout << "case base: " << opt.casebase << "  cases: " << base.size() << "  weights: "
                  << base.weights.concepts << ',' << base.weights.association << ','
                  << base.weights.cov << '\n';
        for (const auto& c : base.cases) {
            std::cout << c.case_id << '\t' << to_string(*c.action) << '\t' << c.category_column
                      << " -> " << c.measure_column << '\t' << to_string(c.features.association)
                      << '\t' << std::fixed << std::setprecision(4) << c.features.avg_cov << '\n';
        }
    });

    // suggest ----------------------------------------------------------------
    auto* suggest_cmd =
        app.add_subcommand("suggest", "suggest an aggregate action for one context");
    add_data(suggest_cmd);
    add_lexicon(suggest_cmd);
    add_casebase(suggest_cmd, true);
    suggest_cmd->add_option("--manifest", opt.manifest, "role manifest file")->required();
    suggest_cmd->add_option("--category", category, "category column")->required();
    suggest_cmd->add_option("--measure", measure, "measure column")->required();
    suggest_cmd->add_option("--k", opt.k, "neighbours consulted by the vote")
        ->check(CLI::PositiveNumber);
    suggest_cmd->add_option("--weights", opt.weights, "feature weights w1,w2,w3");
    suggest_cmd->add_flag("--quiet", quiet, "print the chosen action only");
    suggest_cmd->callback([&] {
        Table table = load_table(opt.data, delimiter_from(opt.tab));
        RoleManifest manifest = load_manifest(opt.manifest);
        require_context(table, manifest, category, measure);

        CaseBase base = load_casebase(opt.casebase);
        if (!opt.weights.empty()) base.weights = parse_weights(opt.weights);
        Lexicon lex = lexicon_from(opt.lexicon);

        Suggestion s = suggest(base, table, category, measure, lex, opt.k);
        if (quiet) {
            std::cout << to_string(s.action) << '\n';
            return;
        }
        std::cout << "suggestion: " << to_string(s.action) << "  (k=" << s.k << ", "
                  << s.neighbours.size() << " neighbours)\n";
        print_neighbours(s.neighbours);
    });

    // eval -------------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "evaluation harness");
    eval_cmd->require_subcommand(1);

    auto* synth = eval_cmd->add_subcommand("synth", "generate a synthetic labeled corpus");
    synth->add_option("--out", out_dir, "output directory")->required();
    synth->add_option("--n", n_cases, "number of cases")->check(CLI::PositiveNumber);
    synth->add_option("--seed", seed, "generator seed");
    synth->add_option("--noise", noise, "relative value jitter");
    synth->add_option("--mix", mix_text, "action shares sum,average,last-period (default 0.4,0.3,0.3)");
    add_lexicon(synth);
    synth->callback([&] {
        SynthSpec spec;
        spec.n_cases = n_cases;
        spec.seed = seed;
        spec.noise = noise;
        if (!mix_text.empty()) {
            auto mix = parse_doubles(mix_text, 3, "mix");
            spec.sum_share = mix[0];
            spec.average_share = mix[1];
            spec.last_period_share = mix[2];
        }
        SyntheticCorpus corpus = generate_synthetic_corpus(spec, lexicon_from(opt.lexicon));
        save_corpus(corpus, out_dir);
        std::cout << "wrote " << corpus.size() << " cases to " << out_dir << '\n';
    });

    auto add_eval_common = [&](CLI::App* cmd) {
        cmd->add_option("--corpus", corpus_dir, "corpus directory (see eval synth)")->required();
        cmd->add_option("--ratio", ratio, "training share of the split");
        cmd->add_option("--seed", seed, "split seed");
        add_lexicon(cmd);
    };

    auto* eval_split = eval_cmd->add_subcommand("split", "print the train/test partition");
    add_eval_common(eval_split);
    eval_split->callback([&] {
        auto cases = corpus_cases(load_corpus(corpus_dir, lexicon_from(opt.lexicon)));
        SplitResult parts = split(cases, ratio, seed);
        for (const auto& c : parts.train) std::cout << "train\t" << c.case_id << '\n';
        for (const auto& c : parts.test) std::cout << "test\t" << c.case_id << '\n';
    });

    auto* eval_run = eval_cmd->add_subcommand("run", "accuracy report on a split corpus");
    add_eval_common(eval_run);
    eval_run->add_option("--k", opt.k, "majority-vote k")->check(CLI::PositiveNumber);
    eval_run->add_option("--single-k", single_k, "k used for per-feature ablations")
        ->check(CLI::PositiveNumber);
    eval_run->add_option("--mask", mask_text, "evaluate one feature subset, e.g. F1,F3");
    eval_run->add_flag("--ablate", ablate, "print the per-feature ablation report");
    eval_run->add_option("--weights", opt.weights, "feature weights w1,w2,w3");
    eval_run->callback([&] {
        auto cases = corpus_cases(load_corpus(corpus_dir, lexicon_from(opt.lexicon)));
        FeatureWeights w = opt.weights.empty() ? FeatureWeights{} : parse_weights(opt.weights);
        if (!mask_text.empty()) {
            SplitResult parts = split(cases, ratio, seed);
            CaseBase base{parts.train, w};
            EvalResult r = evaluate(base, parts.test, opt.k, FeatureMask::parse(mask_text));
            std::cout << "train " << parts.train.size() << "  test " << parts.test.size()
                      << "  seed " << seed << "  k " << r.k << "  mask " << r.mask.to_string()
                      << '\n';
            std::cout << "accuracy " << std::fixed << std::setprecision(4) << r.accuracy << '\n';
            print_confusion(r.confusion);
            return;
        }
        EvalReport report = run_experiment(cases, ratio, seed, opt.k, single_k, w);
        std::cout << "train " << report.train_size << "  test " << report.test_size << "  seed "
                  << report.seed << '\n';
        std::cout << std::fixed << std::setprecision(4);
        if (ablate) {
            std::cout << "F1 (column concepts)           k=" << report.single_feature_k
                      << "  accuracy " << report.f1_accuracy << '\n';
            std::cout << "F2 (association type)          k=" << report.single_feature_k
                      << "  accuracy " << report.f2_accuracy << '\n';
            std::cout << "F3 (averaged CoV)              k=" << report.single_feature_k
                      << "  accuracy " << report.f3_accuracy << '\n';
            std::cout << "All features                   k=" << report.single_feature_k
                      << "  accuracy " << report.all_single_accuracy << '\n';
        }
        std::cout << "All features, majority vote    k=" << report.vote_k << "  accuracy "
                  << report.accuracy << '\n';
        print_confusion(report.confusion);
    });

    auto* eval_curve = eval_cmd->add_subcommand("curve", "learning curve over nested known-case pools");
    add_eval_common(eval_curve);
    eval_curve->add_option("--k", opt.k, "majority-vote k")->check(CLI::PositiveNumber);
    eval_curve->add_option("--sizes", sizes_text, "training sizes, e.g. 10,25,40,55")->required();
    eval_curve->callback([&] {
        auto cases = corpus_cases(load_corpus(corpus_dir, lexicon_from(opt.lexicon)));
        for (const auto& point : learning_curve(cases, parse_sizes(sizes_text), seed, opt.k, ratio))
            std::cout << point.train_size << '\t' << std::fixed << std::setprecision(4)
                      << point.accuracy << '\n';
    });

    auto* eval_bench = eval_cmd->add_subcommand("bench", "suggestion latency over the test split");
    add_eval_common(eval_bench);
    eval_bench->add_option("--k", opt.k, "majority-vote k")->check(CLI::PositiveNumber);
    eval_bench->add_option("--warmup", warmup, "untimed warm-up suggestions");
    eval_bench->callback([&] {
        Lexicon lex = lexicon_from(opt.lexicon);
        SyntheticCorpus corpus = load_corpus(corpus_dir, lex);
        SplitResult parts = split(corpus_cases(corpus), ratio, seed);
        CaseBase base{parts.train, FeatureWeights{}};

        std::map<std::string, const CorpusEntry*> by_id;
        for (const auto& entry : corpus) by_id[entry.labeled.case_id] = &entry;
        std::vector<BenchContext> contexts;
        for (const auto& c : parts.test) {
            const CorpusEntry* entry = by_id.at(c.case_id);
            contexts.push_back({&entry->table, c.category_column, c.measure_column});
        }
        TimingReport t = bench(base, contexts, lex, opt.k, warmup);
        std::cout << std::fixed << std::setprecision(3);
        std::cout << "suggestions " << t.timed_runs << "  (warmup " << t.warmup_runs << ")\n";
        std::cout << "feature extraction total  " << t.feature_extraction_total_ms << " ms\n";
        std::cout << "per suggestion mean " << t.mean_ms << " ms  min " << t.min_ms << " ms  max "
                  << t.max_ms << " ms\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "agglearn: " << e.what() << '\n';
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "agglearn: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "agglearn: internal error: " << e.what() << '\n';
        return 2;
    }
}
