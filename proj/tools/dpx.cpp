#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dpx/config.hpp"
#include "dpx/errors.hpp"
#include "dpx/eval.hpp"
#include "dpx/synth.hpp"
#include "dpx/text.hpp"

namespace fs = std::filesystem;
using namespace dpx;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIngest = 2;
constexpr int kExitNotFound = 3;
constexpr int kExitBackend = 4;
constexpr int kExitMissingParam = 5;

CorpusIndex load_index(const std::string& corpus_dir) {
    std::vector<fs::path> files;
    if (!fs::is_directory(corpus_dir)) {
        throw Error("corpus directory not found: " + corpus_dir);
    }
    for (const auto& entry : fs::directory_iterator(corpus_dir)) {
        if (entry.path().extension() == ".dst") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no .dst files in " + corpus_dir);

    std::vector<DatasheetDoc> docs;
    std::vector<std::string> failures;
    for (const auto& p : files) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        try {
            docs.push_back(ingest_document(ss.str(), p.filename().string()));
        } catch (const Error& e) {
            failures.push_back(p.filename().string() + ": " + e.what());
        }
    }
    if (!failures.empty()) {
        std::string msg = "ingestion failed for " + std::to_string(failures.size()) + " file(s):";
        for (const auto& f : failures) msg += "\n  " + f;
        throw Error(msg);
    }
    return build_index(docs);
}

std::unique_ptr<CompletionBackend> make_backend(const CliConfig& cfg) {
    if (cfg.backend_kind == "http") return std::make_unique<HttpBackend>(cfg.http);
    if (cfg.backend_kind == "mock") return std::make_unique<MockBackend>(cfg.mock);
    throw Error("unknown backend kind: " + cfg.backend_kind + " (use mock or http)");
}

void print_candidates(const std::vector<MatchCandidate>& candidates) {
    for (const auto& c : candidates) {
        std::cout << text::format("  %-14s (doc %s, distance %d, similarity %.3f)\n",
                                  c.matched_alias.c_str(), c.doc_id.c_str(), c.edit_distance,
                                  c.similarity);
    }
}

int report_resolution_failure(const ResolveOutcome& outcome, const std::string& part) {
    if (outcome.kind == ResolveKind::SeriesExpansion) {
        std::cout << part << " matches a series; members:\n";
        print_candidates(outcome.candidates);
        return kExitNotFound;
    }
    if (outcome.kind == ResolveKind::Recommendations) {
        std::cout << part << " not found; did you mean:\n";
        print_candidates(outcome.candidates);
        return kExitNotFound;
    }
    std::cout << part << " not found and no close matches.\n";
    return kExitNotFound;
}

void print_final_answers(const ExtractionResult& extraction,
                         const std::vector<std::string>& symbols,
                         const std::vector<Condition>& conditions) {
    ParameterSet projected;
    std::vector<std::string> unresolved;
    for (const auto& sym : symbols) {
        const ParamEntry* e = final_answer(extraction.parameters, sym, conditions);
        if (e) {
            projected.merge(*e);
        } else {
            unresolved.push_back(sym);
        }
    }
    std::cout << "ANSWER:\n";
    std::string block = render_answer_block(projected);
    if (!block.empty()) std::cout << block << "\n";
    for (const auto& s : unresolved) std::cout << s << "=?\n";
}

void write_trace_report(const ExtractionResult& extraction, const std::string& path) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& rec : extraction.trace) {
        j.push_back({{"t", rec.t},
                     {"query", rec.query},
                     {"chunk_ids", rec.chunk_ids},
                     {"raw_output", rec.raw_output},
                     {"parse_ok", rec.parse_ok},
                     {"note", rec.note}});
    }
    std::ofstream(path, std::ios::binary) << j.dump(2) << "\n";
    std::cout << "trace written to " << path << "\n";
}

std::vector<int> parse_groups(const std::string& spec) {
    std::vector<int> out;
    std::string s = text::trim(spec);
    size_t dots = s.find("..");
    if (dots != std::string::npos) {
        int lo = std::stoi(s.substr(0, dots));
        int hi = std::stoi(s.substr(dots + 2));
        for (int g = lo; g <= hi; ++g) out.push_back(g);
        return out;
    }
    for (const auto& piece : text::split_trimmed(s, ',')) out.push_back(std::stoi(piece));
    return out;
}

std::vector<std::string> default_symbols_for(DeviceFamily family) {
    switch (family) {
        case DeviceFamily::BJT_NPN:
        case DeviceFamily::BJT_PNP: return {"h_FE"};
        case DeviceFamily::NMOS:
        case DeviceFamily::PMOS: return {"VTO", "BETA", "Ciss"};
        case DeviceFamily::Diode:
        case DeviceFamily::LED: return {"RS", "BV"};
        case DeviceFamily::Unknown: return {};
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dpx: datasheet parameter extraction and SPICE model generation"};
    app.require_subcommand(1);
    app.fallthrough(true);  // global flags may appear after the subcommand

    std::string corpus_dir = "corpus";
    std::string backend_kind;
    std::string config_path;
    uint64_t seed = 1;
    app.add_option("--corpus", corpus_dir, "directory of .dst datasheets");
    app.add_option("--backend", backend_kind, "completion backend: mock | http");
    app.add_option("--config", config_path, "config file ([tdr] [iro] [po] [backend] [mapping])");
    app.add_option("--seed", seed, "seed for synthetic corpus generation");

    auto* cmd_idx = app.add_subcommand("index", "ingest the corpus and print index stats");

    auto* cmd_find = app.add_subcommand("find", "resolve a part number to a document");
    std::string find_part;
    cmd_find->add_option("part", find_part, "part number or series prefix")->required();

    auto* cmd_extract = app.add_subcommand("extract", "extract parameters for a part");
    std::string ex_part, ex_symbols, ex_conditions, ex_report;
    bool ex_interactive = false;
    cmd_extract->add_option("part", ex_part)->required();
    cmd_extract->add_option("--symbols", ex_symbols, "comma-separated symbols (e.g. h_FE,BV)");
    cmd_extract->add_option("--conditions", ex_conditions,
                            "operating conditions, e.g. \"I_C=0.1mA, V_CE=10V\"");
    cmd_extract->add_flag("--interactive", ex_interactive,
                          "prompt for conditions when the device needs them");
    cmd_extract->add_option("--report", ex_report, "write the per-iteration trace JSON here");

    auto* cmd_gen = app.add_subcommand("genmodel", "generate a simulator model for a part");
    std::string gen_part, gen_format = "spice", gen_out;
    cmd_gen->add_option("part", gen_part)->required();
    cmd_gen->add_option("--format", gen_format, "spice | pyspice");
    cmd_gen->add_option("--out", gen_out, "output path (default <part>.cir / <part>.py)");

    auto* cmd_eval = app.add_subcommand("eval", "run the ablation evaluation");
    std::string ev_groups = "1..5", ev_out = "eval_out";
    int ev_trials = 5, ev_docs = 20, ev_queries = 0;
    bool ev_keep_corpus = false;
    cmd_eval->add_option("--groups", ev_groups, "e.g. 1,5 or 1..5");
    cmd_eval->add_option("--trials", ev_trials, "trials per query per group");
    cmd_eval->add_option("--docs", ev_docs, "synthetic corpus size");
    cmd_eval->add_option("--queries", ev_queries, "query count (0 = 2 per document)");
    cmd_eval->add_option("--out", ev_out, "output directory for report files");
    cmd_eval->add_flag("--keep-corpus", ev_keep_corpus, "also write the generated corpus");

    CLI11_PARSE(app, argc, argv);

    CliConfig cfg;
    try {
        if (!config_path.empty()) cfg.apply_file(config_path);
        if (!backend_kind.empty()) cfg.backend_kind = text::to_lower(backend_kind);

        if (app.got_subcommand(cmd_idx)) {
            CorpusIndex index = load_index(corpus_dir);
            std::cout << index.doc_count << " documents indexed\n";
            std::cout << index.alias_map.size() << " aliases, " << index.series_map.size()
                      << " series\n";
            return 0;
        }

        if (app.got_subcommand(cmd_find)) {
            CorpusIndex index = load_index(corpus_dir);
            ResolveOutcome outcome =
                resolve_model(ModelQuery::from(find_part), index, cfg.pipeline.tdr);
            if (outcome.kind == ResolveKind::Exact) {
                const DatasheetDoc* doc = index.find(outcome.doc_id);
                std::cout << "exact match: " << doc->meta.part_number << " (doc "
                          << outcome.doc_id << ", " << doc->meta.manufacturer << ")\n";
                return 0;
            }
            return report_resolution_failure(outcome, find_part);
        }

        if (app.got_subcommand(cmd_extract)) {
            CorpusIndex index = load_index(corpus_dir);
            auto backend = make_backend(cfg);
            std::vector<std::string> symbols = text::split_trimmed(ex_symbols, ',');
            if (symbols.empty()) {
                std::cerr << "extract requires --symbols\n";
                return kExitUsage;
            }
            std::vector<Condition> conditions = parse_conditions(ex_conditions);

            IroState session;
            PipelineOutcome outcome;
            try {
                outcome = run_extraction(ex_part, symbols, conditions, FeatureFlags{}, index,
                                         *backend, cfg.pipeline, &session);
            } catch (const BackendError& e) {
                std::cerr << "backend failure: " << e.what() << "\n";
                return kExitBackend;
            }
            if (!outcome.ran_extraction) {
                return report_resolution_failure(outcome.resolve, ex_part);
            }

            if (ex_interactive && conditions.empty() && outcome.device.kind == DeviceKind::Dynamic &&
                outcome.extraction.needs_user_input) {
                std::cout << *outcome.extraction.needs_user_input << "\n";
                std::cout << "Enter conditions (key=value per line, empty line to finish):\n";
                std::string line;
                while (std::getline(std::cin, line)) {
                    std::string t = text::trim(line);
                    if (t.empty()) break;
                    for (auto& c : parse_conditions(t)) conditions.push_back(c);
                }
                std::sort(conditions.begin(), conditions.end(),
                          [](const Condition& a, const Condition& b) { return a.name < b.name; });
                if (!conditions.empty()) {
                    try {
                        outcome = run_extraction(ex_part, symbols, conditions, FeatureFlags{},
                                                 index, *backend, cfg.pipeline, &session);
                    } catch (const BackendError& e) {
                        std::cerr << "backend failure: " << e.what() << "\n";
                        return kExitBackend;
                    }
                }
            }

            print_final_answers(outcome.extraction, symbols, conditions);
            if (!ex_report.empty()) write_trace_report(outcome.extraction, ex_report);
            return 0;
        }

        if (app.got_subcommand(cmd_gen)) {
            if (gen_format != "spice" && gen_format != "pyspice") {
                std::cerr << "unknown --format " << gen_format << " (use spice or pyspice)\n";
                return kExitUsage;
            }
            CorpusIndex index = load_index(corpus_dir);
            auto backend = make_backend(cfg);

            ResolveOutcome resolved =
                resolve_model(ModelQuery::from(gen_part), index, cfg.pipeline.tdr);
            if (resolved.kind != ResolveKind::Exact) {
                return report_resolution_failure(resolved, gen_part);
            }
            const DatasheetDoc* doc = index.find(resolved.doc_id);
            DeviceClass device = classify_device(*doc);
            std::vector<std::string> symbols = default_symbols_for(device.family);
            if (symbols.empty()) {
                std::cerr << "cannot infer device family for " << gen_part << "\n";
                return kExitMissingParam;
            }

            PipelineOutcome outcome;
            try {
                outcome = run_extraction(gen_part, symbols, {}, FeatureFlags{}, index, *backend,
                                         cfg.pipeline);
            } catch (const BackendError& e) {
                std::cerr << "backend failure: " << e.what() << "\n";
                return kExitBackend;
            }

            try {
                SpiceModel model = generate_model_card(outcome.extraction.parameters,
                                                       device.family, doc->meta.part_number,
                                                       cfg.mapping);
                std::string path = gen_out;
                if (path.empty()) {
                    path = text::to_lower(doc->meta.part_number) +
                           (gen_format == "spice" ? ".cir" : ".py");
                }
                std::ofstream(path, std::ios::binary)
                    << (gen_format == "spice" ? model.rendered_card : model.rendered_script)
                    << "\n";
                std::cout << path << "\n";
                return 0;
            } catch (const MissingRequiredParameter& e) {
                std::cerr << e.what() << "\n";
                return kExitMissingParam;
            }
        }

        if (app.got_subcommand(cmd_eval)) {
            SynthOptions options;
            options.seed = seed;
            options.n_docs = ev_docs;
            options.n_queries = ev_queries;
            SynthCorpus corpus;
            bool corpus_supplied = app.count("--corpus") > 0;
            if (corpus_supplied) {
                corpus = load_corpus(corpus_dir);
                if (corpus.queries.empty() || corpus.truth.entries.empty()) {
                    std::cerr << corpus_dir
                              << " lacks _truth.json/_queries.json; generate with --keep-corpus\n";
                    return kExitIngest;
                }
            } else {
                corpus = gen_synthetic_corpus(options);
            }
            CorpusIndex index = corpus.build_index();
            auto backend = make_backend(cfg);

            std::vector<GroupConfig> groups;
            for (int g : parse_groups(ev_groups)) groups.push_back(GroupConfig::for_group(g));

            EvalReport report;
            try {
                report = run_ablation(index, corpus.truth, corpus.queries, groups, *backend,
                                      ev_trials, seed, cfg.pipeline);
            } catch (const BackendError& e) {
                std::cerr << "backend failure: " << e.what() << "\n";
                return kExitBackend;
            }

            fs::create_directories(ev_out);
            std::ofstream(fs::path(ev_out) / "report.json", std::ios::binary)
                << report.to_json() << "\n";
            std::ofstream(fs::path(ev_out) / "report.txt", std::ios::binary) << report.to_table();
            if (ev_keep_corpus && !corpus_supplied) {
                write_corpus(corpus, (fs::path(ev_out) / "corpus").string());
            }
            std::cout << report.to_table();
            std::cout << "report written to " << ev_out << "/report.json\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return kExitIngest;
    }
    return kExitUsage;
}
