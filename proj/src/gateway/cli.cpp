#include "dkg/gateway/cli.hpp"

#include <atomic>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "dkg/evalkit/panel.hpp"
#include "dkg/extraction/corpus.hpp"
#include "dkg/gateway/codec.hpp"
#include "dkg/gateway/engine.hpp"
#include "dkg/gateway/service.hpp"
#include "dkg/graph/snapshot.hpp"

namespace dkg::gateway {

namespace {

std::atomic<HttpServer*> g_server{nullptr};

extern "C" void on_signal(int) {
    if (HttpServer* s = g_server.load()) s->stop();
}

struct GlobalOptions {
    std::string config;
    std::string data_dir;
};

// Defaults < config file < $DKG_DATA_DIR < --data-dir.
EngineConfig resolve_config(const GlobalOptions& g) {
    EngineConfig cfg;
    std::filesystem::path dir = cfg.data_dir;
    if (!g.data_dir.empty()) {
        dir = g.data_dir;
    } else if (const char* env = std::getenv(kDataDirEnv); env != nullptr && *env != '\0') {
        dir = env;
    }
    const std::filesystem::path file = g.config.empty() ? dir / kConfigFileName : std::filesystem::path(g.config);
    if (!g.config.empty() || std::filesystem::exists(file)) cfg = EngineConfig::load_file(file);
    cfg.apply_environment();
    if (!g.data_dir.empty()) cfg.data_dir = g.data_dir;
    cfg.validate();
    return cfg;
}

reasoning::SymptomSet split_csv(const std::string& csv) {
    reasoning::SymptomSet out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto comma = csv.find(',', start);
        const auto item = csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

void print(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dynamic medical knowledge graph engine", "dkg"};
    app.require_subcommand(1);
    GlobalOptions global;
    app.add_option("--config", global.config, "Configuration file (key = value)");
    app.add_option("--data-dir", global.data_dir, "Data directory (overrides $DKG_DATA_DIR)");

    bool demo = false;
    std::string from_snapshot;
    std::string lexicon_path;
    auto* init = app.add_subcommand("init", "Create or reset the data directory");
    init->add_flag("--demo", demo, "Seed the demo graph and lexicon");
    init->add_option("--from", from_snapshot, "Start from a graph snapshot")->check(CLI::ExistingFile);
    init->add_option("--lexicon", lexicon_path, "Lexicon JSON for the reference extractor")->check(CLI::ExistingFile);

    std::string corpus_path;
    auto* ingest = app.add_subcommand("ingest", "Extract and fuse a JSONL corpus");
    ingest->add_option("corpus", corpus_path, "Corpus file, one JSON document per line")->required();

    std::string symptoms_csv;
    auto* diagnose = app.add_subcommand("diagnose", "Posterior over diseases for a symptom set");
    diagnose->add_option("--symptoms", symptoms_csv, "Comma-separated symptom ids")->required();

    std::string disease;
    std::string explain_symptoms;
    auto* explain = app.add_subcommand("explain", "Evidence edges linking symptoms to a disease");
    explain->add_option("--disease", disease, "Disease id")->required();
    explain->add_option("--symptoms", explain_symptoms, "Comma-separated symptom ids")->required();

    std::string case_path;
    auto* recommend = app.add_subcommand("recommend", "Diagnose and recommend for a case file");
    recommend->add_option("--case", case_path, "Case JSON file")->required()->check(CLI::ExistingFile);

    std::string feedback_path;
    auto* feedback_cmd = app.add_subcommand("feedback", "Record clinician feedback and retune parameters");
    feedback_cmd->add_option("file", feedback_path, "Feedback events (JSON array or JSONL)")->required()->check(CLI::ExistingFile);

    auto* params_cmd = app.add_subcommand("params", "Show parameters and the audit log");

    std::uint64_t seed = 42;
    double noise = 0.0;
    std::string raters_path;
    std::string eval_feedback_path;
    evalkit::WorldSizes sizes;
    std::size_t cases_per_disease = 4;
    auto* eval = app.add_subcommand("eval", "Evaluate on a synthetic world and print the metric panel");
    eval->add_option("--seed", seed, "World seed");
    eval->add_option("--noise", noise, "Fraction of corrupted documents")->check(CLI::Range(0.0, 1.0));
    eval->add_option("--raters", raters_path, "Two-column rater table for Cohen's kappa")->check(CLI::ExistingFile);
    eval->add_option("--feedback", eval_feedback_path, "Feedback events with Likert scores")->check(CLI::ExistingFile);
    eval->add_option("--diseases", sizes.diseases, "Number of diseases");
    eval->add_option("--symptoms", sizes.symptoms, "Number of symptoms");
    eval->add_option("--treatments", sizes.treatments, "Number of treatments");
    eval->add_option("--profiles", sizes.profiles, "Number of patient profiles");
    eval->add_option("--cases-per-disease", cases_per_disease, "Patient cases per disease");

    std::string out_path;
    auto* export_cmd = app.add_subcommand("export", "Write the graph snapshot");
    export_cmd->add_option("--out", out_path, "Output file")->required();

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
    serve->add_option("--host", host, "Bind address");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        EngineConfig cfg = resolve_config(global);

        if (init->parsed()) {
            std::filesystem::create_directories(cfg.data_dir);
            for (const auto name : {kGraphFile, kParamsFile, kLexiconFile, kServedFile, kFeedbackFile, kAuditFile}) {
                std::filesystem::remove(cfg.data_dir / name);
            }
            graph::atomic_write(cfg.data_dir / kConfigFileName, cfg.to_text());
            Engine engine(cfg);
            graph::KnowledgeGraph g(cfg.capacity);
            if (!from_snapshot.empty()) g = graph::load_file(from_snapshot);
            else if (demo) g = demo_graph();
            engine.replace_graph(std::move(g));
            if (!lexicon_path.empty()) engine.set_lexicon(extraction::load_lexicon_file(lexicon_path));
            else if (demo) engine.set_lexicon(demo_lexicon());
            engine.set_params(cfg.params);
            json summary = stats_json(engine.stats());
            summary["data_dir"] = cfg.data_dir.string();
            print(out, summary);
        } else if (ingest->parsed()) {
            Engine engine(cfg);
            const auto result = engine.ingest(extraction::load_corpus_file(corpus_path));
            for (const auto& r : result.reports) out << r.to_line() << "\n";
            out << json{{"documents", result.documents}, {"stats", stats_json(engine.stats())}}.dump() << "\n";
        } else if (diagnose->parsed()) {
            const Engine engine(cfg);
            print(out, to_json(engine.diagnose(split_csv(symptoms_csv))));
        } else if (explain->parsed()) {
            const Engine engine(cfg);
            json entries = json::array();
            for (const auto& e : engine.explain(disease, split_csv(explain_symptoms))) entries.push_back(to_json(e));
            print(out, {{"disease", disease}, {"entries", entries}});
        } else if (recommend->parsed()) {
            Engine engine(cfg);
            const auto request = case_request_from_json(parse_json(extraction::read_file(case_path)));
            print(out, case_result_to_json(engine.recommend(request), request));
        } else if (feedback_cmd->parsed()) {
            Engine engine(cfg);
            const auto outcome = engine.submit_feedback(parse_feedback(extraction::read_file(feedback_path)));
            print(out, {{"accepted", outcome.accepted},
                        {"update", outcome.update ? to_json(*outcome.update) : json(nullptr)},
                        {"params", to_json(outcome.params)}});
        } else if (params_cmd->parsed()) {
            const Engine engine(cfg);
            json audit = json::array();
            for (const auto& a : engine.audit()) audit.push_back(audit_json(a));
            print(out, {{"params", to_json(engine.params())}, {"bounds", params_bounds_json()}, {"audit", audit}});
        } else if (eval->parsed()) {
            evalkit::EvalOptions o;
            o.seed = seed;
            o.noise = noise;
            o.sizes = sizes;
            o.world.cases_per_disease = cases_per_disease;
            o.params = cfg.params;
            o.diagnosis_threshold = cfg.diagnosis_threshold;
            o.epsilon = cfg.epsilon;
            o.fusion.link_threshold = cfg.link_threshold;
            o.fusion.smoothing = cfg.mrf_smoothing;
            o.docs_per_batch = cfg.docs_per_batch;
            if (!raters_path.empty()) o.raters = evalkit::parse_rater_table(extraction::read_file(raters_path));
            if (!eval_feedback_path.empty()) o.feedback = parse_feedback(extraction::read_file(eval_feedback_path));
            out << evalkit::evaluate(o).to_text();
        } else if (export_cmd->parsed()) {
            const Engine engine(cfg);
            graph::atomic_write(out_path, engine.snapshot());
            print(out, {{"out", out_path}, {"stats", stats_json(engine.stats())}});
        } else if (serve->parsed()) {
            Engine engine(cfg);
            HttpServer server(engine, host, port);
            const int bound = server.bind();
            g_server.store(&server);
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            out << json{{"listening", host + ":" + std::to_string(bound)}}.dump() << std::endl;
            server.run();
            g_server.store(nullptr);
            graph::atomic_write(cfg.data_dir / kGraphFile, engine.snapshot());
        }
        return 0;
    } catch (const Error& e) {
        err << to_json(e).dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << json{{"error", {{"code", "Internal"}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    }
}

}  // namespace dkg::gateway
