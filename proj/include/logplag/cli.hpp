#pragma once
// Command-line frontend: ingest, detect, forge, evaluate. run_cli() is the
// whole program minus main(), so tests can drive it in process.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "logplag/copydetect.hpp"
#include "logplag/core.hpp"
#include "logplag/evalharness.hpp"
#include "logplag/ingest.hpp"
#include "logplag/outlierdetect.hpp"
#include "logplag/stats.hpp"
#include "logplag/synth.hpp"

namespace logplag::cli {

struct RunConfig {
    std::string subcommand;
    std::vector<std::string> inputs;
    CopyParams copy;
    std::size_t top_k = 5;
    double filter_short = 0.0;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
    unsigned jobs = 0;

    // detect
    bool leave_one_out = false;
    // forge
    std::string log_path, from_manifest, log_id;
    std::optional<double> remove_types, perturb;
    std::optional<std::string> scratch;
    std::size_t variants = 1;
    std::size_t honest = 0;
    std::size_t honest_types = 150;
};

namespace detail {

inline std::uint64_t resolve_seed(RunConfig& cfg, std::ostream& out) {
    if (!cfg.seed) {
        std::random_device rd;
        cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    out << "seed: " << *cfg.seed << "\n";
    return *cfg.seed;
}

inline void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
}

inline std::string safe_file_stem(const std::string& id) {
    std::string s = id;
    for (auto& ch : s)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_' || ch == '-' || ch == '#'))
            ch = '_';
    return s;
}

inline Corpus load_filtered(const RunConfig& cfg, std::ostream& out) {
    if (cfg.inputs.empty()) throw Error("no manifest given");
    auto corpus = load_corpus(read_manifest(cfg.inputs.front()), {false, cfg.jobs, nullptr});
    if (cfg.filter_short > 0.0) {
        auto res = filter_short(corpus, cfg.filter_short);
        for (const auto& id : res.removed) out << "removed: " << id << " (total " << corpus.at(id).total() << ")\n";
        corpus = std::move(res.corpus);
    }
    return corpus;
}

/// Writes histograms as JSONL logs plus a manifest listing them.
inline void write_logs(const std::vector<CommandHistogram>& hs, const std::filesystem::path& dir,
                       const std::string& manifest_name, std::ostream& out) {
    ensure_dir(dir);
    CorpusManifest m;
    for (const auto& h : hs) {
        const auto file = safe_file_stem(h.log_id()) + ".jsonl";
        write_text_file(dir / file, to_jsonl(histogram_to_log(h)));
        m.entries.push_back({h.log_id(), file, "jsonl"});
    }
    write_text_file(dir / manifest_name, manifest_to_json(m));
    out << "wrote " << hs.size() << " log(s) and " << (dir / manifest_name).string() << "\n";
}

inline void add_common(CLI::App* app, RunConfig& cfg, bool copy_flags) {
    app->add_option("--out", cfg.out, "Output directory");
    app->add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--jobs", cfg.jobs, "Worker threads (0 = all cores)");
    app->add_option("--seed", cfg.seed, "Run seed (generated and printed when absent)");
    app->add_option("--filter-short", cfg.filter_short, "Drop logs shorter than this fraction of the median total")
        ->check(CLI::Range(0.0, 1.0));
    if (copy_flags) {
        app->add_option("--subsets", cfg.copy.n_sam, "Sampled subsets per pair (n_sam)")->check(CLI::PositiveNumber);
        app->add_option("--subset-size", cfg.copy.s_sam, "Subset size (s_sam, even)")
            ->check(CLI::PositiveNumber);
        app->add_option("--top-k", cfg.top_k, "Entries printed per ranking")->check(CLI::PositiveNumber);
    }
}

// ------------------------------------------------------------ subcommands

inline int cmd_ingest(RunConfig& cfg, std::ostream& out) {
    const auto corpus = load_filtered(cfg, out);
    const auto universe = corpus.universe();
    out << "logs: " << corpus.size() << "\n";
    out << "command types: " << universe.size() << "\n";
    out << "log_id,total,types\n";
    for (const auto& h : corpus) out << h.log_id() << "," << h.total() << "," << h.num_types() << "\n";
    if (!cfg.out.empty()) {
        ensure_dir(cfg.out);
        write_text_file(cfg.out / "corpus.json", corpus_to_json(corpus));
        if (corpus.size() >= 2) {
            const auto tc = transform_corpus(corpus);
            write_text_file(cfg.out / "transformed.csv", transformed_csv(tc));
            write_text_file(cfg.out / "stats.csv", stats_csv(command_stats(tc, corpus)));
        }
        out << "wrote " << cfg.out.string() << "\n";
    }
    return 0;
}

inline int cmd_detect(RunConfig& cfg, std::ostream& out) {
    cfg.copy.seed = resolve_seed(cfg, out);
    cfg.copy.validate();
    const auto corpus = load_filtered(cfg, out);
    if (corpus.size() < 2) throw Error("detection needs at least two logs");

    const auto pairs = rank_pairs(corpus, cfg.copy, cfg.jobs);
    const auto tc = transform_corpus(corpus);
    const auto stats = command_stats(tc, corpus);
    const auto outliers = rank_outliers(corpus, tc, stats, {cfg.leave_one_out, cfg.jobs});

    out << "most similar pairs (n_sam=" << cfg.copy.n_sam << ", s_sam=" << cfg.copy.s_sam << ")\n";
    out << "rank,id_a,id_b,cor,identical\n";
    for (std::size_t i = 0; i < std::min(cfg.top_k, pairs.size()); ++i)
        out << i + 1 << "," << pairs[i].id_a << "," << pairs[i].id_b << ","
            << logplag::detail::format_double(pairs[i].cor) << "," << pairs[i].identical << "\n";
    out << "most outlying logs\n";
    out << "rank,log_id,out\n";
    for (std::size_t i = 0; i < std::min(cfg.top_k, outliers.size()); ++i)
        out << i + 1 << "," << outliers[i].log_id << "," << logplag::detail::format_double(outliers[i].out) << "\n";

    if (!cfg.out.empty()) {
        ensure_dir(cfg.out);
        if (cfg.format == "json") {
            write_text_file(cfg.out / "pairs.json", pair_report_json(pairs));
            write_text_file(cfg.out / "outliers.json", outlier_report_json(outliers));
        } else {
            write_text_file(cfg.out / "pairs.csv", pair_report_csv(pairs));
            write_text_file(cfg.out / "outliers.csv", outlier_report_csv(outliers));
        }
        write_text_file(cfg.out / "contributions.csv", contributions_csv(outliers));
        out << "wrote " << cfg.out.string() << "\n";
    }
    return 0;
}

inline int cmd_forge(RunConfig& cfg, std::ostream& out) {
    const auto seed = resolve_seed(cfg, out);
    if (cfg.out.empty()) throw Error("forge needs --out");
    Rng rng(logplag::detail::derive_seed(seed, "forge"));

    if (cfg.honest > 0) {
        HonestCorpusParams p;
        p.n_logs = cfg.honest;
        p.n_command_types = cfg.honest_types;
        p.seed = seed;
        const auto corpus = gen_honest_corpus(p);
        write_logs(corpus.histograms(), cfg.out, "manifest.json", out);
        return 0;
    }

    const int modes = cfg.remove_types.has_value() + cfg.perturb.has_value() + cfg.scratch.has_value();
    if (modes != 1) throw CLI::ValidationError("choose exactly one of --remove-types, --perturb, --scratch, --honest");

    if (cfg.scratch) {
        const auto strategy = parse_strategy(*cfg.scratch);
        if (cfg.from_manifest.empty()) throw Error("--scratch needs --from <manifest> for corpus means");
        const auto corpus = load_corpus(read_manifest(cfg.from_manifest), {false, cfg.jobs, nullptr});
        const auto profile = profile_corpus(corpus);
        std::vector<CommandHistogram> hs;
        for (std::size_t i = 0; i < cfg.variants; ++i)
            hs.push_back(gen_scratch_log(strategy, profile, rng,
                                         "scratch-" + std::string(strategy_name(strategy)) + "-" + std::to_string(i)));
        write_logs(hs, cfg.out, "forged.json", out);
        return 0;
    }

    // Source log: a file, or a log of a manifest.
    CommandHistogram source;
    if (!cfg.log_path.empty()) {
        const std::filesystem::path p = cfg.log_path;
        const auto format = format_from_extension(p);
        const auto parser = parser_registry().find(format);
        if (parser == parser_registry().end()) throw Error("cannot tell the format of '" + p.string() + "'");
        source = histogram(parser->second(logplag::detail::read_file(p), p.stem().string()));
    } else if (!cfg.from_manifest.empty()) {
        if (cfg.log_id.empty()) throw Error("--from needs --id <log id>");
        source = load_corpus(read_manifest(cfg.from_manifest), {false, cfg.jobs, nullptr}).at(cfg.log_id);
    } else {
        throw Error("forge needs --log <file> or --from <manifest> --id <log id>");
    }

    std::vector<CommandHistogram> hs;
    if (cfg.remove_types) {
        for (std::size_t i = 0; i < cfg.variants; ++i)
            hs.push_back(remove_event_types(source, *cfg.remove_types, rng)
                             .with_id(source.log_id() + "#removed" + std::to_string(i)));
    } else {
        hs = gen_variants(source, cfg.variants, *cfg.perturb, rng);
    }
    write_logs(hs, cfg.out, "forged.json", out);
    return 0;
}

inline int cmd_evaluate(RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.inputs.empty()) throw Error("no config given");
    auto ecfg = read_experiment_config(cfg.inputs.front());
    if (!cfg.seed) {
        // The config's own seed counts as explicit.
        const auto j = nlohmann::json::parse(logplag::detail::read_file(cfg.inputs.front()));
        if (j.contains("seed")) cfg.seed = ecfg.seed;
    }
    ecfg.seed = resolve_seed(cfg, out);
    if (cfg.jobs != 0) ecfg.jobs = cfg.jobs;
    const auto start = std::chrono::steady_clock::now();
    const auto table = run_experiments(ecfg);
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << (cfg.format == "json" ? table_to_json(table) : table_to_csv(table));
    err << "evaluation took " << logplag::detail::format_fixed(secs, 2) << " s\n";
    const auto dir = cfg.out.empty() ? std::filesystem::path("results") : cfg.out;
    for (const auto& p : emit_results(table, dir)) out << "wrote " << p.string() << "\n";
    return 0;
}

}  // namespace detail

/// Parses `args` (without the program name) and runs the subcommand.
/// Returns the process exit code: 0 on success, nonzero on any error.
/// Findings never affect it.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    RunConfig cfg;
    CLI::App app{"Creation-log plagiarism candidates from command histograms", "logplag"};
    app.require_subcommand(1);

    auto* ingest = app.add_subcommand("ingest", "Parse a corpus manifest and summarize it");
    ingest->add_option("manifest", cfg.inputs, "Corpus manifest (JSON)")->required()->expected(1);
    detail::add_common(ingest, cfg, false);

    auto* detect = app.add_subcommand("detect", "Rank similar pairs and outlying logs");
    detect->add_option("manifest", cfg.inputs, "Corpus manifest (JSON)")->required()->expected(1);
    detect->add_flag("--leave-one-out", cfg.leave_one_out, "Score each log against statistics without it");
    detail::add_common(detect, cfg, true);

    auto* forge = app.add_subcommand("forge", "Write forged or synthetic logs as JSONL");
    forge->add_option("--log", cfg.log_path, "Source log file (.jsonl or .csv)");
    forge->add_option("--from", cfg.from_manifest, "Source corpus manifest");
    forge->add_option("--id", cfg.log_id, "Source log id within --from");
    forge->add_option("--remove-types", cfg.remove_types, "Remove this fraction of command types")
        ->check(CLI::Range(0.0, 1.0));
    forge->add_option("--perturb", cfg.perturb, "Scale counts by up to this factor")->check(CLI::Range(1.0, 1e9));
    forge->add_option("--scratch", cfg.scratch, "Scratch strategy")
        ->check(CLI::IsMember({"copy-paste", "small-refactor", "medium-refactor", "large-refactor"}));
    forge->add_option("--variants", cfg.variants, "Number of forged logs")->check(CLI::PositiveNumber);
    forge->add_option("--honest", cfg.honest, "Generate a synthetic honest corpus of this many logs")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
    forge->add_option("--types", cfg.honest_types, "Command types of the synthetic corpus")
        ->check(CLI::PositiveNumber);
    detail::add_common(forge, cfg, false);

    auto* evaluate = app.add_subcommand("evaluate", "Run detection-rate experiments from a JSON config");
    evaluate->add_option("config", cfg.inputs, "Experiment config (JSON)")->required()->expected(1);
    detail::add_common(evaluate, cfg, false);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        // help and version exit 0; every usage error maps to 2
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (cfg.copy.s_sam % 2 != 0) throw CLI::ValidationError("--subset-size must be even");
        if (*ingest) return detail::cmd_ingest(cfg, out);
        if (*detect) return detail::cmd_detect(cfg, out);
        if (*forge) return detail::cmd_forge(cfg, out);
        if (*evaluate) return detail::cmd_evaluate(cfg, out, err);
    } catch (const CLI::Error& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace logplag::cli
