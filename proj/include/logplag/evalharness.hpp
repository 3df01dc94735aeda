#pragma once
// Desk-scale reproduction of the detection experiments: forge logs from an
// honest corpus, insert them one at a time, and count how often the forgery
// lands in the detector's top k.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "logplag/copydetect.hpp"
#include "logplag/core.hpp"
#include "logplag/detail/format.hpp"
#include "logplag/detail/random.hpp"
#include "logplag/ingest.hpp"
#include "logplag/outlierdetect.hpp"
#include "logplag/stats.hpp"
#include "logplag/synth.hpp"

namespace logplag {

struct ExperimentConfig {
    // Base corpus: a manifest when set, else the synthetic generator.
    std::optional<std::filesystem::path> manifest;
    HonestCorpusParams synthetic;
    bool synthetic_seed_set = false;  // otherwise the corpus uses `seed`
    double filter_short = 0.0;

    CopyParams copy;
    std::vector<std::size_t> subset_sizes{2, 4, 8, 16};  // copy experiment sweep
    std::size_t top_k = 5;

    bool run_copy = true;
    bool run_outlier = true;
    bool run_scratch = true;

    std::vector<double> removal_fractions{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> change_factors{1, 2, 3, 5, 10};
    std::vector<ScratchStrategy> strategies{kScratchStrategies.begin(), kScratchStrategies.end()};
    std::size_t variants_per_log = 10;
    // Outlier trials are costlier (every trial refits the transform), so
    // they may use fewer forgeries per log.
    std::size_t outlier_variants_per_log = 2;
    std::size_t scratch_base_logs = 3;
    std::size_t scratch_variants = 100;
    double scratch_change_factor = 3.0;
    ScratchParams scratch;

    std::uint64_t seed = 0;
    unsigned jobs = 1;

    void validate() const {
        copy.validate();
        if (top_k < 1) throw Error("top_k must be at least 1");
        if (run_copy) {
            if (subset_sizes.empty()) throw Error("subset_sizes grid is empty");
            for (auto s : subset_sizes) CopyParams{copy.n_sam, s, 0}.validate();
        }
        if (run_copy || run_outlier) {
            if (removal_fractions.empty() && change_factors.empty())
                throw Error("removal_fractions and change_factors grids are both empty");
            for (double f : removal_fractions)
                if (!(f >= 0.0 && f <= 1.0)) throw Error("removal fractions must lie in [0, 1]");
            for (double k : change_factors)
                if (!(k >= 1.0)) throw Error("change factors must be at least 1");
        }
        if (run_copy && variants_per_log < 1) throw Error("variants_per_log must be at least 1");
        if (run_outlier && outlier_variants_per_log < 1) throw Error("outlier_variants_per_log must be at least 1");
        if (run_scratch) {
            if (strategies.empty()) throw Error("strategies grid is empty");
            if (scratch_base_logs < 1 || scratch_variants < 1) throw Error("scratch experiment needs at least one variant");
            if (!(scratch_change_factor >= 1.0)) throw Error("scratch_change_factor must be at least 1");
            scratch.validate();
        }
        if (!run_copy && !run_outlier && !run_scratch) throw Error("no experiment selected");
    }
};

struct RateRow {
    std::string experiment;
    std::string param_name;
    std::string param_value;
    std::string detector;
    std::size_t detected = 0;
    std::size_t trials = 0;

    double rate() const { return trials == 0 ? 0.0 : static_cast<double>(detected) / static_cast<double>(trials); }
    friend bool operator==(const RateRow&, const RateRow&) = default;
};

struct DetectionRateTable {
    std::vector<RateRow> rows;

    const RateRow* find(std::string_view experiment, std::string_view value, std::string_view detector = {}) const {
        for (const auto& r : rows)
            if (r.experiment == experiment && r.param_value == value && (detector.empty() || r.detector == detector))
                return &r;
        return nullptr;
    }
    void append(const DetectionRateTable& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }
    friend bool operator==(const DetectionRateTable&, const DetectionRateTable&) = default;
};

/// True iff one of `targets` is among the first k entries of `ranking`.
template <class T, class IsTarget>
bool detected_topk(std::span<const T> ranking, IsTarget is_target, std::size_t k) {
    const auto n = std::min(k, ranking.size());
    for (std::size_t i = 0; i < n; ++i)
        if (is_target(ranking[i])) return true;
    return false;
}

inline bool detected_topk(std::span<const std::string> ranking, std::span<const std::string> targets, std::size_t k) {
    return detected_topk(ranking, [&](const std::string& id) {
        return std::find(targets.begin(), targets.end(), id) != targets.end();
    }, k);
}

inline std::string correlation_detector(std::size_t s_sam) { return "correlation/s_sam=" + std::to_string(s_sam); }
inline constexpr std::string_view kOutlierDetector = "outlier";

namespace detail {

enum class Modification { Removal, Frequency };

inline CommandHistogram forge(const CommandHistogram& h, Modification m, double strength, Rng& rng) {
    return m == Modification::Removal ? remove_event_types(h, strength, rng) : perturb_frequencies(h, strength, rng);
}

inline std::string forgery_id(const std::string& base, std::size_t variant) {
    return base + "#m" + std::to_string(variant);
}

struct Grid {
    Modification mod;
    std::string name;  // experiment suffix
    std::string param;
    std::vector<double> values;
};

inline std::vector<Grid> grids(const ExperimentConfig& cfg) {
    std::vector<Grid> out;
    if (!cfg.removal_fractions.empty())
        out.push_back({Modification::Removal, "removal", "fraction", cfg.removal_fractions});
    if (!cfg.change_factors.empty())
        out.push_back({Modification::Frequency, "frequency", "k", cfg.change_factors});
    return out;
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::string_view experiment, std::size_t point, std::size_t trial) {
    return derive_seed(derive_seed(seed, experiment, point), trial);
}

}  // namespace detail

/// Number of pairs in the full ranking of corpus + {forgery} that rank
/// before `target`. `honest` holds the ranked pairs of the honest corpus
/// and `with_forgery` the forgery's pairs with every honest log; together
/// they are exactly the pairs rank_pairs would produce.
inline std::size_t pairs_ranked_before(std::span<const PairScore> honest, std::span<const PairScore> with_forgery,
                                       const PairScore& target) {
    const auto before = [&](const PairScore& p) { return ranks_before(p, target); };
    const auto h = static_cast<std::size_t>(
        std::partition_point(honest.begin(), honest.end(), before) - honest.begin());
    return h + static_cast<std::size_t>(std::count_if(with_forgery.begin(), with_forgery.end(), before));
}

/// Copy-and-modify: for every honest log, modified copies are inserted one
/// at a time; a trial is detected when the (original, forgery) pair ranks
/// in the top k of all pairs.
inline DetectionRateTable run_copy_experiment(const Corpus& honest, const ExperimentConfig& cfg) {
    if (honest.size() < 2) throw Error("copy experiment needs at least two honest logs");
    DetectionRateTable table;
    for (auto s_sam : cfg.subset_sizes) {
        CopyParams params = cfg.copy;
        params.s_sam = s_sam;
        const auto ranked = rank_pairs(honest, params, cfg.jobs);
        for (const auto& grid : detail::grids(cfg)) {
            const auto experiment = "copy-" + grid.name;
            for (std::size_t gi = 0; gi < grid.values.size(); ++gi) {
                const std::size_t trials = honest.size() * cfg.variants_per_log;
                std::vector<char> hit(trials, 0);
                detail::parallel_for(trials, cfg.jobs, [&](std::size_t t) {
                    const auto& original = honest[t / cfg.variants_per_log];
                    const auto v = t % cfg.variants_per_log;
                    // Forgeries depend on the point and trial only, so every
                    // s_sam sees the same forged logs.
                    Rng rng(detail::trial_seed(cfg.seed, experiment, gi, t));
                    const auto forged = detail::forge(original, grid.mod, grid.values[gi], rng)
                                            .with_id(detail::forgery_id(original.log_id(), v));
                    std::vector<PairScore> mine;
                    mine.reserve(honest.size());
                    std::optional<PairScore> target;
                    for (const auto& h : honest) {
                        mine.push_back(pair_correlation(forged, h, params));
                        if (h.log_id() == original.log_id()) target = mine.back();
                    }
                    hit[t] = pairs_ranked_before(ranked, mine, *target) < cfg.top_k;
                });
                table.rows.push_back({experiment, grid.param, detail::format_double(grid.values[gi]),
                                      correlation_detector(s_sam),
                                      static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1)), trials});
            }
        }
    }
    return table;
}

/// Outlier rank of `forged` after inserting it into `honest` and refitting
/// the transform and statistics on the enlarged corpus.
template <class Fitter>
bool outlier_detected(const Corpus& honest, const CommandHistogram& forged, std::size_t top_k, Fitter& fitter) {
    const auto corpus = honest.with(forged);
    const auto tc = transform_corpus(corpus, fitter);
    const auto stats = command_stats(tc, corpus);
    const auto ranking = rank_outliers(corpus, tc, stats);
    return detected_topk(std::span<const OutlierScore>(ranking),
                         [&](const OutlierScore& s) { return s.log_id == forged.log_id(); }, top_k);
}

/// Generation from scratch, approximated by heavily modified honest logs;
/// plus a baseline where an unmodified copy of an honest log is inserted.
inline DetectionRateTable run_outlier_experiment(const Corpus& honest, const ExperimentConfig& cfg) {
    if (honest.size() < 2) throw Error("outlier experiment needs at least two honest logs");
    DetectionRateTable table;
    MemoizedBoxCoxFitter fitter;
    const std::size_t per_log = cfg.outlier_variants_per_log;
    const std::size_t trials = honest.size() * per_log;

    auto run = [&](const std::string& experiment, const std::string& param, const std::string& value, auto make) {
        std::vector<char> hit(trials, 0);
        detail::parallel_for(trials, cfg.jobs, [&](std::size_t t) {
            const auto& original = honest[t / per_log];
            const auto id = detail::forgery_id(original.log_id(), t % per_log);
            hit[t] = outlier_detected(honest, make(original, t).with_id(id), cfg.top_k, fitter);
        });
        table.rows.push_back({experiment, param, value, std::string(kOutlierDetector),
                              static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1)), trials});
    };

    run("outlier-reinsert", "none", "0", [](const CommandHistogram& h, std::size_t) { return h; });
    for (const auto& grid : detail::grids(cfg)) {
        const auto experiment = "outlier-" + grid.name;
        for (std::size_t gi = 0; gi < grid.values.size(); ++gi)
            run(experiment, grid.param, detail::format_double(grid.values[gi]),
                [&](const CommandHistogram& h, std::size_t t) {
                    Rng rng(detail::trial_seed(cfg.seed, experiment, gi, t));
                    return detail::forge(h, grid.mod, grid.values[gi], rng);
                });
    }
    return table;
}

/// Scratch strategies: a few base logs per strategy, each expanded into
/// perturbed variants, every variant tested singly.
inline DetectionRateTable run_scratch_experiment(const Corpus& honest, const ExperimentConfig& cfg) {
    if (honest.size() < 2) throw Error("scratch experiment needs at least two honest logs");
    if (cfg.scratch_base_logs < 1 || cfg.scratch_variants < 1)
        throw Error("scratch experiment needs at least one variant");
    const auto profile = profile_corpus(honest);
    MemoizedBoxCoxFitter fitter;
    DetectionRateTable table;
    for (auto strategy : cfg.strategies) {
        const auto name = std::string(strategy_name(strategy));
        std::vector<CommandHistogram> forged;
        for (std::size_t b = 0; b < cfg.scratch_base_logs; ++b) {
            Rng rng(detail::trial_seed(cfg.seed, "scratch-" + name, b, 0));
            const auto base = gen_scratch_log(strategy, profile, rng, "scratch-" + name + "-" + std::to_string(b),
                                              cfg.scratch);
            auto variants = gen_variants(base, cfg.scratch_variants, cfg.scratch_change_factor, rng);
            // A variant can lose every command when scaled down.
            for (auto& v : variants)
                if (!v.empty()) forged.push_back(std::move(v));
        }
        std::vector<char> hit(forged.size(), 0);
        detail::parallel_for(forged.size(), cfg.jobs,
                             [&](std::size_t t) { hit[t] = outlier_detected(honest, forged[t], cfg.top_k, fitter); });
        table.rows.push_back({"scratch", "strategy", name, std::string(kOutlierDetector),
                              static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1)), forged.size()});
    }
    return table;
}

/// Builds the honest corpus named by the config.
inline Corpus load_base_corpus(const ExperimentConfig& cfg) {
    Corpus corpus;
    if (cfg.manifest) {
        corpus = load_corpus(read_manifest(*cfg.manifest), {false, cfg.jobs, nullptr});
    } else {
        auto params = cfg.synthetic;
        if (!cfg.synthetic_seed_set) params.seed = cfg.seed;
        corpus = gen_honest_corpus(params);
    }
    if (cfg.filter_short > 0.0) corpus = filter_short(corpus, cfg.filter_short).corpus;
    return corpus;
}

inline DetectionRateTable run_experiments(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto honest = load_base_corpus(cfg);
    DetectionRateTable table;
    if (cfg.run_copy) table.append(run_copy_experiment(honest, cfg));
    if (cfg.run_outlier) table.append(run_outlier_experiment(honest, cfg));
    if (cfg.run_scratch) table.append(run_scratch_experiment(honest, cfg));
    return table;
}

// ------------------------------------------------------------------ output

inline std::string table_to_csv(const DetectionRateTable& t) {
    std::string out = "experiment,param_name,param_value,detector,detected,trials,rate\n";
    for (const auto& r : t.rows)
        out += detail::csv_field(r.experiment) + ',' + detail::csv_field(r.param_name) + ',' +
               detail::csv_field(r.param_value) + ',' + detail::csv_field(r.detector) + ',' +
               std::to_string(r.detected) + ',' + std::to_string(r.trials) + ',' + detail::format_double(r.rate()) +
               '\n';
    return out;
}

inline std::string table_to_json(const DetectionRateTable& t) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : t.rows)
        j.push_back({{"experiment", r.experiment},
                     {"param_name", r.param_name},
                     {"param_value", r.param_value},
                     {"detector", r.detector},
                     {"detected", r.detected},
                     {"trials", r.trials},
                     {"rate", r.rate()}});
    return j.dump(2) + "\n";
}

inline DetectionRateTable table_from_json(std::string_view text) {
    DetectionRateTable t;
    for (const auto& e : nlohmann::json::parse(text)) {
        RateRow r{e.at("experiment").get<std::string>(), e.at("param_name").get<std::string>(),
                  e.at("param_value").get<std::string>(), e.at("detector").get<std::string>(),
                  e.at("detected").get<std::size_t>(), e.at("trials").get<std::size_t>()};
        if (r.detected > r.trials) throw Error("detected exceeds trials in row '" + r.experiment + "'");
        t.rows.push_back(std::move(r));
    }
    return t;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out.flush()) throw Error("cannot write '" + path.string() + "'");
}

/// Writes results.csv and results.json into `dir`; returns both paths.
inline std::vector<std::filesystem::path> emit_results(const DetectionRateTable& t, const std::filesystem::path& dir) {
    if (t.rows.empty()) throw Error("refusing to write an empty result table");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
    const auto csv = dir / "results.csv", json = dir / "results.json";
    write_text_file(csv, table_to_csv(t));
    write_text_file(json, table_to_json(t));
    return {csv, json};
}

// ------------------------------------------------------------------ config

namespace detail {

class ConfigReader {
public:
    ConfigReader(const nlohmann::json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw Error(where_ + ": expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }
    std::string path(const char* key) const { return where_ + "." + key; }
    const nlohmann::json& at(const char* key) const { return j_.at(key); }

    void check_keys(std::initializer_list<std::string_view> known) const {
        for (const auto& [k, v] : j_.items())
            if (std::find(known.begin(), known.end(), k) == known.end())
                throw Error(where_ + "." + k + ": unknown field");
    }

    void read(const char* key, std::uint64_t& out, std::uint64_t min = 0) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number_unsigned() || v.get<std::uint64_t>() < min)
            throw Error(path(key) + ": expected an integer >= " + std::to_string(min));
        out = v.get<std::uint64_t>();
    }
    void read(const char* key, unsigned& out) const {
        std::uint64_t v = out;
        read(key, v);
        out = static_cast<unsigned>(v);
    }
    void read(const char* key, double& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number()) throw Error(path(key) + ": expected a number");
        out = v.get<double>();
    }
    void read(const char* key, bool& out) const {
        if (!has(key)) return;
        if (!j_.at(key).is_boolean()) throw Error(path(key) + ": expected a boolean");
        out = j_.at(key).get<bool>();
    }
    template <class T>
    void read_list(const char* key, std::vector<T>& out) const {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_array()) throw Error(path(key) + ": expected an array");
        if (v.empty()) throw Error(path(key) + ": grid is empty");
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto& e = v[i];
            const auto where = path(key) + "[" + std::to_string(i) + "]";
            if constexpr (std::is_same_v<T, double>) {
                if (!e.is_number()) throw Error(where + ": expected a number");
            } else {
                if (!e.is_number_unsigned()) throw Error(where + ": expected a non-negative integer");
            }
            out.push_back(e.get<T>());
        }
    }

private:
    const nlohmann::json& j_;
    std::string where_;
};

}  // namespace detail

/// JSON experiment configuration. Every field is optional; defaults are
/// those of ExperimentConfig. Errors name the offending field path.
inline ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("config: malformed JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    const detail::ConfigReader r(j, "config");
    r.check_keys({"corpus", "detector", "subset_sizes", "top_k", "experiments", "removal_fractions",
                  "change_factors", "strategies", "variants_per_log", "outlier_variants_per_log",
                  "scratch_base_logs", "scratch_variants", "scratch_change_factor", "scratch", "seed", "jobs"});

    if (r.has("corpus")) {
        const detail::ConfigReader c(r.at("corpus"), "config.corpus");
        c.check_keys({"manifest", "synthetic", "filter_short"});
        if (c.has("manifest")) {
            if (!c.at("manifest").is_string()) throw Error("config.corpus.manifest: expected a string");
            std::filesystem::path p = c.at("manifest").get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            cfg.manifest = p;
        }
        c.read("filter_short", cfg.filter_short);
        if (c.has("synthetic")) {
            const detail::ConfigReader s(c.at("synthetic"), "config.corpus.synthetic");
            s.check_keys({"n_logs", "n_command_types", "universal_fraction", "rare_fraction", "rare_max_logs",
                          "iqr_ratio_min", "iqr_ratio_max", "activity_sd", "seed"});
            auto& p = cfg.synthetic;
            s.read("n_logs", p.n_logs, 2);
            s.read("n_command_types", p.n_command_types, 1);
            s.read("universal_fraction", p.universal_fraction);
            s.read("rare_fraction", p.rare_fraction);
            s.read("rare_max_logs", p.rare_max_logs, 1);
            s.read("iqr_ratio_min", p.iqr_ratio_min);
            s.read("iqr_ratio_max", p.iqr_ratio_max);
            s.read("activity_sd", p.activity_sd);
            s.read("seed", p.seed);
            cfg.synthetic_seed_set = s.has("seed");
            try {
                p.validate();
            } catch (const Error& e) {
                throw Error(std::string("config.corpus.synthetic: ") + e.what());
            }
        }
    }
    if (r.has("detector")) {
        const detail::ConfigReader d(r.at("detector"), "config.detector");
        d.check_keys({"n_sam", "s_sam"});
        d.read("n_sam", cfg.copy.n_sam, 1);
        d.read("s_sam", cfg.copy.s_sam, 2);
        if (cfg.copy.s_sam % 2 != 0) throw Error("config.detector.s_sam: expected an even number");
    }
    r.read_list("subset_sizes", cfg.subset_sizes);
    for (std::size_t i = 0; i < cfg.subset_sizes.size(); ++i)
        if (cfg.subset_sizes[i] < 2 || cfg.subset_sizes[i] % 2 != 0)
            throw Error("config.subset_sizes[" + std::to_string(i) + "]: expected an even number >= 2");
    r.read("top_k", cfg.top_k, 1);
    if (r.has("experiments")) {
        const auto& e = r.at("experiments");
        if (!e.is_array() || e.empty()) throw Error("config.experiments: expected a non-empty array");
        cfg.run_copy = cfg.run_outlier = cfg.run_scratch = false;
        for (std::size_t i = 0; i < e.size(); ++i) {
            const auto name = e[i].is_string() ? e[i].get<std::string>() : std::string();
            if (name == "copy") cfg.run_copy = true;
            else if (name == "outlier") cfg.run_outlier = true;
            else if (name == "scratch") cfg.run_scratch = true;
            else throw Error("config.experiments[" + std::to_string(i) + "]: expected copy, outlier or scratch");
        }
    }
    r.read_list("removal_fractions", cfg.removal_fractions);
    for (std::size_t i = 0; i < cfg.removal_fractions.size(); ++i)
        if (!(cfg.removal_fractions[i] >= 0.0 && cfg.removal_fractions[i] <= 1.0))
            throw Error("config.removal_fractions[" + std::to_string(i) + "]: expected a value in [0, 1]");
    r.read_list("change_factors", cfg.change_factors);
    for (std::size_t i = 0; i < cfg.change_factors.size(); ++i)
        if (!(cfg.change_factors[i] >= 1.0))
            throw Error("config.change_factors[" + std::to_string(i) + "]: expected a value >= 1");
    if (r.has("strategies")) {
        const auto& s = r.at("strategies");
        if (!s.is_array()) throw Error("config.strategies: expected an array");
        if (s.empty()) throw Error("config.strategies: grid is empty");
        cfg.strategies.clear();
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto where = "config.strategies[" + std::to_string(i) + "]";
            if (!s[i].is_string()) throw Error(where + ": expected a string");
            try {
                cfg.strategies.push_back(parse_strategy(s[i].get<std::string>()));
            } catch (const Error& e) {
                throw Error(where + ": " + e.what());
            }
        }
    }
    r.read("variants_per_log", cfg.variants_per_log, 1);
    r.read("outlier_variants_per_log", cfg.outlier_variants_per_log, 1);
    r.read("scratch_base_logs", cfg.scratch_base_logs, 1);
    r.read("scratch_variants", cfg.scratch_variants, 1);
    r.read("scratch_change_factor", cfg.scratch_change_factor);
    if (r.has("scratch")) {
        const detail::ConfigReader s(r.at("scratch"), "config.scratch");
        s.check_keys({"small_fraction", "medium_fraction", "large_fraction", "large_depletion", "common_prevalence"});
        s.read("small_fraction", cfg.scratch.small_fraction);
        s.read("medium_fraction", cfg.scratch.medium_fraction);
        s.read("large_fraction", cfg.scratch.large_fraction);
        s.read("large_depletion", cfg.scratch.large_depletion);
        s.read("common_prevalence", cfg.scratch.common_prevalence);
    }
    r.read("seed", cfg.seed);
    r.read("jobs", cfg.jobs);
    try {
        cfg.validate();
    } catch (const Error& e) {
        throw Error(std::string("config: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
    return parse_experiment_config(detail::read_file(path), path.parent_path());
}

}  // namespace logplag
