#pragma once
// Synthetic data: honest corpora with a controlled prevalence profile and
// count spread, plus the forgeries the evaluation feeds to the detectors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "logplag/core.hpp"
#include "logplag/detail/format.hpp"
#include "logplag/detail/random.hpp"

namespace logplag {

// ---------------------------------------------------------------- commands

enum class CommandCategory { Edit, Navigate, Run, Debug, Undo, Save, Clipboard, Other };

inline std::string_view category_name(CommandCategory c) {
    switch (c) {
        case CommandCategory::Edit: return "edit";
        case CommandCategory::Navigate: return "navigate";
        case CommandCategory::Run: return "run";
        case CommandCategory::Debug: return "debug";
        case CommandCategory::Undo: return "undo";
        case CommandCategory::Save: return "save";
        case CommandCategory::Clipboard: return "clipboard";
        case CommandCategory::Other: return "other";
    }
    return "other";
}

/// Keyword classification of an IDE command name. First match wins, so
/// "DebugStep" is debug and "OpenDeclaration" is navigation.
inline CommandCategory command_category(std::string_view name) {
    auto has = [&](std::initializer_list<std::string_view> keys) {
        return std::any_of(keys.begin(), keys.end(), [&](std::string_view k) { return name.find(k) != name.npos; });
    };
    if (has({"Paste", "Copy", "Cut"})) return CommandCategory::Clipboard;
    if (has({"Undo", "Redo"})) return CommandCategory::Undo;
    if (has({"Save"})) return CommandCategory::Save;
    if (has({"Debug", "Breakpoint", "Step", "Inspect", "Terminate", "Resume", "Watch"})) return CommandCategory::Debug;
    if (has({"Run", "Build", "Launch", "Test", "Compile"})) return CommandCategory::Run;
    if (has({"Insert", "Delete", "Replace", "Backspace", "Indent", "Comment", "Complete", "Format", "Rename", "Fix",
             "Edit", "Refactor"}))
        return CommandCategory::Edit;
    if (has({"Move", "Scroll", "Select", "Open", "Find", "Goto", "Switch", "Navigate", "Outline", "Next", "Close"}))
        return CommandCategory::Navigate;
    return CommandCategory::Other;
}

// ------------------------------------------------------------ honest corpus

struct HonestCorpusParams {
    std::size_t n_logs = 60;
    std::size_t n_command_types = 150;
    double universal_fraction = 0.1;  // commands used in every log
    double rare_fraction = 0.5;       // commands used in at most rare_max_logs logs
    std::size_t rare_max_logs = 3;
    // Q75/Q25 of a common command's counts across logs is drawn
    // log-uniformly from this range.
    double iqr_ratio_min = 2.0;
    double iqr_ratio_max = 15.0;
    // Per-log activity level (log scale sd), shared by all commands of a log.
    double activity_sd = 0.58;
    // Median count ranges (min, max) per prevalence class, log-uniform.
    std::array<double, 2> universal_counts{20.0, 1500.0};
    std::array<double, 2> mid_counts{2.0, 60.0};
    std::array<double, 2> rare_counts{1.0, 8.0};
    // Tolerance of the prevalence postcondition.
    double prevalence_tolerance = 0.05;
    std::uint64_t seed = 0;

    void validate() const {
        auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (n_logs < 2) throw Error("honest corpus needs n_logs >= 2");
        if (n_command_types < 1) throw Error("honest corpus needs at least one command type");
        if (!in01(universal_fraction) || !in01(rare_fraction))
            throw Error("prevalence fractions must lie in [0, 1]");
        if (universal_fraction + rare_fraction > 1.0) throw Error("universal and rare fractions sum to more than 1");
        if (rare_max_logs < 1) throw Error("rare_max_logs must be at least 1");
        if (!(iqr_ratio_min >= 1.0) || !(iqr_ratio_max >= iqr_ratio_min))
            throw Error("IQR ratio range must satisfy 1 <= min <= max");
        if (!(activity_sd >= 0.0)) throw Error("activity_sd must be non-negative");
        for (const auto* r : {&universal_counts, &mid_counts, &rare_counts})
            if (!((*r)[0] > 0.0) || !((*r)[1] >= (*r)[0])) throw Error("count ranges must satisfy 0 < min <= max");
    }
};

/// Observed calibration statistics of a corpus.
struct CorpusCalibration {
    double universal_fraction = 0.0;     // commands present in every log
    double rare_fraction = 0.0;          // commands present in <= rare_max_logs logs
    double median_iqr_ratio = 0.0;       // over the most used commands
    std::vector<double> iqr_ratios;      // one per examined command
};

namespace detail {

/// Linear-interpolation quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& v, double q) {
    if (v.empty()) return 0.0;
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= v.size()) return v.back();
    return v[i] + (pos - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

inline double log_uniform(std::array<double, 2> range, Rng& rng) {
    std::uniform_real_distribution<double> u(std::log(range[0]), std::log(range[1]));
    return range[0] == range[1] ? std::log(range[0]) : u(rng);
}

inline std::string zero_pad(std::size_t i, std::size_t width) {
    auto s = std::to_string(i);
    if (s.size() < width) s.insert(0, width - s.size(), '0');
    return s;
}

// Commands every IDE user touches.
inline constexpr std::array<std::string_view, 24> kCoreCommands{
    "InsertString", "MoveCaret",   "DeleteText", "SelectText",     "ScrollView",       "SaveFile",
    "OpenFile",     "RunProgram",  "Paste",      "Undo",           "Copy",             "FindText",
    "DebugStep",    "ReplaceText", "Build",      "ToggleBreakpoint", "SwitchEditor",   "Backspace",
    "Redo",         "GotoLine",    "Cut",        "AutoComplete",   "ToggleComment",    "CloseEditor"};

inline constexpr std::array<std::string_view, 6> kExtraStems{"EditAction", "NavigateTo", "RunConfig",
                                                             "DebugView",  "ViewPart",   "RefactorAction"};

inline std::vector<CommandType> command_names(std::size_t n) {
    std::vector<CommandType> out;
    for (std::size_t i = 0; i < n && i < kCoreCommands.size(); ++i) out.emplace_back(kCoreCommands[i]);
    for (std::size_t i = out.size(); i < n; ++i)
        out.push_back(std::string(kExtraStems[i % kExtraStems.size()]) + zero_pad(i, 3));
    return out;
}

}  // namespace detail

/// Prevalence and spread statistics. The spread is measured on the
/// `top` commands with the largest total count.
inline CorpusCalibration calibrate(const Corpus& corpus, std::size_t rare_max_logs = 3, std::size_t top = 15) {
    CorpusCalibration cal;
    const auto universe = corpus.universe();
    if (universe.empty()) return cal;
    std::size_t universal = 0, rare = 0;
    std::vector<std::pair<Count, CommandType>> totals;
    for (const auto& c : universe) {
        std::size_t present = 0;
        Count total = 0;
        for (const auto& h : corpus) {
            const auto n = h.count(c);
            present += n > 0;
            total += n;
        }
        universal += present == corpus.size();
        rare += present <= rare_max_logs;
        totals.emplace_back(total, c);
    }
    cal.universal_fraction = static_cast<double>(universal) / static_cast<double>(universe.size());
    cal.rare_fraction = static_cast<double>(rare) / static_cast<double>(universe.size());

    std::sort(totals.begin(), totals.end(), [](const auto& x, const auto& y) {
        return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    for (std::size_t i = 0; i < std::min(top, totals.size()); ++i) {
        std::vector<double> col;
        for (const auto& h : corpus) col.push_back(static_cast<double>(h.count(totals[i].second)));
        std::sort(col.begin(), col.end());
        const double q1 = detail::quantile_sorted(col, 0.25), q3 = detail::quantile_sorted(col, 0.75);
        if (q1 > 0.0) cal.iqr_ratios.push_back(q3 / q1);
    }
    auto sorted = cal.iqr_ratios;
    std::sort(sorted.begin(), sorted.end());
    cal.median_iqr_ratio = detail::quantile_sorted(sorted, 0.5);
    return cal;
}

/// Lognormal-style counts: log N(L,c) = mu_c + a_L + sigma_c z, where a_L is
/// the log's activity level. Each command is present in a set of logs whose
/// size follows its prevalence class (universal, mid or rare).
inline Corpus gen_honest_corpus(const HonestCorpusParams& params) {
    params.validate();
    Rng rng(detail::derive_seed(params.seed, "honest-corpus"));
    const std::size_t n = params.n_logs, t = params.n_command_types;
    const auto n_universal = static_cast<std::size_t>(std::llround(params.universal_fraction * static_cast<double>(t)));
    const auto n_rare = std::min(t - n_universal,
                                 static_cast<std::size_t>(std::llround(params.rare_fraction * static_cast<double>(t))));

    std::normal_distribution<double> std_normal(0.0, 1.0);
    std::vector<double> activity(n);
    for (auto& a : activity) a = params.activity_sd * std_normal(rng);

    const std::size_t rare_hi = std::min(params.rare_max_logs, n);
    const std::size_t mid_lo = std::min(params.rare_max_logs + 1, n);
    const std::size_t mid_hi = n > mid_lo ? n - 1 : n;

    const auto names = detail::command_names(t);
    std::vector<CommandHistogram::Map> counts(n);
    std::vector<std::uint32_t> order(n);
    for (std::size_t c = 0; c < t; ++c) {
        std::size_t members;
        std::array<double, 2> range;
        if (c < n_universal) {
            members = n;
            range = params.universal_counts;
        } else if (c < t - n_rare) {
            members = std::uniform_int_distribution<std::size_t>(mid_lo, mid_hi)(rng);
            range = params.mid_counts;
        } else {
            members = std::uniform_int_distribution<std::size_t>(1, rare_hi)(rng);
            range = params.rare_counts;
        }
        const double mu = detail::log_uniform(range, rng);
        // Target Q75/Q25 of the counts; the activity term already supplies
        // part of the spread.
        const double ratio = std::exp(detail::log_uniform({params.iqr_ratio_min, params.iqr_ratio_max}, rng));
        const double total_sd = std::log(ratio) / 1.3489795003921634;
        const double sigma =
            std::sqrt(std::max(total_sd * total_sd - params.activity_sd * params.activity_sd, 0.01));

        for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
        detail::choose_front(order, members, rng);
        for (std::size_t k = 0; k < members; ++k) {
            const auto l = order[k];
            const double v = std::exp(mu + activity[l] + sigma * std_normal(rng));
            counts[l][names[c]] = std::max<Count>(1, static_cast<Count>(std::floor(v + 0.5)));
        }
    }

    const auto width = std::max<std::size_t>(3, std::to_string(n - 1).size());
    std::vector<CommandHistogram> hs;
    for (std::size_t l = 0; l < n; ++l) hs.emplace_back("log_" + detail::zero_pad(l, width), std::move(counts[l]));
    Corpus corpus(std::move(hs));

    // Postconditions.
    for (std::size_t i = 0; i < corpus.size(); ++i)
        for (std::size_t j = i + 1; j < corpus.size(); ++j)
            if (corpus[i].counts() == corpus[j].counts())
                throw Error("honest corpus generator produced two identical logs; try another seed");
    if (n > params.rare_max_logs + 1) {
        const auto cal = calibrate(corpus, params.rare_max_logs);
        const double tol = params.prevalence_tolerance;
        // Fractions are of the observed universe, which equals t because
        // every command lands in at least one log.
        if (std::abs(cal.universal_fraction - params.universal_fraction) > tol)
            throw Error("honest corpus misses the universal-command fraction: " +
                        detail::format_double(cal.universal_fraction));
        if (std::abs(cal.rare_fraction - params.rare_fraction) > tol)
            throw Error("honest corpus misses the rare-command fraction: " + detail::format_double(cal.rare_fraction));
        if (!cal.iqr_ratios.empty() &&
            (cal.median_iqr_ratio < params.iqr_ratio_min || cal.median_iqr_ratio > params.iqr_ratio_max))
            throw Error("honest corpus count spread is off target: median IQR ratio " +
                        detail::format_double(cal.median_iqr_ratio));
    }
    return corpus;
}

// ------------------------------------------------------------- forgeries

/// Drops floor(fraction * |T(L)|) command types chosen uniformly.
inline CommandHistogram remove_event_types(const CommandHistogram& hist, double fraction, Rng& rng) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw Error("removal fraction must lie in [0, 1]");
    auto types = hist.types();
    const auto k = std::min(types.size(),
                            static_cast<std::size_t>(std::floor(fraction * static_cast<double>(types.size()) + 1e-9)));
    std::vector<std::uint32_t> idx(types.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
    detail::choose_front(idx, k, rng);
    auto counts = hist.counts();
    for (std::size_t i = 0; i < k; ++i) counts.erase(types[idx[i]]);
    return CommandHistogram(hist.log_id(), std::move(counts));
}

/// Scales every count by r ~ U[1, k], up or down on a fair coin, rounding
/// half up. Counts that round to zero disappear.
inline CommandHistogram perturb_frequencies(const CommandHistogram& hist, double k, Rng& rng) {
    if (!(k >= 1.0) || !std::isfinite(k)) throw Error("change factor k must be at least 1");
    std::uniform_real_distribution<double> factor(1.0, k);
    std::bernoulli_distribution up(0.5);
    CommandHistogram::Map counts;
    for (const auto& [c, n] : hist.counts()) {
        const double r = k == 1.0 ? 1.0 : factor(rng);
        const double v = up(rng) ? static_cast<double>(n) * r : static_cast<double>(n) / r;
        counts.emplace_hint(counts.end(), c, static_cast<Count>(std::floor(v + 0.5)));
    }
    return CommandHistogram(hist.log_id(), std::move(counts));
}

/// n independent perturbations of `hist`, ids suffixed "#v000", "#v001", ...
inline std::vector<CommandHistogram> gen_variants(const CommandHistogram& hist, std::size_t n, double k, Rng& rng) {
    if (n < 1) throw Error("at least one variant is required");
    if (!(k >= 1.0)) throw Error("change factor k must be at least 1");
    const auto width = std::max<std::size_t>(3, std::to_string(n - 1).size());
    std::vector<CommandHistogram> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(perturb_frequencies(hist, k, rng).with_id(hist.log_id() + "#v" + detail::zero_pad(i, width)));
    return out;
}

// ------------------------------------------------------ scratch strategies

/// Raw per-command means (absent = 0) and prevalence of a corpus.
struct CorpusProfile {
    struct Entry {
        double mean = 0.0;
        double prevalence = 0.0;
        CommandCategory category = CommandCategory::Other;
    };
    std::map<CommandType, Entry> commands;
    double average_total = 0.0;
};

inline CorpusProfile profile_corpus(const Corpus& corpus) {
    if (corpus.empty()) throw Error("cannot profile an empty corpus");
    CorpusProfile p;
    const auto n = static_cast<double>(corpus.size());
    for (const auto& h : corpus) {
        p.average_total += static_cast<double>(h.total()) / n;
        for (const auto& [c, k] : h.counts()) {
            auto& e = p.commands[c];
            e.mean += static_cast<double>(k) / n;
            e.prevalence += 1.0 / n;
        }
    }
    for (auto& [c, e] : p.commands) e.category = command_category(c);
    if (!(p.average_total > 0.0)) throw Error("cannot profile a corpus without events");
    return p;
}

enum class ScratchStrategy { CopyPaste, SmallRefactor, MediumRefactor, LargeRefactor };

inline constexpr std::array<ScratchStrategy, 4> kScratchStrategies{
    ScratchStrategy::CopyPaste, ScratchStrategy::SmallRefactor, ScratchStrategy::MediumRefactor,
    ScratchStrategy::LargeRefactor};

inline std::string_view strategy_name(ScratchStrategy s) {
    switch (s) {
        case ScratchStrategy::CopyPaste: return "copy-paste";
        case ScratchStrategy::SmallRefactor: return "small-refactor";
        case ScratchStrategy::MediumRefactor: return "medium-refactor";
        case ScratchStrategy::LargeRefactor: return "large-refactor";
    }
    return "";
}

inline ScratchStrategy parse_strategy(std::string_view name) {
    for (auto s : kScratchStrategies)
        if (strategy_name(s) == name) return s;
    throw Error("unknown scratch strategy '" + std::string(name) +
                "' (expected copy-paste, small-refactor, medium-refactor or large-refactor)");
}

struct ScratchParams {
    // Share of each common edit/navigation command's mean count that a
    // small refactoring touches.
    double small_fraction = 0.03;
    // Total size relative to the average log.
    double medium_fraction = 0.1;
    double large_fraction = 1.1;
    // Navigation, debug and undo counts of a large refactoring relative to
    // their means.
    double large_depletion = 0.2;
    // Commands used by at least this share of logs count as "common".
    double common_prevalence = 0.5;

    void validate() const {
        for (double v : {small_fraction, medium_fraction, large_fraction, large_depletion, common_prevalence})
            if (!(v > 0.0)) throw Error("scratch size parameters must be positive");
    }
};

namespace detail {

/// Most used command of the profile satisfying `pred`, or `fallback`.
template <class Pred>
CommandType pick_command(const CorpusProfile& p, Pred pred, std::string_view fallback) {
    const CommandType* best = nullptr;
    double best_mean = -1.0;
    for (const auto& [c, e] : p.commands)
        if (pred(c, e) && e.mean > best_mean) {
            best = &c;
            best_mean = e.mean;
        }
    return best ? *best : CommandType(fallback);
}

inline Count round_count(double v) { return std::max<Count>(1, static_cast<Count>(std::floor(v + 0.5))); }

/// Spreads `total` over `commands` proportionally to their means, with
/// +-20% jitter per command.
inline void allocate(const CorpusProfile& p, const std::vector<CommandType>& commands, double total, Rng& rng,
                     CommandHistogram::Map& out) {
    if (commands.empty()) return;
    std::uniform_real_distribution<double> jitter(0.8, 1.2);
    std::vector<double> share;
    double sum = 0.0;
    for (const auto& c : commands) {
        share.push_back(p.commands.at(c).mean * jitter(rng));
        sum += share.back();
    }
    for (std::size_t i = 0; i < commands.size(); ++i) out[commands[i]] += round_count(total * share[i] / sum);
}

}  // namespace detail

/// A log produced without doing the work: the outcome is copied and then
/// touched up to a varying degree.
inline CommandHistogram gen_scratch_log(ScratchStrategy strategy, const CorpusProfile& profile, Rng& rng,
                                        std::string id, const ScratchParams& params = {}) {
    params.validate();
    auto category_is = [](CommandCategory cat) {
        return [cat](const CommandType&, const CorpusProfile::Entry& e) { return e.category == cat; };
    };
    auto named = [](std::string_view key) {
        return [key](const CommandType& c, const CorpusProfile::Entry&) { return c.find(key) != c.npos; };
    };
    const auto paste = detail::pick_command(profile, named("Paste"), "Paste");
    const auto open = detail::pick_command(profile, named("Open"), "OpenFile");
    const auto save = detail::pick_command(profile, category_is(CommandCategory::Save), "SaveFile");
    auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<Count>(lo, hi)(rng); };

    // Copying the finished outcome into the IDE.
    CommandHistogram::Map counts;
    counts[open] += uniform(1, 2);
    counts[paste] += uniform(1, 3);
    counts[save] += uniform(1, 2);
    if (strategy == ScratchStrategy::CopyPaste) {
        if (std::bernoulli_distribution(0.5)(rng)) {
            const auto copy = detail::pick_command(profile, named("Copy"), "Copy");
            if (!counts.contains(copy)) counts[copy] = 1;
        }
        return CommandHistogram(std::move(id), std::move(counts));
    }

    std::vector<std::pair<double, CommandType>> by_mean;
    for (const auto& [c, e] : profile.commands) by_mean.emplace_back(-e.mean, c);
    std::sort(by_mean.begin(), by_mean.end());
    auto top_of = [&](CommandCategory cat, std::size_t k) {
        std::vector<CommandType> out;
        for (const auto& [m, c] : by_mean)
            if (out.size() < k && profile.commands.at(c).category == cat) out.push_back(c);
        return out;
    };

    if (strategy == ScratchStrategy::SmallRefactor) {
        // Renaming a few identifiers: some edits, some caret movement.
        std::uniform_real_distribution<double> jitter(0.5, 1.5);
        for (auto cat : {CommandCategory::Edit, CommandCategory::Navigate})
            for (const auto& c : top_of(cat, 2))
                counts[c] += detail::round_count(profile.commands.at(c).mean * params.small_fraction * jitter(rng));
        return CommandHistogram(std::move(id), std::move(counts));
    }

    auto common = [&](auto pred) {
        std::vector<CommandType> out;
        for (const auto& [c, e] : profile.commands)
            if (e.prevalence >= params.common_prevalence && pred(e.category)) out.push_back(c);
        return out;
    };

    if (strategy == ScratchStrategy::MediumRefactor) {
        // Editing and running only, a tenth of an average log.
        const auto cmds = common([](CommandCategory cat) {
            return cat == CommandCategory::Edit || cat == CommandCategory::Run || cat == CommandCategory::Clipboard ||
                   cat == CommandCategory::Save;
        });
        counts.clear();
        detail::allocate(profile, cmds, profile.average_total * params.medium_fraction, rng, counts);
        return CommandHistogram(std::move(id), std::move(counts));
    }

    // LargeRefactor: about the size of an average log, but with little
    // navigation, debugging or undoing.
    auto depleted = [](CommandCategory cat) {
        return cat == CommandCategory::Navigate || cat == CommandCategory::Debug || cat == CommandCategory::Undo;
    };
    counts.clear();
    const double target = profile.average_total * params.large_fraction;
    std::uniform_real_distribution<double> jitter(0.8, 1.2);
    double used = 0.0;
    for (const auto& c : common(depleted)) {
        const auto k = detail::round_count(profile.commands.at(c).mean * params.large_depletion * jitter(rng));
        counts[c] = k;
        used += static_cast<double>(k);
    }
    const auto rest = common([&](CommandCategory cat) { return !depleted(cat); });
    detail::allocate(profile, rest, std::max(target - used, 1.0), rng, counts);
    Count total = 0;
    for (const auto& [c, n] : counts) total += n;
    if (static_cast<double>(total) < target && !rest.empty())
        counts[rest.front()] += static_cast<Count>(std::ceil(target - static_cast<double>(total)));
    return CommandHistogram(std::move(id), std::move(counts));
}

}  // namespace logplag
