#pragma once
// "Generation from scratch" detection. Each command's transformed count is
// scored by how far it sits in the tail of a normal fitted across the
// corpus (zero inside one standard deviation), and the per-command scores
// are averaged with prevalence-squared weights.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "logplag/core.hpp"
#include "logplag/detail/format.hpp"
#include "logplag/detail/random.hpp"
#include "logplag/stats.hpp"

namespace logplag {

/// Normalizer for the tail probability; one-sided mass beyond one sigma,
/// rounded.
inline constexpr double kTailNormalizer = 0.16;

/// Probability of a value at least as extreme on the same side of the
/// mean: P(X > b) above the mean, P(X <= b) otherwise. Empty when std is 0.
inline std::optional<double> raw_outlier_prob(double b, double mean, double std) {
    if (!(std > 0.0)) return std::nullopt;
    const double z = (b - mean) / std;
    return b > mean ? normal_sf(z) : normal_cdf(z);
}

/// out(c, L): 0 within the closed one-sigma band, else 1 - p_raw / 0.16.
inline double command_outlier_score(double b, double mean, double std) {
    const auto p = raw_outlier_prob(b, mean, std);
    if (!p) return 0.0;
    const double d = b - mean;
    if (d >= -std && d <= std) return 0.0;
    return std::max(0.0, 1.0 - *p / kTailNormalizer);
}

struct OutlierContribution {
    Count n = 0;
    double b = 0.0;
    std::optional<double> p_raw;
    double out = 0.0;
    double weight = 0.0;
};

struct OutlierScore {
    std::string log_id;
    double out = 0.0;
    std::map<CommandType, OutlierContribution> contributions;

    /// sum(w * out_c) / sum(w) recomputed from the stored contributions.
    double recompute() const {
        double num = 0.0, den = 0.0;
        for (const auto& [c, k] : contributions) {
            num += k.weight * k.out;
            den += k.weight;
        }
        return num / den;
    }
};

inline bool ranks_before(const OutlierScore& x, const OutlierScore& y) {
    if (x.out != y.out) return x.out > y.out;
    return x.log_id < y.log_id;
}

/// out(L) over every command of the corpus universe; commands the log does
/// not use enter with N = 0. Commands outside the universe are ignored.
inline OutlierScore log_outlier_score(const CommandHistogram& hist, const TransformedCounts& tc,
                                      const CorpusCommandStats& stats) {
    if (stats.size() != tc.num_commands()) throw Error("statistics do not cover the transformed universe");
    OutlierScore score;
    score.log_id = hist.log_id();
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < tc.num_commands(); ++c) {
        const auto& s = stats[c];
        OutlierContribution k;
        k.n = hist.count(tc.commands()[c]);
        k.b = tc.transform(c, k.n);
        k.p_raw = raw_outlier_prob(k.b, s.mean, s.std);
        k.out = command_outlier_score(k.b, s.mean, s.std);
        k.weight = s.weight;
        num += k.weight * k.out;
        den += k.weight;
        score.contributions.emplace_hint(score.contributions.end(), tc.commands()[c], k);
    }
    if (!(den > 0.0)) throw Error("all command weights are zero; the corpus is degenerate");
    score.out = num / den;
    return score;
}

struct OutlierOptions {
    /// Score each log against statistics computed without it. Lambdas stay
    /// those of the full corpus.
    bool leave_one_out = false;
    unsigned jobs = 1;
};

namespace detail {

inline CorpusCommandStats stats_excluding(const TransformedCounts& tc, const CorpusCommandStats& full,
                                          std::size_t skip) {
    const auto n = static_cast<double>(tc.num_logs() - 1);
    std::vector<CommandStat> out = full.all();
    for (std::size_t c = 0; c < tc.num_commands(); ++c) {
        auto& s = out[c];
        double mean = 0.0;
        std::size_t present = 0;
        for (std::size_t l = 0; l < tc.num_logs(); ++l) {
            if (l == skip) continue;
            mean += tc.b(c, l);
            if (tc.n(c, l) > 0) ++present;
        }
        mean /= n;
        double ss = 0.0;
        for (std::size_t l = 0; l < tc.num_logs(); ++l)
            if (l != skip) ss += (tc.b(c, l) - mean) * (tc.b(c, l) - mean);
        s.mean = mean;
        s.std = std::sqrt(ss / n);
        s.prevalence = static_cast<double>(present) / n;
        s.weight = s.prevalence * s.prevalence;
    }
    return CorpusCommandStats(std::move(out));
}

}  // namespace detail

/// One score per log, highest first, ties by log id.
inline std::vector<OutlierScore> rank_outliers(const Corpus& corpus, const TransformedCounts& tc,
                                               const CorpusCommandStats& stats, const OutlierOptions& opts = {}) {
    if (corpus.size() < 2) throw Error("outlier ranking needs at least two logs");
    if (opts.leave_one_out && corpus.size() < 3) throw Error("leave-one-out scoring needs at least three logs");
    std::vector<OutlierScore> scores(corpus.size());
    detail::parallel_for(corpus.size(), opts.jobs, [&](std::size_t i) {
        const auto& h = corpus[i];
        if (opts.leave_one_out) {
            const auto l = tc.log_index(h.log_id());
            if (!l) throw Error("log '" + h.log_id() + "' is not part of the transformed corpus");
            scores[i] = log_outlier_score(h, tc, detail::stats_excluding(tc, stats, *l));
        } else {
            scores[i] = log_outlier_score(h, tc, stats);
        }
    });
    std::sort(scores.begin(), scores.end(), [](const auto& x, const auto& y) { return ranks_before(x, y); });
    return scores;
}

/// Transform, statistics and ranking in one call.
inline std::vector<OutlierScore> rank_outliers(const Corpus& corpus, const OutlierOptions& opts = {}) {
    const auto tc = transform_corpus(corpus);
    return rank_outliers(corpus, tc, command_stats(tc, corpus), opts);
}

inline std::string outlier_report_csv(std::span<const OutlierScore> scores) {
    std::string out = "log_id,out\n";
    for (const auto& s : scores) out += detail::csv_field(s.log_id) + ',' + detail::format_double(s.out) + '\n';
    return out;
}

/// Per-command breakdown for manual inspection:
/// `log_id,command,B,p_raw,out_c,w`. p_raw is empty for zero-variance
/// commands.
inline std::string contributions_csv(std::span<const OutlierScore> scores) {
    std::string out = "log_id,command,B,p_raw,out_c,w\n";
    for (const auto& s : scores)
        for (const auto& [c, k] : s.contributions)
            out += detail::csv_field(s.log_id) + ',' + detail::csv_field(c) + ',' + detail::format_double(k.b) + ',' +
                   (k.p_raw ? detail::format_double(*k.p_raw) : std::string()) + ',' +
                   detail::format_double(k.out) + ',' + detail::format_double(k.weight) + '\n';
    return out;
}

inline std::string outlier_report_json(std::span<const OutlierScore> scores) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& s : scores) j.push_back({{"log_id", s.log_id}, {"out", s.out}});
    return j.dump(2) + "\n";
}

}  // namespace logplag
