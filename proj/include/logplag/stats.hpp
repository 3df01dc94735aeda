#pragma once
// Box-Cox transformation of command counts and the per-command corpus
// statistics consumed by the outlier detector.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "logplag/core.hpp"
#include "logplag/detail/format.hpp"

namespace logplag {

/// Standard normal CDF.
inline double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Standard normal upper tail, 1 - CDF, without cancellation.
inline double normal_sf(double z) noexcept { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// (v^lambda - 1) / lambda, or ln v at lambda = 0.
inline double boxcox_apply(double value, double lambda) {
    if (!(value > 0.0)) throw Error("Box-Cox transform needs a positive value, got " + detail::format_double(value));
    if (lambda == 0.0) return std::log(value);
    return std::expm1(lambda * std::log(value)) / lambda;
}

struct BoxCoxFit {
    double lambda = 1.0;
    bool degenerate = false;  // constant input; lambda forced to 1

    friend bool operator==(const BoxCoxFit&, const BoxCoxFit&) = default;
};

/// Lambda candidates: -2.00, -1.99, ..., 2.00.
inline constexpr int kLambdaGridSize = 401;
inline constexpr double lambda_grid_value(int i) noexcept { return (i - 200) / 100.0; }

/// Profile log-likelihood of the Box-Cox model (normal errors, MLE
/// variance):  (lambda - 1) * sum(ln x) - n/2 * ln(var(y)).
inline double boxcox_log_likelihood(std::span<const double> values, double lambda) {
    const auto n = static_cast<double>(values.size());
    double log_sum = 0.0, mean = 0.0;
    std::vector<double> y(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        log_sum += std::log(values[i]);
        y[i] = boxcox_apply(values[i], lambda);
        mean += y[i];
    }
    mean /= n;
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= n;
    if (!(var > 0.0)) return -std::numeric_limits<double>::infinity();
    return (lambda - 1.0) * log_sum - 0.5 * n * std::log(var);
}

/// Grid-search maximum likelihood lambda over [-2, 2] in steps of 0.01.
/// The first (smallest) lambda wins ties.
inline BoxCoxFit boxcox_lambda(std::span<const double> values) {
    if (values.size() < 2) throw Error("Box-Cox fit needs at least two values");
    for (double v : values)
        if (!(v > 0.0)) throw Error("Box-Cox fit needs positive values, got " + detail::format_double(v));

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) return {1.0, true};

    // Distinct values with multiplicities; counts columns repeat heavily.
    std::vector<double> uniq, logs, mult;
    for (double v : sorted) {
        if (uniq.empty() || uniq.back() != v) {
            uniq.push_back(v);
            logs.push_back(std::log(v));
            mult.push_back(1.0);
        } else {
            mult.back() += 1.0;
        }
    }
    const auto n = static_cast<double>(sorted.size());
    double log_sum = 0.0;
    for (std::size_t u = 0; u < uniq.size(); ++u) log_sum += mult[u] * logs[u];

    std::vector<double> y(uniq.size());
    double best_ll = -std::numeric_limits<double>::infinity();
    double best_lambda = 1.0;
    for (int i = 0; i < kLambdaGridSize; ++i) {
        const double lambda = lambda_grid_value(i);
        double mean = 0.0;
        for (std::size_t u = 0; u < uniq.size(); ++u) {
            y[u] = lambda == 0.0 ? logs[u] : std::expm1(lambda * logs[u]) / lambda;
            mean += mult[u] * y[u];
        }
        mean /= n;
        double var = 0.0;
        for (std::size_t u = 0; u < uniq.size(); ++u) var += mult[u] * (y[u] - mean) * (y[u] - mean);
        var /= n;
        if (!(var > 0.0) || !std::isfinite(var)) continue;
        const double ll = (lambda - 1.0) * log_sum - 0.5 * n * std::log(var);
        if (ll > best_ll) {
            best_ll = ll;
            best_lambda = lambda;
        }
    }
    return {best_lambda, false};
}

/// Caches fits by the sorted column content. The likelihood only depends
/// on the multiset of values, so a hit is exactly the fit that would have
/// been recomputed. Thread-safe.
class MemoizedBoxCoxFitter {
public:
    BoxCoxFit operator()(std::span<const double> values) const {
        std::vector<double> key(values.begin(), values.end());
        std::sort(key.begin(), key.end());
        {
            std::lock_guard lock(state_->mutex);
            if (auto it = state_->cache.find(key); it != state_->cache.end()) return it->second;
        }
        const auto fit = boxcox_lambda(key);
        std::lock_guard lock(state_->mutex);
        state_->cache.emplace(std::move(key), fit);
        return fit;
    }

    std::size_t size() const {
        std::lock_guard lock(state_->mutex);
        return state_->cache.size();
    }

private:
    struct Hash {
        std::size_t operator()(const std::vector<double>& v) const noexcept {
            std::size_t h = 1469598103934665603ULL;
            for (double d : v) h = (h ^ std::hash<double>{}(d)) * 1099511628211ULL;
            return h;
        }
    };
    struct State {
        std::mutex mutex;
        std::unordered_map<std::vector<double>, BoxCoxFit, Hash> cache;
    };
    std::shared_ptr<State> state_ = std::make_shared<State>();
};

/// B(c, L): Box-Cox transformed 1 + N(L, c) for every command of the corpus
/// universe and every log, with one lambda per command.
class TransformedCounts {
public:
    TransformedCounts() = default;

    const std::vector<CommandType>& commands() const noexcept { return commands_; }
    const std::vector<std::string>& log_ids() const noexcept { return log_ids_; }
    std::size_t num_commands() const noexcept { return commands_.size(); }
    std::size_t num_logs() const noexcept { return log_ids_.size(); }

    const BoxCoxFit& fit(std::size_t c) const { return fits_.at(c); }
    double lambda(std::size_t c) const { return fits_.at(c).lambda; }
    double b(std::size_t c, std::size_t l) const { return b_[c * log_ids_.size() + l]; }
    Count n(std::size_t c, std::size_t l) const { return n_[c * log_ids_.size() + l]; }

    /// B(c, L) values of one command across all logs.
    std::span<const double> column(std::size_t c) const {
        return {b_.data() + c * log_ids_.size(), log_ids_.size()};
    }

    std::optional<std::size_t> command_index(std::string_view cmd) const {
        const auto it = std::lower_bound(commands_.begin(), commands_.end(), cmd);
        if (it == commands_.end() || *it != cmd) return std::nullopt;
        return static_cast<std::size_t>(it - commands_.begin());
    }
    std::optional<std::size_t> log_index(std::string_view id) const {
        const auto it = std::lower_bound(log_ids_.begin(), log_ids_.end(), id);
        if (it == log_ids_.end() || *it != id) return std::nullopt;
        return static_cast<std::size_t>(it - log_ids_.begin());
    }

    /// Transformed value of an arbitrary count under command c's lambda.
    double transform(std::size_t c, Count count) const {
        return boxcox_apply(1.0 + static_cast<double>(count), fits_.at(c).lambda);
    }

private:
    template <class Fitter>
    friend TransformedCounts transform_corpus(const Corpus&, Fitter&&);

    std::vector<CommandType> commands_;
    std::vector<std::string> log_ids_;
    std::vector<BoxCoxFit> fits_;
    std::vector<double> b_;  // row-major, command x log
    std::vector<Count> n_;
};

/// Fits lambda per command on {1 + N(L, c)} and transforms every entry.
/// Absent commands count as N = 0.
template <class Fitter>
TransformedCounts transform_corpus(const Corpus& corpus, Fitter&& fitter) {
    if (corpus.empty()) throw Error("cannot transform an empty corpus");
    TransformedCounts tc;
    tc.commands_ = corpus.universe();
    tc.log_ids_ = corpus.ids();
    const auto nl = tc.log_ids_.size();
    tc.fits_.resize(tc.commands_.size());
    tc.b_.resize(tc.commands_.size() * nl);
    tc.n_.resize(tc.commands_.size() * nl);

    std::vector<double> col(nl);
    for (std::size_t c = 0; c < tc.commands_.size(); ++c) {
        for (std::size_t l = 0; l < nl; ++l) {
            const auto n = corpus[l].count(tc.commands_[c]);
            tc.n_[c * nl + l] = n;
            col[l] = 1.0 + static_cast<double>(n);
        }
        // A single-log corpus cannot be fitted; keep the identity-like lambda.
        tc.fits_[c] = nl >= 2 ? BoxCoxFit(fitter(std::span<const double>(col))) : BoxCoxFit{1.0, true};
        for (std::size_t l = 0; l < nl; ++l) tc.b_[c * nl + l] = boxcox_apply(col[l], tc.fits_[c].lambda);
    }
    return tc;
}

inline TransformedCounts transform_corpus(const Corpus& corpus) {
    return transform_corpus(corpus, [](std::span<const double> v) { return boxcox_lambda(v); });
}

struct CommandStat {
    CommandType command;
    double lambda = 1.0;
    bool degenerate = false;
    double mean = 0.0;        // mean of B(c, .) over all logs
    double std = 0.0;         // population standard deviation
    double prevalence = 0.0;  // fraction of logs with N(L, c) > 0
    double weight = 0.0;      // prevalence squared
};

class CorpusCommandStats {
public:
    CorpusCommandStats() = default;
    explicit CorpusCommandStats(std::vector<CommandStat> stats) : stats_(std::move(stats)) {}

    const std::vector<CommandStat>& all() const noexcept { return stats_; }
    std::size_t size() const noexcept { return stats_.size(); }
    const CommandStat& operator[](std::size_t c) const { return stats_[c]; }

    const CommandStat& at(std::string_view cmd) const {
        const auto it = std::lower_bound(stats_.begin(), stats_.end(), cmd,
                                         [](const CommandStat& s, std::string_view v) { return s.command < v; });
        if (it == stats_.end() || it->command != cmd) throw Error("no statistics for command '" + std::string(cmd) + "'");
        return *it;
    }

    double total_weight() const {
        double w = 0.0;
        for (const auto& s : stats_) w += s.weight;
        return w;
    }

private:
    std::vector<CommandStat> stats_;
};

/// Per-command mean and population std of B over all logs, prevalence and
/// weight w(c) = prevalence^2.
inline CorpusCommandStats command_stats(const TransformedCounts& tc, const Corpus& corpus) {
    if (corpus.size() < 2) throw Error("command statistics need at least two logs");
    if (tc.log_ids() != corpus.ids() || tc.commands() != corpus.universe())
        throw Error("transformed counts do not cover this corpus");

    const auto nl = static_cast<double>(tc.num_logs());
    std::vector<CommandStat> out;
    out.reserve(tc.num_commands());
    for (std::size_t c = 0; c < tc.num_commands(); ++c) {
        CommandStat s;
        s.command = tc.commands()[c];
        s.lambda = tc.fit(c).lambda;
        s.degenerate = tc.fit(c).degenerate;
        std::size_t present = 0;
        for (std::size_t l = 0; l < tc.num_logs(); ++l) {
            s.mean += tc.b(c, l);
            if (tc.n(c, l) > 0) ++present;
        }
        s.mean /= nl;
        double ss = 0.0;
        for (std::size_t l = 0; l < tc.num_logs(); ++l) ss += (tc.b(c, l) - s.mean) * (tc.b(c, l) - s.mean);
        s.std = std::sqrt(ss / nl);
        s.prevalence = static_cast<double>(present) / nl;
        s.weight = s.prevalence * s.prevalence;
        out.push_back(std::move(s));
    }
    return CorpusCommandStats(std::move(out));
}

/// `command,log_id,N,B` for every (command, log) pair.
inline std::string transformed_csv(const TransformedCounts& tc) {
    std::string out = "command,log_id,N,B\n";
    for (std::size_t c = 0; c < tc.num_commands(); ++c)
        for (std::size_t l = 0; l < tc.num_logs(); ++l)
            out += detail::csv_field(tc.commands()[c]) + ',' + detail::csv_field(tc.log_ids()[l]) + ',' +
                   std::to_string(tc.n(c, l)) + ',' + detail::format_double(tc.b(c, l)) + '\n';
    return out;
}

/// `command,lambda,mean,std,weight`.
inline std::string stats_csv(const CorpusCommandStats& stats) {
    std::string out = "command,lambda,mean,std,weight\n";
    for (const auto& s : stats.all())
        out += detail::csv_field(s.command) + ',' + detail::format_double(s.lambda) + ',' +
               detail::format_double(s.mean) + ',' + detail::format_double(s.std) + ',' +
               detail::format_double(s.weight) + '\n';
    return out;
}

}  // namespace logplag
