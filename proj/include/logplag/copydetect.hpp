#pragma once
// "Copy and modify" detection: the similarity of two logs is the largest
// Pearson correlation of their raw command counts over randomly drawn
// command subsets, half of each subset drawn from each log.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "logplag/core.hpp"
#include "logplag/detail/format.hpp"
#include "logplag/detail/random.hpp"

namespace logplag {

struct CopyParams {
    std::size_t n_sam = 100;  // subsets drawn per pair
    std::size_t s_sam = 2;    // subset size; s_sam / 2 types come from each log
    std::uint64_t seed = 0;

    void validate() const {
        if (n_sam < 1) throw Error("n_sam must be at least 1");
        if (s_sam < 2 || s_sam % 2 != 0) throw Error("s_sam must be a positive even number");
    }
};

struct PairScore {
    std::string id_a;  // id_a <= id_b
    std::string id_b;
    double cor = 0.0;
    std::vector<CommandType> best_subset;  // sorted
    std::size_t identical = 0;             // sampled subsets with equal counts in both logs
    std::size_t hits = 0;                  // sampled subsets attaining `cor`
};

/// Ranking order: higher cor, then more subsets with identical counts,
/// then more subsets attaining cor, then ids.
inline bool ranks_before(const PairScore& x, const PairScore& y) {
    if (x.cor != y.cor) return x.cor > y.cor;
    if (x.identical != y.identical) return x.identical > y.identical;
    if (x.hits != y.hits) return x.hits > y.hits;
    if (x.id_a != y.id_a) return x.id_a < y.id_a;
    return x.id_b < y.id_b;
}

/// Seed of the per-pair stream; symmetric in the two ids.
inline std::uint64_t pair_seed(std::uint64_t seed, std::string_view x, std::string_view y) {
    if (y < x) std::swap(x, y);
    return detail::derive_seed(seed, detail::fnv1a(x), detail::fnv1a(y));
}

namespace detail {

/// Pearson correlation with the zero-variance conventions: equal vectors
/// give exactly 1; otherwise a constant vector gives 0.
inline double pearson(std::span<const double> x, std::span<const double> y) {
    const auto n = x.size();
    if (n == 0) return 0.0;
    if (std::equal(x.begin(), x.end(), y.begin())) return 1.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Two histograms projected onto the sorted union of their types. Index
/// order equals lexicographic command order.
struct DensePair {
    std::vector<CommandType> names;
    std::vector<double> a, b;
    std::vector<std::uint32_t> types_a, types_b;  // T(a), T(b) as ascending indices

    DensePair(const CommandHistogram& ha, const CommandHistogram& hb) {
        auto ia = ha.counts().begin(), ib = hb.counts().begin();
        const auto ea = ha.counts().end(), eb = hb.counts().end();
        while (ia != ea || ib != eb) {
            const auto idx = static_cast<std::uint32_t>(names.size());
            if (ib == eb || (ia != ea && ia->first < ib->first)) {
                push(ia->first, ia->second, 0);
                types_a.push_back(idx);
                ++ia;
            } else if (ia == ea || ib->first < ia->first) {
                push(ib->first, 0, ib->second);
                types_b.push_back(idx);
                ++ib;
            } else {
                push(ia->first, ia->second, ib->second);
                types_a.push_back(idx);
                types_b.push_back(idx);
                ++ia;
                ++ib;
            }
        }
    }

    std::size_t index_of(const CommandType& c) const {
        return static_cast<std::size_t>(std::lower_bound(names.begin(), names.end(), c) - names.begin());
    }

    double correlation(std::span<const std::uint32_t> subset, std::vector<double>& x, std::vector<double>& y) const {
        x.clear();
        y.clear();
        for (auto i : subset) {
            x.push_back(a[i]);
            y.push_back(b[i]);
        }
        return pearson(x, y);
    }

    std::vector<CommandType> subset_names(std::span<const std::uint32_t> subset) const {
        std::vector<CommandType> out;
        for (auto i : subset) out.push_back(names[i]);
        return out;
    }

private:
    void push(const CommandType& c, Count na, Count nb) {
        names.push_back(c);
        a.push_back(static_cast<double>(na));
        b.push_back(static_cast<double>(nb));
    }
};

/// U from T(a), U' from T(b) \ U, each of size min(s_sam / 2, available).
/// Writes S = U + U' sorted ascending.
template <class URBG>
void draw_subset(const DensePair& p, std::size_t s_sam, URBG& rng, std::vector<std::uint32_t>& subset,
                 std::vector<std::uint32_t>& scratch) {
    const std::size_t half = s_sam / 2;
    scratch.assign(p.types_a.begin(), p.types_a.end());
    const auto ka = std::min(half, scratch.size());
    choose_front(scratch, ka, rng);
    subset.assign(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(ka));

    scratch.clear();
    for (auto t : p.types_b)
        if (std::find(subset.begin(), subset.end(), t) == subset.end()) scratch.push_back(t);
    const auto kb = std::min(half, scratch.size());
    choose_front(scratch, kb, rng);
    subset.insert(subset.end(), scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(kb));
    std::sort(subset.begin(), subset.end());
    if (subset.empty()) throw Error("cannot draw a command subset: both histograms are empty");
}

template <class F>
void for_each_combination(std::size_t n, std::size_t k, F&& f) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    if (k > n) return;
    while (true) {
        f(std::span<const std::size_t>(idx));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

inline PairScore make_score(const CommandHistogram& a, const CommandHistogram& b) {
    PairScore s;
    s.id_a = a.log_id();
    s.id_b = b.log_id();
    s.cor = -2.0;
    return s;
}

}  // namespace detail

/// Draws one admissible subset S for the pair (a, b).
template <class URBG>
std::set<CommandType> sample_subset(const CommandHistogram& a, const CommandHistogram& b, std::size_t s_sam,
                                    URBG& rng) {
    if (s_sam < 2 || s_sam % 2 != 0) throw Error("s_sam must be a positive even number");
    const detail::DensePair p(a, b);
    std::vector<std::uint32_t> subset, scratch;
    detail::draw_subset(p, s_sam, rng, subset, scratch);
    const auto names = p.subset_names(subset);
    return {names.begin(), names.end()};
}

/// rho(L, L', S) over raw counts; absent commands count as zero.
inline double subset_correlation(const CommandHistogram& a, const CommandHistogram& b,
                                 const std::set<CommandType>& subset) {
    std::vector<double> x, y;
    for (const auto& c : subset) {
        x.push_back(static_cast<double>(a.count(c)));
        y.push_back(static_cast<double>(b.count(c)));
    }
    return detail::pearson(x, y);
}

/// cor(L, L'): maximum rho over n_sam sampled subsets. The pair is put in
/// id order and the stream is seeded from (seed, ids), so the result does
/// not depend on argument order.
inline PairScore pair_correlation(const CommandHistogram& x, const CommandHistogram& y, const CopyParams& params) {
    params.validate();
    const bool swap = y.log_id() < x.log_id();
    const auto& a = swap ? y : x;
    const auto& b = swap ? x : y;

    const detail::DensePair p(a, b);
    Rng rng(pair_seed(params.seed, a.log_id(), b.log_id()));
    auto score = detail::make_score(a, b);
    std::vector<std::uint32_t> subset, scratch, best;
    std::vector<double> vx, vy;
    for (std::size_t draw = 0; draw < params.n_sam; ++draw) {
        detail::draw_subset(p, params.s_sam, rng, subset, scratch);
        const double rho = p.correlation(subset, vx, vy);
        if (vx == vy) ++score.identical;
        if (rho > score.cor) {
            score.cor = rho;
            score.hits = 1;
            best = subset;
        } else if (rho == score.cor) {
            ++score.hits;
        }
    }
    score.best_subset = p.subset_names(best);
    return score;
}

/// Same maximum taken over every admissible subset instead of a sample.
/// `hits` counts the admissible subsets attaining it.
inline PairScore pair_correlation_exhaustive(const CommandHistogram& x, const CommandHistogram& y,
                                             std::size_t s_sam) {
    if (s_sam < 2 || s_sam % 2 != 0) throw Error("s_sam must be a positive even number");
    const bool swap = y.log_id() < x.log_id();
    const auto& a = swap ? y : x;
    const auto& b = swap ? x : y;
    if (a.empty() && b.empty()) throw Error("cannot draw a command subset: both histograms are empty");

    const detail::DensePair p(a, b);
    const std::size_t half = s_sam / 2;
    auto score = detail::make_score(a, b);
    std::vector<std::uint32_t> u, rest, subset, best;
    std::vector<double> vx, vy;
    detail::for_each_combination(p.types_a.size(), std::min(half, p.types_a.size()), [&](auto ui) {
        u.clear();
        for (auto i : ui) u.push_back(p.types_a[i]);
        rest.clear();
        for (auto t : p.types_b)
            if (std::find(u.begin(), u.end(), t) == u.end()) rest.push_back(t);
        detail::for_each_combination(rest.size(), std::min(half, rest.size()), [&](auto vi) {
            subset = u;
            for (auto i : vi) subset.push_back(rest[i]);
            std::sort(subset.begin(), subset.end());
            const double rho = p.correlation(subset, vx, vy);
            if (vx == vy) ++score.identical;
            if (rho > score.cor) {
                score.cor = rho;
                score.hits = 1;
                best = subset;
            } else if (rho == score.cor) {
                ++score.hits;
            }
        });
    });
    score.best_subset = p.subset_names(best);
    return score;
}

/// Scores all C(n, 2) pairs and sorts them with ranks_before.
inline std::vector<PairScore> rank_pairs(const Corpus& corpus, const CopyParams& params, unsigned jobs = 1) {
    params.validate();
    if (corpus.size() < 2) throw Error("pair ranking needs at least two logs");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(corpus.size() * (corpus.size() - 1) / 2);
    for (std::size_t i = 0; i < corpus.size(); ++i)
        for (std::size_t j = i + 1; j < corpus.size(); ++j) pairs.emplace_back(i, j);

    std::vector<PairScore> scores(pairs.size());
    detail::parallel_for(pairs.size(), jobs, [&](std::size_t k) {
        scores[k] = pair_correlation(corpus[pairs[k].first], corpus[pairs[k].second], params);
    });
    std::sort(scores.begin(), scores.end(), [](const PairScore& x, const PairScore& y) { return ranks_before(x, y); });
    return scores;
}

/// `id_a,id_b,cor,best_subset` with the subset semicolon-joined.
inline std::string pair_report_csv(std::span<const PairScore> scores) {
    std::string out = "id_a,id_b,cor,best_subset\n";
    for (const auto& s : scores)
        out += detail::csv_field(s.id_a) + ',' + detail::csv_field(s.id_b) + ',' + detail::format_double(s.cor) +
               ',' + detail::csv_field(detail::join(s.best_subset, ";")) + '\n';
    return out;
}

inline std::string pair_report_json(std::span<const PairScore> scores) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& s : scores)
        j.push_back({{"id_a", s.id_a}, {"id_b", s.id_b}, {"cor", s.cor}, {"identical", s.identical}, {"hits", s.hits},
                     {"best_subset", s.best_subset}});
    return j.dump(2) + "\n";
}

}  // namespace logplag
