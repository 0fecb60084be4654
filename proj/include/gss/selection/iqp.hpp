#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "gss/geometry/cone.hpp"
#include "gss/selection/buffer.hpp"

namespace gss::selection {

struct IqpOptions {
    double enumeration_limit = 2e5;  // exhaustive search when C(N, M) is at most this
    std::size_t restarts = 5;        // local-search starts; the first is the low-row-sum start
};

struct IqpResult {
    std::vector<std::size_t> chosen;  // ascending candidate indices
    double objective = 0.0;           // sum of cosines over chosen x chosen
    bool exhaustive = false;
};

/// C(n, k) as a double, saturating at +inf.
inline double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
        if (!std::isfinite(r)) return r;
    }
    return std::round(r);
}

inline double subset_objective(const Eigen::MatrixXd& gram, std::span<const std::size_t> subset) {
    double s = 0.0;
    for (auto a : subset) {
        for (auto b : subset) s += gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
    return s;
}

namespace detail {

inline IqpResult enumerate_subsets(const Eigen::MatrixXd& gram, std::size_t m) {
    const auto n = static_cast<std::size_t>(gram.rows());
    std::vector<std::size_t> comb(m);
    std::iota(comb.begin(), comb.end(), 0);
    IqpResult best{comb, subset_objective(gram, comb), true};
    if (m == 0 || m == n) return best;
    for (;;) {
        // next combination in lexicographic order
        std::size_t i = m;
        while (i > 0 && comb[i - 1] == n - m + i - 1) --i;
        if (i == 0) break;
        ++comb[i - 1];
        for (std::size_t j = i; j < m; ++j) comb[j] = comb[j - 1] + 1;
        const double v = subset_objective(gram, comb);
        if (v < best.objective) {
            best.objective = v;
            best.chosen = comb;
        }
    }
    return best;
}

// Best-improvement single-swap descent from `start`.
inline std::vector<std::size_t> swap_descent(const Eigen::MatrixXd& gram, std::vector<char> in_set) {
    const Eigen::Index n = gram.rows();
    Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(n);  // sum over chosen b of gram(k, b)
    for (Eigen::Index b = 0; b < n; ++b) {
        if (in_set[static_cast<std::size_t>(b)]) row_sum += gram.col(b);
    }
    for (;;) {
        double best_delta = -1e-12;
        Eigen::Index best_out = -1, best_in = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!in_set[static_cast<std::size_t>(i)]) continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (in_set[static_cast<std::size_t>(j)]) continue;
                // objective change from dropping i and adding j
                const double delta =
                    2.0 * (row_sum[j] - row_sum[i] - gram(i, j)) + gram(i, i) + gram(j, j);
                if (delta < best_delta) {
                    best_delta = delta;
                    best_out = i;
                    best_in = j;
                }
            }
        }
        if (best_out < 0) break;
        in_set[static_cast<std::size_t>(best_out)] = 0;
        in_set[static_cast<std::size_t>(best_in)] = 1;
        row_sum += gram.col(best_in) - gram.col(best_out);
    }
    std::vector<std::size_t> chosen;
    for (std::size_t k = 0; k < in_set.size(); ++k) {
        if (in_set[k]) chosen.push_back(k);
    }
    return chosen;
}

}  // namespace detail

/// Size-m subset minimizing the sum of pairwise cosines over a precomputed
/// normalized Gram matrix (the binary program min 1/2 x'Gx, 1'x = m).
inline IqpResult iqp_select_gram(const Eigen::MatrixXd& gram, std::size_t m, const IqpOptions& opt, Rng& rng) {
    const auto n = static_cast<std::size_t>(gram.rows());
    if (n < m) {
        throw InsufficientCandidatesError("iqp_select needs at least " + std::to_string(m) + " candidates, got " +
                                          std::to_string(n));
    }
    if (binomial(n, m) <= opt.enumeration_limit) return detail::enumerate_subsets(gram, m);

    IqpResult best;
    best.objective = std::numeric_limits<double>::infinity();
    const Eigen::VectorXd sums = gram.rowwise().sum();
    for (std::size_t r = 0; r < std::max<std::size_t>(opt.restarts, 1); ++r) {
        std::vector<char> in_set(n, 0);
        if (r == 0) {
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return sums[static_cast<Eigen::Index>(a)] < sums[static_cast<Eigen::Index>(b)];
            });
            for (std::size_t k = 0; k < m; ++k) in_set[order[k]] = 1;
        } else {
            for (auto k : sample_indices(n, m, rng)) in_set[k] = 1;
        }
        auto chosen = detail::swap_descent(gram, std::move(in_set));
        const double v = subset_objective(gram, chosen);
        if (v < best.objective) {
            best.objective = v;
            best.chosen = std::move(chosen);
        }
    }
    return best;
}

inline IqpResult iqp_select(std::span<const GradientVector> candidates, std::size_t m, const IqpOptions& opt,
                            Rng& rng) {
    if (candidates.size() < m) {
        throw InsufficientCandidatesError("iqp_select needs at least " + std::to_string(m) + " candidates, got " +
                                          std::to_string(candidates.size()));
    }
    if (candidates.empty()) return {};
    return iqp_select_gram(geometry::normalized_gram(geometry::GradientSet(candidates)), m, opt, rng);
}

/// Stage `x` in the recent buffer. When the recent buffer fills it is merged
/// into the main buffer; if the merge overflows capacity, every member's
/// gradient is recomputed at the current parameters and the surrogate
/// minimizer of size capacity is kept.
inline Mutation gss_iqp_observe(ScoredBuffer& buffer, RecentBuffer& recent, const Example& x,
                                const ModelContext& ctx, const IqpOptions& opt, Rng& rng) {
    buffer.note_seen();
    recent.pending.push_back(x);
    if (!recent.full()) return Mutation::staged();

    std::vector<Example> merged = buffer.examples();
    for (auto& ex : recent.pending) merged.push_back(std::move(ex));
    recent.pending.clear();

    const std::size_t cap = buffer.capacity();
    std::vector<Slot> slots;
    std::size_t newcomer = Mutation::npos;
    if (merged.size() <= cap) {
        for (auto& ex : merged) slots.push_back({std::move(ex), 0.0});
        newcomer = slots.empty() ? Mutation::npos : slots.size() - 1;
    } else {
        std::vector<GradientVector> grads;
        grads.reserve(merged.size());
        for (const auto& ex : merged) grads.push_back(ctx.gradient(ex));
        const auto result = iqp_select(grads, cap, opt, rng);
        for (auto k : result.chosen) {
            if (k == merged.size() - 1) newcomer = slots.size();
            slots.push_back({std::move(merged[k]), 0.0});
        }
    }
    buffer.reset_slots(std::move(slots));
    return Mutation::reselected(newcomer);
}

}  // namespace gss::selection
