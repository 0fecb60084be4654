#pragma once

#include <algorithm>
#include <random>
#include <span>
#include <vector>

#include "gss/geometry/cone.hpp"
#include "gss/selection/buffer.hpp"

namespace gss::selection {

struct GreedyOptions {
    std::size_t n = 10;  // buffer members compared against each newcomer
    // Only consider replacement when the newcomer's best cosine is negative
    // (score below 1). Disabling it lets every newcomer contend for a slot.
    bool negative_similarity_gate = true;
};

/// max_i cos(g, G_i) + 1, or the neutral 1 when there is nothing to compare.
inline double greedy_score(const GradientVector& g, std::span<const GradientVector> sampled) {
    if (!(g.values.norm() > geometry::kEpsilonNorm)) throw DegenerateVectorError("greedy score of a zero gradient");
    if (sampled.empty()) return 1.0;
    double best = -1.0;
    for (const auto& s : sampled) best = std::max(best, geometry::cosine(g, s));
    return best + 1.0;
}

/// Slot i with probability C_i / sum_j C_j; uniform when every score is zero.
inline std::size_t draw_candidate(const ScoredBuffer& buffer, Rng& rng) {
    const double total = buffer.score_sum();
    if (!(total > 0.0)) {
        std::uniform_int_distribution<std::size_t> pick(0, buffer.size() - 1);
        return pick(rng);
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < buffer.size(); ++i) {
        acc += buffer[i].score;
        if (u < acc) return i;
    }
    // u landed on the rounding tail; return the last slot with positive mass
    for (std::size_t i = buffer.size(); i-- > 0;) {
        if (buffer[i].score > 0.0) return i;
    }
    return buffer.size() - 1;
}

/// One greedy step for newcomer `x` with gradient `g`, both taken at the
/// current parameters. Comparison gradients for n random members come from
/// `ctx` at the same parameters.
inline Mutation gss_greedy_observe(ScoredBuffer& buffer, const Example& x, const GradientVector& g,
                                   const ModelContext& ctx, const GreedyOptions& opt, Rng& rng) {
    buffer.note_seen();
    if (buffer.capacity() == 0) return Mutation::discarded();

    std::vector<GradientVector> sampled;
    for (auto i : sample_indices(buffer.size(), opt.n, rng)) sampled.push_back(ctx.gradient(buffer[i].example));
    const double c = greedy_score(g, sampled);

    if (!buffer.full()) return Mutation::appended(buffer.append(x, c));
    if (opt.negative_similarity_gate && !(c < 1.0)) return Mutation::discarded();

    const std::size_t i = draw_candidate(buffer, rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = unit(rng);
    const double ci = buffer[i].score;
    // ci + c == 0 only if both are zero; the newcomer is then as good as the incumbent
    const double p_replace = (ci + c) > 0.0 ? ci / (ci + c) : 1.0;
    if (r < p_replace) {
        buffer.replace(i, x, c);
        return Mutation::replaced(i);
    }
    return Mutation::discarded();
}

}  // namespace gss::selection
