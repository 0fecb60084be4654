#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gss/selection/buffer.hpp"

namespace gss::selection {

enum class ClusterMetric { features, normalized_gradient };

/// Incremental k-center state (doubling algorithm). The centers are the
/// buffer slots; `points[i]` is the metric embedding of slot i.
struct ClusterState {
    double tau = 0.0;
    ClusterMetric metric = ClusterMetric::features;
    std::vector<Eigen::VectorXd> points;
};

namespace detail {

inline double min_pairwise_distance(const std::vector<Eigen::VectorXd>& pts, bool positive_only) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d = (pts[i] - pts[j]).norm();
            if (positive_only && !(d > 0.0)) continue;
            best = std::min(best, d);
        }
    }
    return best;
}

}  // namespace detail

/// Adds `x` (embedded as `point`) as a center while there is room, unless
/// it lies within tau of an existing center, in which case that center
/// already covers it. On overflow the threshold grows to
/// max(2 tau, closest center pair) and the centers are re-covered in arrival
/// order, keeping each one only if it is at least tau from every kept
/// center; this repeats until at most capacity centers remain.
inline Mutation clust_observe(ClusterState& state, ScoredBuffer& buffer, const Example& x,
                              const Eigen::VectorXd& point) {
    buffer.note_seen();
    if (buffer.capacity() == 0) return Mutation::discarded();
    if (state.tau > 0.0) {
        for (const auto& c : state.points) {
            if ((c - point).norm() < state.tau) return Mutation::discarded();
        }
    }
    if (!buffer.full()) {
        state.points.push_back(point);
        return Mutation::appended(buffer.append(x));
    }

    std::vector<Slot> slots = buffer.slots();
    std::vector<Eigen::VectorXd> pts = state.points;
    slots.push_back({x, 0.0});
    pts.push_back(point);
    std::vector<char> is_new(slots.size(), 0);
    is_new.back() = 1;

    while (slots.size() > buffer.capacity()) {
        state.tau = std::max(2.0 * state.tau, detail::min_pairwise_distance(pts, false));
        if (!(state.tau > 0.0)) {
            // only coincident pairs so far; start from the closest distinct pair
            const double d = detail::min_pairwise_distance(pts, true);
            state.tau = std::isfinite(d) ? d : 1.0;
        }
        std::vector<Slot> kept_slots;
        std::vector<Eigen::VectorXd> kept_pts;
        std::vector<char> kept_new;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            bool far = true;
            for (const auto& k : kept_pts) {
                if ((pts[i] - k).norm() < state.tau) {
                    far = false;
                    break;
                }
            }
            if (far) {
                kept_slots.push_back(std::move(slots[i]));
                kept_pts.push_back(std::move(pts[i]));
                kept_new.push_back(is_new[i]);
            }
        }
        slots = std::move(kept_slots);
        pts = std::move(kept_pts);
        is_new = std::move(kept_new);
    }

    std::size_t newcomer = Mutation::npos;
    for (std::size_t i = 0; i < is_new.size(); ++i) {
        if (is_new[i]) newcomer = i;
    }
    buffer.reset_slots(std::move(slots));
    state.points = std::move(pts);
    return Mutation::reselected(newcomer);
}

/// Embedding used by the clustering baselines: hidden-layer activations for
/// feature-space clustering, unit gradient for gradient-space clustering.
inline Eigen::VectorXd cluster_embedding(ClusterMetric metric, const ModelContext& ctx, const Example& ex) {
    if (metric == ClusterMetric::features) return ctx.features(ex);
    Eigen::VectorXd g = ctx.gradient(ex).values;
    const double n = g.norm();
    return n > 0.0 ? Eigen::VectorXd(g / n) : g;
}

}  // namespace gss::selection
