#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "gss/geometry/cone.hpp"

namespace gss::geometry {

/// Average ranks (1-based) with ties sharing the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

/// Pearson correlation of the average ranks. Absent when fewer than two
/// points or either side is constant.
inline std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ShapeError("spearman on sequences of different length");
    if (x.size() < 2) return std::nullopt;
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

struct CorrelationPoint {
    double surrogate = 0.0;
    double angle_fraction = 0.0;
};

struct CorrelationResult {
    std::vector<CorrelationPoint> pairs;
    std::optional<double> rho;
    std::uint64_t mc_samples = 0;
};

template <class Rng>
Eigen::VectorXd random_unit_vector(Eigen::Index dim, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(dim);
    do {
        for (Eigen::Index k = 0; k < dim; ++k) v[k] = normal(rng);
    } while (!(v.norm() > kEpsilonNorm));
    return v / v.norm();
}

/// Per trial: draw `set_size` random unit vectors in R^dim, record the
/// surrogate and the Monte-Carlo cone fraction, then rank-correlate the two.
/// Surrogates are only comparable at a fixed set size.
template <class Rng>
CorrelationResult correlation_experiment(Eigen::Index dim, std::size_t set_size, std::size_t trials,
                                         std::uint64_t mc_samples, Rng& rng) {
    if (dim < 1 || set_size < 1) throw ValueError("correlation experiment needs dim >= 1 and set_size >= 1");
    CorrelationResult result;
    result.mc_samples = mc_samples;
    std::vector<double> s, a;
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<Eigen::VectorXd> vecs;
        for (std::size_t i = 0; i < set_size; ++i) vecs.push_back(random_unit_vector(dim, rng));
        const GradientSet set(std::move(vecs));
        const double sur = surrogate(set);
        const double frac = solid_angle_mc(set, mc_samples, rng).fraction;
        result.pairs.push_back({sur, frac});
        s.push_back(sur);
        a.push_back(frac);
    }
    result.rho = spearman(s, a);
    return result;
}

}  // namespace gss::geometry
