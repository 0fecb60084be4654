#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gss/errors.hpp"
#include "gss/model/example.hpp"

namespace gss::geometry {

inline constexpr double kEpsilonNorm = 1e-12;
inline constexpr double kRankTolerance = 1e-10;

/// Equal-length, non-degenerate vectors whose halfspaces define a cone.
class GradientSet {
public:
    GradientSet() = default;

    explicit GradientSet(std::vector<Eigen::VectorXd> vectors) : vectors_(std::move(vectors)) { validate(); }

    explicit GradientSet(std::span<const GradientVector> grads) {
        vectors_.reserve(grads.size());
        for (const auto& g : grads) vectors_.push_back(g.values);
        validate();
    }

    std::size_t size() const { return vectors_.size(); }
    bool empty() const { return vectors_.empty(); }
    Eigen::Index dimension() const { return vectors_.empty() ? 0 : vectors_.front().size(); }
    const Eigen::VectorXd& operator[](std::size_t i) const { return vectors_[i]; }
    const std::vector<Eigen::VectorXd>& vectors() const { return vectors_; }

    /// Columns are the unit-normalized members.
    Eigen::MatrixXd normalized_columns() const {
        Eigen::MatrixXd out(dimension(), static_cast<Eigen::Index>(size()));
        for (std::size_t i = 0; i < size(); ++i) {
            out.col(static_cast<Eigen::Index>(i)) = vectors_[i] / vectors_[i].norm();
        }
        return out;
    }

private:
    void validate() const {
        for (std::size_t i = 0; i < vectors_.size(); ++i) {
            if (vectors_[i].size() != vectors_.front().size()) {
                throw ShapeError("gradient set member " + std::to_string(i) + " has a different dimension");
            }
            if (!(vectors_[i].norm() > kEpsilonNorm)) {
                throw DegenerateVectorError("gradient set member " + std::to_string(i) + " has near-zero norm");
            }
        }
    }

    std::vector<Eigen::VectorXd> vectors_;
};

inline double cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    if (u.size() != v.size()) throw ShapeError("cosine of vectors with different lengths");
    const double nu = u.norm();
    const double nv = v.norm();
    if (!(nu > kEpsilonNorm) || !(nv > kEpsilonNorm)) {
        throw DegenerateVectorError("cosine of a near-zero vector");
    }
    return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

inline double cosine(const GradientVector& u, const GradientVector& v) { return cosine(u.values, v.values); }

/// Matrix of pairwise cosines; unit diagonal.
inline Eigen::MatrixXd normalized_gram(const GradientSet& set) {
    const Eigen::MatrixXd unit = set.normalized_columns();
    Eigen::MatrixXd gram = unit.transpose() * unit;
    gram = gram.cwiseMax(-1.0).cwiseMin(1.0);
    gram.diagonal().setOnes();
    return gram;
}

/// Sum of cosines over all ordered pairs, the diagonal included (so a set
/// of M vectors contributes exactly M from i == j).
inline double surrogate(const GradientSet& set) {
    if (set.empty()) throw EmptyInputError("surrogate of an empty set");
    return normalized_gram(set).sum();
}

/// Spread of the unit directions: 1 - surrogate / M^2.
inline double direction_variance(const GradientSet& set) {
    const double m = static_cast<double>(set.size());
    return 1.0 - surrogate(set) / (m * m);
}

/// Orthonormal basis (d x r) of span(set), built by Gram-Schmidt over the
/// unit members in order with one re-orthogonalization pass. Members whose
/// residual falls below the rank tolerance add no direction, so a prefix of
/// a set spanning the same space yields the same basis.
inline Eigen::MatrixXd span_basis(const GradientSet& set, double tolerance = kRankTolerance) {
    const Eigen::MatrixXd unit = set.normalized_columns();
    std::vector<Eigen::VectorXd> basis;
    for (Eigen::Index j = 0; j < unit.cols(); ++j) {
        Eigen::VectorXd v = unit.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) v -= q.dot(v) * q;
        }
        const double n = v.norm();
        if (n > tolerance) basis.push_back(v / n);
    }
    Eigen::MatrixXd out(set.dimension(), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = basis[k];
    return out;
}

struct AngleEstimate {
    double fraction = 0.0;
    std::uint64_t samples_used = 0;
    std::uint64_t feasible_count = 0;
    double std_error = 0.0;
    std::size_t span_rank = 0;
};

inline AngleEstimate make_estimate(std::uint64_t feasible, std::uint64_t samples, std::size_t rank) {
    AngleEstimate est;
    est.feasible_count = feasible;
    est.samples_used = samples;
    est.span_rank = rank;
    est.fraction = samples == 0 ? 0.0 : static_cast<double>(feasible) / static_cast<double>(samples);
    est.std_error = samples == 0 ? 0.0 : std::sqrt(est.fraction * (1.0 - est.fraction) / static_cast<double>(samples));
    return est;
}

namespace detail {

// Members expressed in basis coordinates: row i is basis^T g_i / |g_i|.
inline Eigen::MatrixXd constraint_coordinates(const GradientSet& set, const Eigen::MatrixXd& basis) {
    return set.normalized_columns().transpose() * basis;
}

template <class Rng>
std::uint64_t count_feasible(const Eigen::MatrixXd& coords, std::uint64_t n_samples, Rng& rng) {
    const Eigen::Index r = coords.cols();
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(r);
    std::uint64_t feasible = 0;
    for (std::uint64_t s = 0; s < n_samples; ++s) {
        for (Eigen::Index k = 0; k < r; ++k) z[k] = normal(rng);
        // A standard normal in r coordinates, normalized, is uniform on the
        // unit sphere of the span. Normalizing does not change any sign below.
        bool ok = true;
        for (Eigen::Index i = 0; i < coords.rows() && ok; ++i) ok = coords.row(i).dot(z) >= 0.0;
        feasible += ok ? 1 : 0;
    }
    return feasible;
}

}  // namespace detail

/// Monte-Carlo estimate of the normalized measure of
/// { u on the unit sphere of span(set) : <u, g_i> >= 0 for all i }.
template <class Rng>
AngleEstimate solid_angle_mc(const GradientSet& set, std::uint64_t n_samples, Rng& rng) {
    if (set.empty()) throw DegenerateVectorError("solid angle of an empty set (rank 0)");
    const Eigen::MatrixXd basis = span_basis(set);
    if (basis.cols() == 0) throw DegenerateVectorError("solid angle of a rank-0 set");
    const Eigen::MatrixXd coords = detail::constraint_coordinates(set, basis);
    return make_estimate(detail::count_feasible(coords, n_samples, rng), n_samples,
                         static_cast<std::size_t>(basis.cols()));
}

/// Same estimate split into independently seeded sub-streams whose counts are
/// summed; reproducible from the seed list alone.
inline AngleEstimate solid_angle_mc_sharded(const GradientSet& set, std::uint64_t samples_per_shard,
                                            std::span<const std::uint64_t> shard_seeds) {
    if (set.empty()) throw DegenerateVectorError("solid angle of an empty set (rank 0)");
    const Eigen::MatrixXd basis = span_basis(set);
    if (basis.cols() == 0) throw DegenerateVectorError("solid angle of a rank-0 set");
    const Eigen::MatrixXd coords = detail::constraint_coordinates(set, basis);
    std::uint64_t feasible = 0;
    for (auto seed : shard_seeds) {
        std::mt19937_64 rng(seed);
        feasible += detail::count_feasible(coords, samples_per_shard, rng);
    }
    return make_estimate(feasible, samples_per_shard * shard_seeds.size(), static_cast<std::size_t>(basis.cols()));
}

}  // namespace gss::geometry
