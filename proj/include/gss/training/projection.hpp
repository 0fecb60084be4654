#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gss/errors.hpp"
#include "gss/model/example.hpp"

namespace gss::training {

/// Rows are constraint gradients g_i; feasible directions v satisfy <v, g_i> >= 0.
struct ConstraintSet {
    Eigen::MatrixXd rows;

    ConstraintSet() = default;
    explicit ConstraintSet(Eigen::MatrixXd r) : rows(std::move(r)) {}
    explicit ConstraintSet(std::span<const GradientVector> grads, Eigen::Index dim) : rows(grads.size(), dim) {
        for (std::size_t i = 0; i < grads.size(); ++i) {
            if (grads[i].size() != dim) throw ShapeError("constraint gradient length differs from parameter count");
            rows.row(static_cast<Eigen::Index>(i)) = grads[i].values.transpose();
        }
    }

    Eigen::Index count() const { return rows.rows(); }
    Eigen::Index dimension() const { return rows.cols(); }
};

struct ProjectionOptions {
    double tol = 1e-8;                  // stop once the largest dual update in a sweep is below this
    double max_sweeps_factor = 10.0;    // sweep cap = factor * rows^2 (at least 10)
    bool record_dual_objective = false;
    // At the sweep cap, try an exact active-set solve before giving up.
    bool active_set_fallback = true;
};

struct ProjectionResult {
    GradientVector projected;
    Eigen::VectorXd dual;             // multipliers v >= 0, projected = g + rows^T v
    std::size_t sweeps = 0;
    std::vector<double> dual_objective;  // per sweep, when recorded
};

/// Largest violation max_i -<v, g_i> / (|v| |g_i|), or 0 when feasible.
inline double feasibility_residual(const Eigen::VectorXd& v, const ConstraintSet& cs) {
    double worst = 0.0;
    const double nv = v.norm();
    for (Eigen::Index i = 0; i < cs.count(); ++i) {
        const double denom = nv * cs.rows.row(i).norm();
        if (denom == 0.0) continue;
        worst = std::max(worst, -cs.rows.row(i).dot(v) / denom);
    }
    return worst;
}

namespace detail {

inline double dual_objective(const Eigen::MatrixXd& q, const Eigen::VectorXd& p, const Eigen::VectorXd& v) {
    return 0.5 * v.dot(q * v) + p.dot(v);
}

// Given the support found by coordinate descent, solve the reduced system
// exactly and keep the result if it satisfies the KKT conditions.
inline void polish(const Eigen::MatrixXd& q, const Eigen::VectorXd& p, Eigen::VectorXd& v) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] > 0.0) active.push_back(i);
    }
    if (active.empty()) return;
    const auto k = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd qa(k, k);
    Eigen::VectorXd pa(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        pa[a] = p[active[a]];
        for (Eigen::Index b = 0; b < k; ++b) qa(a, b) = q(active[a], active[b]);
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(qa);
    if (ldlt.info() != Eigen::Success) return;
    const Eigen::VectorXd va = ldlt.solve(-pa);
    if (!va.allFinite() || (va.array() < 0.0).any()) return;
    Eigen::VectorXd candidate = Eigen::VectorXd::Zero(v.size());
    for (Eigen::Index a = 0; a < k; ++a) candidate[active[a]] = va[a];
    if (dual_objective(q, p, candidate) <= dual_objective(q, p, v)) v = candidate;
}

// Lawson-Hanson active-set method for min 1/2 v'qv + p'v, v >= 0, started
// from v = 0. `kkt_tol[i]` bounds the admissible negative gradient entry i.
// Returns false if a subproblem is singular or the iteration budget runs out.
inline bool active_set_solve(const Eigen::MatrixXd& q, const Eigen::VectorXd& p, const Eigen::VectorXd& kkt_tol,
                             Eigen::VectorXd& v) {
    const Eigen::Index m = q.rows();
    v = Eigen::VectorXd::Zero(m);
    std::vector<char> passive(static_cast<std::size_t>(m), 0);
    const auto solve_passive = [&](Eigen::VectorXd& s) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
        }
        const auto k = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd qa(k, k);
        Eigen::VectorXd pa(k);
        for (Eigen::Index a = 0; a < k; ++a) {
            pa[a] = p[idx[a]];
            for (Eigen::Index b = 0; b < k; ++b) qa(a, b) = q(idx[a], idx[b]);
        }
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(qa);
        if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all()) return false;
        const Eigen::VectorXd sa = ldlt.solve(-pa);
        if (!sa.allFinite()) return false;
        s = Eigen::VectorXd::Zero(m);
        for (Eigen::Index a = 0; a < k; ++a) s[idx[a]] = sa[a];
        return true;
    };
    for (Eigen::Index outer = 0; outer < 3 * m + 10; ++outer) {
        const Eigen::VectorXd w = -(q * v + p);
        Eigen::Index enter = -1;
        double best = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (!passive[static_cast<std::size_t>(i)] && w[i] > kkt_tol[i] && w[i] > best) {
                best = w[i];
                enter = i;
            }
        }
        if (enter < 0) return true;
        passive[static_cast<std::size_t>(enter)] = 1;
        Eigen::VectorXd s;
        for (Eigen::Index inner = 0;; ++inner) {
            if (inner > m || !solve_passive(s)) return false;
            double alpha = 1.0;
            bool clipped = false;
            for (Eigen::Index i = 0; i < m; ++i) {
                if (passive[static_cast<std::size_t>(i)] && s[i] <= 0.0) {
                    alpha = std::min(alpha, v[i] / (v[i] - s[i]));
                    clipped = true;
                }
            }
            if (!clipped) break;
            v += alpha * (s - v);
            for (Eigen::Index i = 0; i < m; ++i) {
                if (passive[static_cast<std::size_t>(i)] && v[i] <= 0.0) {
                    passive[static_cast<std::size_t>(i)] = 0;
                    v[i] = 0.0;
                }
            }
        }
        v = s;
    }
    return false;
}

}  // namespace detail

/// Euclidean projection of g onto the cone { v : <v, g_i> >= 0 }.
///
/// Solves the dual  min_{v >= 0} 1/2 v'(G G')v + (G g)'v  by cyclic
/// coordinate descent with exact clamped coordinate minimization, then
/// returns g + G'v.
inline ProjectionResult project_gradient(const GradientVector& g, const ConstraintSet& cs,
                                         const ProjectionOptions& opt = {}) {
    if (cs.count() > 0 && cs.dimension() != g.size()) throw ShapeError("constraint dimension differs from gradient");
    ProjectionResult res;
    const Eigen::Index m = cs.count();
    res.dual = Eigen::VectorXd::Zero(m);
    res.projected = g;
    if (m == 0) return res;

    const Eigen::MatrixXd q = cs.rows * cs.rows.transpose();
    const Eigen::VectorXd p = cs.rows * g.values;
    if ((p.array() >= 0.0).all()) return res;  // already feasible: v = 0

    for (Eigen::Index i = 0; i < m; ++i) {
        if (!(q(i, i) > 0.0)) throw DegenerateVectorError("zero constraint gradient in projection");
    }
    const auto cap = static_cast<std::size_t>(std::max(10.0, opt.max_sweeps_factor * static_cast<double>(m * m)));
    Eigen::VectorXd grad = p;  // q v + p
    Eigen::VectorXd& v = res.dual;
    double largest = 0.0;
    for (res.sweeps = 1; res.sweeps <= cap; ++res.sweeps) {
        largest = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double vi = std::max(0.0, v[i] - grad[i] / q(i, i));
            const double step = vi - v[i];
            if (step != 0.0) {
                grad += step * q.col(i);
                v[i] = vi;
                largest = std::max(largest, std::abs(step));
            }
        }
        if (opt.record_dual_objective) res.dual_objective.push_back(detail::dual_objective(q, p, v));
        if (largest < opt.tol) break;
    }
    if (res.sweeps > cap) {
        res.sweeps = cap;
        Eigen::VectorXd exact;
        // gradient entry i is <g_i, projected>; allow a tiny normalized violation
        const Eigen::VectorXd kkt_tol = 1e-12 * q.diagonal().cwiseSqrt() * g.values.norm();
        if (!opt.active_set_fallback || !detail::active_set_solve(q, p, kkt_tol, exact)) {
            throw ConvergenceError("gradient projection did not converge", largest);
        }
        v = exact;
        res.projected.values = g.values + cs.rows.transpose() * v;
        return res;
    }

    detail::polish(q, p, v);
    res.projected.values = g.values + cs.rows.transpose() * v;
    return res;
}

}  // namespace gss::training
