// Acceptance gate: one PASS/FAIL line per criterion, each with its pinned
// tolerance and runtime limit. Exit status is nonzero if any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "oracles.hpp"

using gss::Rng;
using Eigen::VectorXd;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

gss::geometry::GradientSet gaussian_set(std::size_t m, Eigen::Index d, Rng& rng) {
    std::vector<VectorXd> vs;
    for (std::size_t i = 0; i < m; ++i) vs.push_back(oracle::random_vector(d, rng));
    return gss::geometry::GradientSet(std::move(vs));
}

Outcome identity_suite() {
    constexpr double kTol = 1e-10;
    Rng rng(101);
    std::uniform_int_distribution<std::size_t> msize(1, 50);
    std::uniform_int_distribution<Eigen::Index> dsize(1, 500);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto m = msize(rng);
        const auto set = gaussian_set(m, dsize(rng), rng);
        const double s = gss::geometry::surrogate(set);
        VectorXd mean = VectorXd::Zero(set.dimension());
        for (const auto& v : set.vectors()) mean += v / v.norm();
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (const auto& v : set.vectors()) var += (v / v.norm() - mean).squaredNorm();
        var /= static_cast<double>(m);
        worst = std::max(worst, std::abs(gss::geometry::direction_variance(set) - (1.0 - s / double(m * m))));
        worst = std::max(worst, std::abs(var - (1.0 - s / double(m * m))));
    }
    return {worst < kTol, fmt("max deviation %.3g (tol 1e-10)", worst)};
}

Outcome gradient_checks() {
    constexpr double kTol = 1e-4;
    Rng rng(202);
    std::uniform_int_distribution<std::size_t> width(2, 12), classes(2, 6);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t in = width(rng), k = classes(rng);
        auto m = gss::model::MlpModel::random({in, width(rng), width(rng), k}, rng);
        const auto ex = oracle::random_example(in, static_cast<int>(k), rng);
        const auto g = gss::model::example_gradient(m, ex);
        for (auto j : gss::selection::sample_indices(m.parameter_count(), 10, rng)) {
            const double fd = oracle::finite_difference(m, ex, j, 1e-5);
            const double an = g.values[static_cast<Eigen::Index>(j)];
            worst = std::max(worst, std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-6}));
        }
    }
    return {worst < kTol, fmt("max relative error %.3g over 200 pairs (tol 1e-4)", worst)};
}

Outcome monotonicity() {
    Rng rng(1);
    const auto res = gss::geometry::correlation_experiment(200, 4, 100, 100000, rng);
    if (!res.rho) return {false, "rho undefined"};
    return {*res.rho >= 0.9, fmt("spearman rho %.4f (need >= 0.9)", *res.rho)};
}

Outcome analytic_angles() {
    constexpr std::uint64_t n = 1000000;
    const auto within = [&](const gss::geometry::GradientSet& set, double p, std::uint64_t seed, double& z) {
        Rng rng(seed);
        const auto est = gss::geometry::solid_angle_mc(set, n, rng);
        z = std::abs(est.fraction - p) / std::sqrt(p * (1 - p) / n);
        return z <= 3.0;
    };
    VectorXd a(3), b(3), c(3), d(3);
    a << 1, 2, 3;
    b << 1, 0, 0;
    c << 0, 1, 0;
    d << std::cos(std::numbers::pi / 3), std::sin(std::numbers::pi / 3), 0;
    double z1, z2, z3;
    const bool ok = within(gss::geometry::GradientSet({a, 2.0 * a}), 0.5, 11, z1) &
                    within(gss::geometry::GradientSet({b, c}), 0.25, 12, z2) &
                    within(gss::geometry::GradientSet({b, d}), 1.0 / 3.0, 13, z3);
    return {ok, fmt("|z| = %.2f, %.2f, %.2f (need <= 3)", z1, z2, z3)};
}

Outcome iqp_oracle() {
    Rng gen(505);
    gss::selection::IqpOptions local;
    local.enumeration_limit = 0;
    int optimal = 0, worse_than_opt_violations = 0;
    for (int t = 0; t < 100; ++t) {
        std::vector<VectorXd> vecs;
        std::vector<gss::GradientVector> grads;
        for (int i = 0; i < 10; ++i) {
            vecs.push_back(oracle::random_vector(30, gen));
            grads.push_back({vecs.back()});
        }
        const double best = oracle::min_subset_surrogate(vecs, 3);
        Rng rng(static_cast<std::uint64_t>(t));
        const double got = gss::selection::iqp_select(grads, 3, local, rng).objective;
        optimal += std::abs(got - best) < 1e-10;
        worse_than_opt_violations += got < best - 1e-10;
    }
    return {optimal >= 95 && worse_than_opt_violations == 0,
            fmt("optimum reached in %.0f/100, below-optimum %.0f (need >= 95, 0)", optimal,
                worse_than_opt_violations)};
}

Outcome projection_oracle() {
    Rng rng(606);
    double worst_gap = 0.0, worst_res = 0.0;
    for (int t = 0; t < 50; ++t) {
        Eigen::MatrixXd rows(3, 6);
        for (Eigen::Index i = 0; i < 3; ++i) rows.row(i) = oracle::random_vector(6, rng).transpose();
        const VectorXd g = oracle::random_vector(6, rng);
        const gss::training::ConstraintSet cs(rows);
        const auto got = gss::training::project_gradient({g}, cs).projected.values;
        worst_gap = std::max(worst_gap, (got - oracle::project_by_enumeration(g, rows)).norm());
        worst_res = std::max(worst_res, gss::training::feasibility_residual(got, cs));
    }
    return {worst_gap <= 1e-6 && worst_res <= 1e-6,
            fmt("max gap %.3g, max residual %.3g (tol 1e-6)", worst_gap, worst_res)};
}

Outcome reservoir_uniformity() {
    const int t = 1000, m = 100, trials = 20000;
    std::vector<int> held(t, 0);
    Rng rng(707);
    for (int k = 0; k < trials; ++k) {
        gss::selection::ScoredBuffer buf(m);
        for (int i = 0; i < t; ++i) {
            gss::selection::reservoir_observe(buf, {VectorXd(), 0, i}, rng);
        }
        for (const auto& s : buf.slots()) ++held[static_cast<std::size_t>(s.example.stream_index)];
    }
    const double p = double(m) / t, sigma = std::sqrt(p * (1 - p) / trials);
    double worst = 0.0;
    for (int h : held) worst = std::max(worst, std::abs(h / double(trials) - p) / sigma);
    return {worst <= 4.0, fmt("max |z| %.2f over all %.0f items (need <= 4)", worst, t)};
}

gss::harness::ExperimentConfig desk_config() {
    auto cfg = gss::harness::parse_config("");
    cfg.seeds = {1, 2, 3};
    cfg.train.iterations_per_batch = 5;
    return cfg;
}

Outcome disjoint_direction() {
    auto cfg = desk_config();
    cfg.benchmark = "disjoint";
    cfg.per_task_train = 200;
    cfg.buffer_size = 100;
    cfg.strategies = {"rand", "gss-greedy", "gss-iqp"};
    const auto res = gss::harness::run_experiment(cfg);
    if (!res.ok()) return {false, res.failures.front().message};
    const double r = 100 * *res.mean_average("rand"), g = 100 * *res.mean_average("gss-greedy"),
                 q = 100 * *res.mean_average("gss-iqp");
    return {g - r >= 10.0 && q - r >= 10.0, fmt("greedy %.1f, iqp %.1f, rand %.1f (margins >= 10)", g, q, r)};
}

Outcome imbalanced_direction() {
    double greedy = 0.0, reservoir = 0.0;
    for (std::size_t heavy = 0; heavy < 5; ++heavy) {
        auto cfg = desk_config();
        cfg.benchmark = "imbalanced";
        cfg.heavy_task = heavy;
        cfg.heavy_count = 200;
        cfg.light_count = 20;
        cfg.buffer_size = 30;
        cfg.strategies = {"gss-greedy", "reservoir"};
        const auto res = gss::harness::run_experiment(cfg);
        if (!res.ok()) return {false, res.failures.front().message};
        greedy += 100 * *res.mean_average("gss-greedy") / 5.0;
        reservoir += 100 * *res.mean_average("reservoir") / 5.0;
    }
    return {greedy - reservoir >= 3.0, fmt("greedy %.1f vs reservoir %.1f (margin >= 3)", greedy, reservoir)};
}

Outcome constrained_direction() {
    auto cfg = desk_config();
    cfg.per_task_train = 200;
    cfg.buffer_size = 100;
    cfg.strategies = {"gss-iqp"};
    const auto rehearsal = gss::harness::run_experiment(cfg);
    cfg.train.update_mode = gss::training::UpdateMode::constrained;
    const auto constrained = gss::harness::run_experiment(cfg);
    if (!rehearsal.ok()) return {false, rehearsal.failures.front().message};
    if (!constrained.ok()) return {false, constrained.failures.front().message};
    double residual = 0.0;
    for (const auto& r : constrained.runs) residual = std::max(residual, r.result.max_feasibility_residual);
    const double a = 100 * *rehearsal.mean_average("gss-iqp"), b = 100 * *constrained.mean_average("gss-iqp");
    return {b >= a - 2.0 && residual <= 1e-6,
            fmt("constrained %.1f vs rehearsal %.1f (need >= -2), residual %.3g (tol 1e-6)", b, a, residual)};
}

Outcome task_blindness() {
    auto cfg = desk_config();
    cfg.per_task_train = 60;
    cfg.buffer_size = 20;
    cfg.train.iterations_per_batch = 1;
    const auto ds = gss::streams::load_bundled_digits();
    const auto stream = gss::harness::build_stream(cfg, ds, 1);
    auto ids = stream.hidden_task_ids();
    Rng shuffle_rng(11);
    std::shuffle(ids.begin(), ids.end(), shuffle_rng);
    const auto relabeled = stream.with_task_ids(ids);
    int identical = 0;
    for (auto name : gss::selection::kStrategyNames) {
        auto run = [&](const gss::streams::TaskStream& s) {
            auto m = gss::harness::build_model(cfg, ds, 1);
            auto strat = gss::selection::make_strategy(name, cfg.buffer_size, cfg.strategy_options);
            Rng rng(5);
            const auto res = gss::training::run_online(s, *strat, m, cfg.train, rng);
            return std::make_pair(m.flatten(), gss::harness::buffer_csv(res.final_buffer));
        };
        const auto a = run(stream), b = run(relabeled);
        identical += a.first == b.first && a.second == b.second;
    }
    return {identical == 6, fmt("%.0f/6 strategies bit-identical", identical)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "direction-variance identity", 5, identity_suite},
        {2, "gradient finite differences", 30, gradient_checks},
        {3, "surrogate vs solid angle monotonicity", 300, monotonicity},
        {4, "solid-angle analytic cases", 60, analytic_angles},
        {5, "IQP local search vs enumeration", 120, iqp_oracle},
        {6, "projection vs active-set enumeration", 60, projection_oracle},
        {7, "reservoir inclusion uniformity", 120, reservoir_uniformity},
        {8, "disjoint: greedy/iqp beat rand", 900, disjoint_direction},
        {9, "imbalanced: greedy beats reservoir", 1200, imbalanced_direction},
        {10, "constrained vs rehearsal update", 1200, constrained_direction},
        {11, "task-blindness", 60, task_blindness},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = o.pass && secs < c.limit_s;
        failed += !ok;
        std::printf("[%s] %2d %s: %s; %.1f s (limit %.0f s)\n", ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs, c.limit_s);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
