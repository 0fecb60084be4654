#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gss/model/evaluate.hpp"
#include "gss/model/mlp.hpp"
#include "gss/selection/strategy.hpp"
#include "gss/streams/streams.hpp"
#include "gss/training/projection.hpp"

namespace gss::training {

enum class UpdateMode { rehearsal, constrained };

inline std::string to_string(UpdateMode m) { return m == UpdateMode::rehearsal ? "rehearsal" : "constrained"; }

struct TrainConfig {
    std::size_t batch_size = 10;
    std::size_t iterations_per_batch = 1;
    double learning_rate = 0.05;
    std::size_t rehearsal_batch_size = 10;
    UpdateMode update_mode = UpdateMode::rehearsal;
    std::size_t eval_interval = 100;
    std::uint64_t seed = 0;
    bool freeze_rehearsal_draw = false;  // reuse the first rehearsal draw for every iteration on a batch
    ProjectionOptions projection;

    void validate() const {
        if (batch_size == 0) throw ConfigError("batch_size must be positive");
        if (iterations_per_batch < 1) throw ConfigError("iterations_per_batch must be at least 1");
        if (eval_interval < batch_size) throw ConfigError("eval_interval must be at least batch_size");
    }
};

/// Replay by mixing: each iteration takes one SGD step on the mean gradient
/// over the incoming batch joined with a fresh draw from the buffer.
inline void rehearsal_update(model::MlpModel& model, std::span<const Example> incoming,
                             const selection::ScoredBuffer& buffer, const TrainConfig& cfg, Rng& rng) {
    std::vector<Example> replay;
    for (std::size_t it = 0; it < cfg.iterations_per_batch; ++it) {
        if (it == 0 || !cfg.freeze_rehearsal_draw) replay = selection::rehearsal_sample(buffer, cfg.rehearsal_batch_size, rng);
        std::vector<Example> combined(incoming.begin(), incoming.end());
        combined.insert(combined.end(), replay.begin(), replay.end());
        if (combined.empty()) return;
        model::sgd_step(model, model::batch_gradient(model, combined), cfg.learning_rate);
    }
}

struct ConstrainedReport {
    double max_residual = 0.0;  // worst normalized constraint violation after projection
    std::size_t projections = 0;
};

/// Gradient of the incoming batch projected onto the cone of directions that
/// do not increase the loss of any buffer member (first order), recomputing
/// every member gradient at the current parameters.
inline ConstrainedReport constrained_update(model::MlpModel& model, std::span<const Example> incoming,
                                           const selection::ScoredBuffer& buffer, const TrainConfig& cfg) {
    ConstrainedReport report;
    if (incoming.empty()) return report;
    for (std::size_t it = 0; it < cfg.iterations_per_batch; ++it) {
        GradientVector g = model::batch_gradient(model, incoming);
        std::vector<GradientVector> rows;
        rows.reserve(buffer.size());
        for (const auto& slot : buffer.slots()) {
            auto gi = model::example_gradient(model, slot.example);
            // a member with vanishing loss gradient imposes no constraint
            if (gi.values.norm() > geometry::kEpsilonNorm) rows.push_back(std::move(gi));
        }
        const ConstraintSet cs(rows, g.size());
        const auto proj = project_gradient(g, cs, cfg.projection);
        report.max_residual = std::max(report.max_residual, feasibility_residual(proj.projected.values, cs));
        ++report.projections;
        model::sgd_step(model, proj.projected, cfg.learning_rate);
    }
    return report;
}

struct MetricPoint {
    std::size_t examples_seen = 0;
    int task_id = -1;  // -1: mean over tasks
    double accuracy = 0.0;
};

struct RunResult {
    std::vector<MetricPoint> timeline;
    std::vector<selection::Slot> final_buffer;
    double max_feasibility_residual = 0.0;

    /// Accuracies at the last evaluation, by task (-1 for the task mean).
    std::vector<MetricPoint> final_metrics() const {
        std::vector<MetricPoint> out;
        if (timeline.empty()) return out;
        const auto last = timeline.back().examples_seen;
        for (const auto& p : timeline) {
            if (p.examples_seen == last) out.push_back(p);
        }
        return out;
    }

    std::optional<double> final_average() const {
        for (const auto& p : final_metrics()) {
            if (p.task_id < 0) return p.accuracy;
        }
        return std::nullopt;
    }
};

inline void record_evaluation(const model::MlpModel& model, const streams::EvaluationSet& eval, std::size_t seen,
                              std::vector<MetricPoint>& out) {
    if (eval.examples.empty()) return;
    const auto ev = model::evaluate(model, eval.examples, eval.task_of);
    for (const auto& [task, acc] : ev.per_group) out.push_back({seen, task, acc});
    out.push_back({seen, -1, ev.group_mean});
}

/// Strictly sequential online pass. For every batch the model is updated
/// against the buffer as it stood before the batch arrived, then each
/// example is offered to the strategy with gradients at the post-update
/// parameters. Evaluates every eval_interval examples and at stream end.
inline RunResult run_online(const streams::TaskStream& stream, selection::SelectionStrategy& strategy,
                            model::MlpModel& model, const TrainConfig& cfg, Rng& rng) {
    cfg.validate();
    if (stream.batch_size() > cfg.batch_size) throw ConfigError("stream batches exceed the configured batch size");
    RunResult result;
    std::size_t seen = 0;
    std::size_t last_eval = 0;
    for (std::size_t b = 0; b < stream.batch_count(); ++b) {
        const auto batch = stream.batch(b);
        if (cfg.update_mode == UpdateMode::rehearsal) {
            rehearsal_update(model, batch, strategy.buffer(), cfg, rng);
        } else {
            const auto rep = constrained_update(model, batch, strategy.buffer(), cfg);
            result.max_feasibility_residual = std::max(result.max_feasibility_residual, rep.max_residual);
        }
        const selection::MlpContext ctx(model);
        strategy.observe(batch, ctx, rng);
        seen += batch.size();
        if (seen / cfg.eval_interval > last_eval / cfg.eval_interval) {
            record_evaluation(model, stream.evaluation(), seen, result.timeline);
            last_eval = seen;
        }
    }
    if (seen > 0 && last_eval != seen) record_evaluation(model, stream.evaluation(), seen, result.timeline);
    result.final_buffer = strategy.buffer().slots();
    return result;
}

}  // namespace gss::training
