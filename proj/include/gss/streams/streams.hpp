#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gss/errors.hpp"
#include "gss/selection/buffer.hpp"
#include "gss/streams/dataset.hpp"

namespace gss::streams {

/// Test examples with the task each belongs to, for per-task accuracy.
struct EvaluationSet {
    ExampleList examples;
    std::vector<int> task_of;
    std::size_t n_tasks = 0;
};

/// An ordered, immutable training stream.
///
/// Learners and strategies only ever receive `batch(i)`, i.e. spans of
/// (features, label) examples. The task each training example was drawn
/// from is kept apart in `hidden_task_ids()`, which exists for analysis and
/// evaluation only.
class TaskStream {
public:
    TaskStream() = default;
    TaskStream(ExampleList examples, std::vector<int> task_ids, std::size_t batch_size, EvaluationSet eval)
        : examples_(std::move(examples)), task_ids_(std::move(task_ids)), batch_size_(batch_size),
          eval_(std::move(eval)) {
        if (batch_size_ == 0) throw ValueError("batch size must be positive");
        if (task_ids_.size() != examples_.size()) throw ShapeError("one task id per stream example required");
        for (std::size_t i = 0; i < examples_.size(); ++i) examples_[i].stream_index = static_cast<std::int64_t>(i);
    }

    std::size_t size() const { return examples_.size(); }
    std::size_t batch_size() const { return batch_size_; }
    std::size_t batch_count() const { return (examples_.size() + batch_size_ - 1) / batch_size_; }

    std::span<const Example> batch(std::size_t i) const {
        const std::size_t begin = i * batch_size_;
        const std::size_t end = std::min(begin + batch_size_, examples_.size());
        return std::span<const Example>(examples_).subspan(begin, end - begin);
    }

    std::span<const Example> examples() const { return examples_; }
    const std::vector<int>& hidden_task_ids() const { return task_ids_; }
    const EvaluationSet& evaluation() const { return eval_; }

    /// Same examples in the same order with different hidden task ids.
    TaskStream with_task_ids(std::vector<int> ids) const {
        return TaskStream(examples_, std::move(ids), batch_size_, eval_);
    }

private:
    ExampleList examples_;
    std::vector<int> task_ids_;
    std::size_t batch_size_ = 10;
    EvaluationSet eval_;
};

namespace detail {

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(v[i - 1], v[pick(rng)]);
    }
}

inline std::vector<std::vector<int>> contiguous_label_groups(std::size_t num_classes, std::size_t n_tasks) {
    if (n_tasks == 0 || num_classes % n_tasks != 0) {
        throw DataError(std::to_string(num_classes) + " classes cannot be split into " + std::to_string(n_tasks) +
                        " equal contiguous label groups");
    }
    const std::size_t per = num_classes / n_tasks;
    std::vector<std::vector<int>> groups(n_tasks);
    for (std::size_t c = 0; c < num_classes; ++c) groups[c / per].push_back(static_cast<int>(c));
    return groups;
}

// Shuffled indices of train examples per label group.
inline std::vector<std::vector<std::size_t>> task_pools(const Dataset& ds, std::size_t n_tasks, Rng& rng) {
    const auto groups = contiguous_label_groups(ds.num_classes, n_tasks);
    const std::size_t per = ds.num_classes / n_tasks;
    std::vector<std::vector<std::size_t>> pools(n_tasks);
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
        pools[static_cast<std::size_t>(ds.train[i].label) / per].push_back(i);
    }
    for (auto& p : pools) shuffle(p, rng);
    return pools;
}

inline EvaluationSet label_group_evaluation(const Dataset& ds, std::size_t n_tasks) {
    const std::size_t per = ds.num_classes / n_tasks;
    EvaluationSet ev;
    ev.examples = ds.test;
    ev.n_tasks = n_tasks;
    for (const auto& ex : ds.test) ev.task_of.push_back(ex.label / static_cast<int>(per));
    return ev;
}

struct DrawnTasks {
    std::vector<std::vector<std::size_t>> chosen;    // per task, in stream order
    std::vector<std::vector<std::size_t>> leftover;  // per task, unused pool members
};

inline DrawnTasks draw_tasks(const Dataset& ds, std::span<const std::size_t> counts, Rng& rng) {
    auto pools = task_pools(ds, counts.size(), rng);
    DrawnTasks out;
    for (std::size_t t = 0; t < counts.size(); ++t) {
        if (pools[t].size() < counts[t]) {
            throw DataError("task " + std::to_string(t) + " needs " + std::to_string(counts[t]) +
                            " examples, only " + std::to_string(pools[t].size()) + " available");
        }
        out.chosen.emplace_back(pools[t].begin(), pools[t].begin() + static_cast<std::ptrdiff_t>(counts[t]));
        out.leftover.emplace_back(pools[t].begin() + static_cast<std::ptrdiff_t>(counts[t]), pools[t].end());
    }
    return out;
}

inline TaskStream assemble(const Dataset& ds, const DrawnTasks& drawn, std::size_t n_tasks, std::size_t batch_size,
                           const std::vector<std::vector<int>>* origin = nullptr) {
    ExampleList examples;
    std::vector<int> ids;
    for (std::size_t t = 0; t < drawn.chosen.size(); ++t) {
        for (std::size_t k = 0; k < drawn.chosen[t].size(); ++k) {
            examples.push_back(ds.train[drawn.chosen[t][k]]);
            ids.push_back(origin ? (*origin)[t][k] : static_cast<int>(t));
        }
    }
    return TaskStream(std::move(examples), std::move(ids), batch_size, label_group_evaluation(ds, n_tasks));
}

}  // namespace detail

/// Tasks are contiguous label groups presented one after another; each
/// task's examples are shuffled.
inline TaskStream disjoint_stream(const Dataset& ds, std::size_t n_tasks, std::size_t per_task_train, Rng& rng,
                                  std::size_t batch_size = 10) {
    const std::vector<std::size_t> counts(n_tasks, per_task_train);
    return detail::assemble(ds, detail::draw_tasks(ds, counts, rng), n_tasks, batch_size);
}

/// Disjoint ordering where task `heavy_task` contributes heavy_count examples
/// and every other task light_count.
inline TaskStream imbalanced_stream(const Dataset& ds, std::size_t n_tasks, std::size_t heavy_task,
                                    std::size_t heavy_count, std::size_t light_count, Rng& rng,
                                    std::size_t batch_size = 10) {
    if (heavy_task >= n_tasks) throw ValueError("heavy task index out of range");
    std::vector<std::size_t> counts(n_tasks, light_count);
    counts[heavy_task] = heavy_count;
    return detail::assemble(ds, detail::draw_tasks(ds, counts, rng), n_tasks, batch_size);
}

/// Disjoint stream in which a swap_fraction of every task segment is
/// replaced by examples drawn from the other tasks' unused pools, placed at
/// uniformly random positions within the segment.
inline TaskStream blurry_stream(const Dataset& ds, std::size_t n_tasks, double swap_fraction,
                                std::size_t per_task_train, Rng& rng, std::size_t batch_size = 10) {
    if (!(swap_fraction >= 0.0 && swap_fraction < 1.0)) throw ValueError("swap fraction must lie in [0, 1)");
    const std::vector<std::size_t> counts(n_tasks, per_task_train);
    auto drawn = detail::draw_tasks(ds, counts, rng);
    const auto n_swap = static_cast<std::size_t>(std::llround(swap_fraction * static_cast<double>(per_task_train)));
    if (n_swap == 0) return detail::assemble(ds, drawn, n_tasks, batch_size);

    std::vector<std::vector<int>> origin(n_tasks);
    for (std::size_t t = 0; t < n_tasks; ++t) {
        // release the tail of this task's own draw back to its pool
        for (std::size_t k = per_task_train - n_swap; k < per_task_train; ++k) drawn.leftover[t].push_back(drawn.chosen[t][k]);
        drawn.chosen[t].resize(per_task_train - n_swap);
        origin[t].assign(drawn.chosen[t].size(), static_cast<int>(t));

        std::vector<std::pair<std::size_t, std::size_t>> others;  // (task, position in leftover)
        for (std::size_t u = 0; u < n_tasks; ++u) {
            if (u == t) continue;
            for (std::size_t k = 0; k < drawn.leftover[u].size(); ++k) others.emplace_back(u, k);
        }
        if (others.size() < n_swap) throw DataError("not enough spare examples to blur task " + std::to_string(t));
        const auto picks = selection::sample_indices(others.size(), n_swap, rng);
        std::vector<std::pair<std::size_t, std::size_t>> taken;
        for (auto p : picks) taken.push_back(others[p]);
        for (const auto& [u, k] : taken) {
            drawn.chosen[t].push_back(drawn.leftover[u][k]);
            origin[t].push_back(static_cast<int>(u));
        }
        // drop taken entries from the leftover pools, highest position first
        std::sort(taken.begin(), taken.end(), [](auto a, auto b) { return a.second > b.second; });
        for (const auto& [u, k] : taken) drawn.leftover[u].erase(drawn.leftover[u].begin() + static_cast<std::ptrdiff_t>(k));

        std::vector<std::size_t> order(drawn.chosen[t].size());
        std::iota(order.begin(), order.end(), 0);
        detail::shuffle(order, rng);
        std::vector<std::size_t> seg;
        std::vector<int> seg_origin;
        for (auto o : order) {
            seg.push_back(drawn.chosen[t][o]);
            seg_origin.push_back(origin[t][o]);
        }
        drawn.chosen[t] = std::move(seg);
        origin[t] = std::move(seg_origin);
    }
    return detail::assemble(ds, drawn, n_tasks, batch_size, &origin);
}

/// Task j applies permutations[j] to every feature vector:
/// permuted[k] = original[permutations[j][k]]. The evaluation set is the
/// test split under every permutation.
inline TaskStream permuted_stream_with(const Dataset& ds, const std::vector<std::vector<std::size_t>>& permutations,
                                       std::size_t per_task_train, Rng& rng, std::size_t batch_size = 10) {
    const auto apply = [](const Example& ex, const std::vector<std::size_t>& perm) {
        Example out = ex;
        for (std::size_t k = 0; k < perm.size(); ++k) {
            out.features[static_cast<Eigen::Index>(k)] = ex.features[static_cast<Eigen::Index>(perm[k])];
        }
        return out;
    };
    for (const auto& perm : permutations) {
        auto sorted = perm;
        std::sort(sorted.begin(), sorted.end());
        bool ok = sorted.size() == ds.input_dim;
        for (std::size_t k = 0; ok && k < sorted.size(); ++k) ok = sorted[k] == k;
        if (!ok) throw ValueError("not a permutation of the inputs");
    }
    if (per_task_train > ds.train.size()) throw DataError("not enough training examples per permuted task");
    ExampleList examples;
    std::vector<int> ids;
    EvaluationSet ev;
    ev.n_tasks = permutations.size();
    for (std::size_t t = 0; t < permutations.size(); ++t) {
        for (auto i : selection::sample_indices(ds.train.size(), per_task_train, rng)) {
            examples.push_back(apply(ds.train[i], permutations[t]));
            ids.push_back(static_cast<int>(t));
        }
        for (const auto& ex : ds.test) {
            ev.examples.push_back(apply(ex, permutations[t]));
            ev.task_of.push_back(static_cast<int>(t));
        }
    }
    return TaskStream(std::move(examples), std::move(ids), batch_size, std::move(ev));
}

/// Seeded permutations: task 0 keeps the natural pixel order.
inline std::vector<std::vector<std::size_t>> make_permutations(std::size_t dim, std::size_t n_tasks, Rng& rng) {
    std::vector<std::vector<std::size_t>> perms;
    for (std::size_t t = 0; t < n_tasks; ++t) {
        std::vector<std::size_t> p(dim);
        std::iota(p.begin(), p.end(), 0);
        if (t > 0) detail::shuffle(p, rng);
        perms.push_back(std::move(p));
    }
    return perms;
}

inline TaskStream permuted_stream(const Dataset& ds, std::size_t n_tasks, std::size_t per_task_train, Rng& rng,
                                  std::size_t batch_size = 10) {
    const auto perms = make_permutations(ds.input_dim, n_tasks, rng);
    return permuted_stream_with(ds, perms, per_task_train, rng, batch_size);
}

}  // namespace gss::streams
