#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gss/errors.hpp"
#include "gss/model/example.hpp"
#include "gss/model/mlp.hpp"

namespace gss {

using Rng = std::mt19937_64;

}  // namespace gss

namespace gss::selection {

struct Slot {
    Example example;
    double score = 0.0;  // greedy score in [0, 2]; other strategies leave it at 0
};

/// Fixed-capacity replay memory.
class ScoredBuffer {
public:
    explicit ScoredBuffer(std::size_t capacity = 0) : capacity_(capacity) { slots_.reserve(capacity); }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return slots_.size(); }
    bool empty() const { return slots_.empty(); }
    bool full() const { return slots_.size() >= capacity_; }
    std::uint64_t seen_count() const { return seen_; }

    const std::vector<Slot>& slots() const { return slots_; }
    const Slot& operator[](std::size_t i) const { return slots_[i]; }

    void note_seen(std::uint64_t n = 1) { seen_ += n; }

    std::size_t append(Example ex, double score = 0.0) {
        if (full()) throw Error("append to a full buffer");
        slots_.push_back({std::move(ex), score});
        return slots_.size() - 1;
    }

    void replace(std::size_t i, Example ex, double score = 0.0) { slots_.at(i) = {std::move(ex), score}; }

    /// Swap in a new slot set, e.g. after a reselection. Must respect capacity.
    void reset_slots(std::vector<Slot> slots) {
        if (slots.size() > capacity_) throw Error("reset_slots beyond capacity");
        slots_ = std::move(slots);
    }

    double score_sum() const {
        double s = 0.0;
        for (const auto& slot : slots_) s += slot.score;
        return s;
    }

    std::vector<Example> examples() const {
        std::vector<Example> out;
        out.reserve(slots_.size());
        for (const auto& s : slots_) out.push_back(s.example);
        return out;
    }

private:
    std::size_t capacity_;
    std::vector<Slot> slots_;
    std::uint64_t seen_ = 0;
};

/// Staging area filled between reselections.
struct RecentBuffer {
    std::size_t capacity = 50;
    std::vector<Example> pending;

    bool full() const { return pending.size() >= capacity; }
};

struct Mutation {
    enum class Kind { appended, replaced, discarded, staged, reselected };
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    Kind kind = Kind::discarded;
    std::size_t slot = npos;  // slot written by appended/replaced; slot of the newcomer after a reselection

    static Mutation appended(std::size_t i) { return {Kind::appended, i}; }
    static Mutation replaced(std::size_t i) { return {Kind::replaced, i}; }
    static Mutation discarded() { return {Kind::discarded, npos}; }
    static Mutation staged() { return {Kind::staged, npos}; }
    static Mutation reselected(std::size_t i = npos) { return {Kind::reselected, i}; }
};

/// Model-dependent quantities a strategy may ask for, always evaluated at
/// the parameters current at the time of the call.
class ModelContext {
public:
    virtual ~ModelContext() = default;
    virtual GradientVector gradient(const Example& ex) const = 0;
    virtual Eigen::VectorXd features(const Example& ex) const = 0;
};

class MlpContext final : public ModelContext {
public:
    explicit MlpContext(const model::MlpModel& m) : model_(&m) {}

    GradientVector gradient(const Example& ex) const override { return model::example_gradient(*model_, ex); }
    Eigen::VectorXd features(const Example& ex) const override { return model::hidden_features(*model_, ex.features); }

private:
    const model::MlpModel* model_;
};

/// Up to k distinct indices in [0, n), uniformly at random, in draw order.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
    k = std::min(k, n);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    return idx;
}

/// k examples drawn uniformly without replacement; the whole buffer in
/// random order when k >= size.
inline std::vector<Example> rehearsal_sample(const ScoredBuffer& buffer, std::size_t k, Rng& rng) {
    std::vector<Example> out;
    for (auto i : sample_indices(buffer.size(), k, rng)) out.push_back(buffer[i].example);
    return out;
}

}  // namespace gss::selection
