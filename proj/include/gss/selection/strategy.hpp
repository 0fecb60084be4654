#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gss/selection/baselines.hpp"
#include "gss/selection/buffer.hpp"
#include "gss/selection/clustering.hpp"
#include "gss/selection/greedy.hpp"
#include "gss/selection/iqp.hpp"

namespace gss::selection {

struct StrategyOptions {
    GreedyOptions greedy;
    IqpOptions iqp;
    std::size_t recent_capacity = 50;
    // Re-embed the stored centers at the current parameters before each
    // overflow consolidation.
    bool refresh_cluster_embeddings = true;
};

/// Replay-buffer population policy. Sees only (features, label) examples in
/// stream order; observe() must leave the buffer within capacity.
class SelectionStrategy {
public:
    explicit SelectionStrategy(std::size_t capacity) : buffer_(capacity) {}
    virtual ~SelectionStrategy() = default;

    virtual std::string name() const = 0;
    virtual void observe(std::span<const Example> batch, const ModelContext& ctx, Rng& rng) = 0;

    const ScoredBuffer& buffer() const { return buffer_; }

    /// Everything currently held, including staged examples not yet merged.
    virtual std::vector<Example> held() const { return buffer_.examples(); }

protected:
    ScoredBuffer buffer_;
};

class ReservoirStrategy final : public SelectionStrategy {
public:
    using SelectionStrategy::SelectionStrategy;
    std::string name() const override { return "reservoir"; }
    void observe(std::span<const Example> batch, const ModelContext&, Rng& rng) override {
        for (const auto& ex : batch) reservoir_observe(buffer_, ex, rng);
    }
};

class RandomStrategy final : public SelectionStrategy {
public:
    using SelectionStrategy::SelectionStrategy;
    std::string name() const override { return "rand"; }
    void observe(std::span<const Example> batch, const ModelContext&, Rng& rng) override {
        rand_observe(buffer_, batch, rng);
    }
};

class GreedyStrategy final : public SelectionStrategy {
public:
    GreedyStrategy(std::size_t capacity, GreedyOptions opt) : SelectionStrategy(capacity), opt_(opt) {}
    std::string name() const override { return "gss-greedy"; }
    void observe(std::span<const Example> batch, const ModelContext& ctx, Rng& rng) override {
        for (const auto& ex : batch) gss_greedy_observe(buffer_, ex, ctx.gradient(ex), ctx, opt_, rng);
    }

private:
    GreedyOptions opt_;
};

class IqpStrategy final : public SelectionStrategy {
public:
    IqpStrategy(std::size_t capacity, std::size_t recent_capacity, IqpOptions opt)
        : SelectionStrategy(capacity), recent_{recent_capacity, {}}, opt_(opt) {}
    std::string name() const override { return "gss-iqp"; }
    void observe(std::span<const Example> batch, const ModelContext& ctx, Rng& rng) override {
        for (const auto& ex : batch) gss_iqp_observe(buffer_, recent_, ex, ctx, opt_, rng);
    }
    std::vector<Example> held() const override {
        auto out = buffer_.examples();
        out.insert(out.end(), recent_.pending.begin(), recent_.pending.end());
        return out;
    }
    const RecentBuffer& recent() const { return recent_; }

private:
    RecentBuffer recent_;
    IqpOptions opt_;
};

class ClusterStrategy final : public SelectionStrategy {
public:
    ClusterStrategy(std::size_t capacity, ClusterMetric metric, bool refresh)
        : SelectionStrategy(capacity), refresh_(refresh) {
        state_.metric = metric;
    }
    std::string name() const override {
        return state_.metric == ClusterMetric::features ? "fss-clust" : "gss-clust";
    }
    void observe(std::span<const Example> batch, const ModelContext& ctx, Rng&) override {
        for (const auto& ex : batch) {
            if (refresh_ && buffer_.full()) {
                for (std::size_t i = 0; i < buffer_.size(); ++i) {
                    state_.points[i] = cluster_embedding(state_.metric, ctx, buffer_[i].example);
                }
            }
            clust_observe(state_, buffer_, ex, cluster_embedding(state_.metric, ctx, ex));
        }
    }
    const ClusterState& state() const { return state_; }

private:
    ClusterState state_;
    bool refresh_;
};

inline constexpr std::array<std::string_view, 6> kStrategyNames = {"rand",     "reservoir", "gss-greedy",
                                                                   "gss-iqp", "gss-clust", "fss-clust"};

inline std::unique_ptr<SelectionStrategy> make_strategy(std::string_view name, std::size_t capacity,
                                                        const StrategyOptions& opt = {}) {
    if (name == "rand") return std::make_unique<RandomStrategy>(capacity);
    if (name == "reservoir") return std::make_unique<ReservoirStrategy>(capacity);
    if (name == "gss-greedy") return std::make_unique<GreedyStrategy>(capacity, opt.greedy);
    if (name == "gss-iqp") return std::make_unique<IqpStrategy>(capacity, opt.recent_capacity, opt.iqp);
    if (name == "gss-clust") {
        return std::make_unique<ClusterStrategy>(capacity, ClusterMetric::normalized_gradient,
                                                 opt.refresh_cluster_embeddings);
    }
    if (name == "fss-clust") {
        return std::make_unique<ClusterStrategy>(capacity, ClusterMetric::features, opt.refresh_cluster_embeddings);
    }
    std::string valid;
    for (auto n : kStrategyNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
    throw ConfigError("unknown strategy '" + std::string(name) + "'; valid: " + valid);
}

}  // namespace gss::selection
