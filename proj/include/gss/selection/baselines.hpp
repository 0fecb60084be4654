#pragma once

#include <algorithm>
#include <random>
#include <span>
#include <vector>

#include "gss/selection/buffer.hpp"

namespace gss::selection {

/// Vitter's algorithm R: after t arrivals every item is held with
/// probability M / t.
inline Mutation reservoir_observe(ScoredBuffer& buffer, const Example& x, Rng& rng) {
    buffer.note_seen();
    if (buffer.capacity() == 0) return Mutation::discarded();
    if (!buffer.full()) return Mutation::appended(buffer.append(x));
    std::uniform_int_distribution<std::uint64_t> pick(0, buffer.seen_count() - 1);
    const auto j = pick(rng);
    if (j < buffer.capacity()) {
        buffer.replace(static_cast<std::size_t>(j), x);
        return Mutation::replaced(static_cast<std::size_t>(j));
    }
    return Mutation::discarded();
}

/// Joins the batch to the buffer, then keeps a uniform size-M subset of the
/// union if it overflows. Survivors keep their relative order.
inline Mutation rand_observe(ScoredBuffer& buffer, std::span<const Example> batch, Rng& rng) {
    buffer.note_seen(batch.size());
    if (batch.empty()) return Mutation::discarded();
    std::vector<Slot> pool = buffer.slots();
    for (const auto& ex : batch) pool.push_back({ex, 0.0});
    if (pool.size() <= buffer.capacity()) {
        buffer.reset_slots(std::move(pool));
        return Mutation::appended(buffer.size() - 1);
    }
    auto keep = sample_indices(pool.size(), buffer.capacity(), rng);
    std::sort(keep.begin(), keep.end());
    std::vector<Slot> slots;
    slots.reserve(keep.size());
    for (auto k : keep) slots.push_back(std::move(pool[k]));
    buffer.reset_slots(std::move(slots));
    return Mutation::reselected();
}

}  // namespace gss::selection
