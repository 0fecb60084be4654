#pragma once

#include <map>
#include <span>
#include <vector>

#include "gss/errors.hpp"
#include "gss/model/mlp.hpp"

namespace gss::model {

struct Evaluation {
    std::map<int, double> per_group;  // group id -> accuracy; groups with no test examples are absent
    double overall = 0.0;             // fraction correct over the whole test set
    double group_mean = 0.0;          // unweighted mean of per_group

    double group(int id) const { return per_group.at(id); }
};

/// Shared-head accuracy. `group_of[i]` assigns test example i to a group;
/// negative ids are counted in `overall` only.
inline Evaluation evaluate(const MlpModel& model, std::span<const Example> test_set, std::span<const int> group_of) {
    if (test_set.empty()) throw EmptyInputError("evaluate on an empty test set");
    if (group_of.size() != test_set.size()) throw ShapeError("group assignment length differs from test set");
    std::map<int, std::pair<std::size_t, std::size_t>> counts;  // id -> (correct, total)
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        const bool hit = predict(model, test_set[i].features) == test_set[i].label;
        correct += hit ? 1 : 0;
        if (group_of[i] >= 0) {
            auto& c = counts[group_of[i]];
            c.first += hit ? 1 : 0;
            ++c.second;
        }
    }
    Evaluation ev;
    ev.overall = static_cast<double>(correct) / static_cast<double>(test_set.size());
    for (const auto& [id, c] : counts) {
        ev.per_group[id] = static_cast<double>(c.first) / static_cast<double>(c.second);
        ev.group_mean += ev.per_group[id];
    }
    if (!ev.per_group.empty()) ev.group_mean /= static_cast<double>(ev.per_group.size());
    return ev;
}

/// Groups defined by label sets: group g holds every test example whose
/// label is in label_groups[g].
inline Evaluation evaluate(const MlpModel& model, std::span<const Example> test_set,
                           const std::vector<std::vector<int>>& label_groups) {
    std::map<int, int> group_of_label;
    for (std::size_t g = 0; g < label_groups.size(); ++g) {
        for (int label : label_groups[g]) group_of_label[label] = static_cast<int>(g);
    }
    std::vector<int> group_of(test_set.size(), -1);
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        auto it = group_of_label.find(test_set[i].label);
        if (it != group_of_label.end()) group_of[i] = it->second;
    }
    return evaluate(model, test_set, group_of);
}

}  // namespace gss::model
