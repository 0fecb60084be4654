#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace gss {

// One labeled input as seen by learners and selection strategies. Task
// membership is deliberately absent; it lives on the evaluation side only.
struct Example {
    Eigen::VectorXd features;
    int label = 0;
    std::int64_t stream_index = 0;
};

using ExampleList = std::vector<Example>;

// Flattened parameter gradient of a per-example (or batch-mean) loss.
struct GradientVector {
    Eigen::VectorXd values;
    std::int64_t source = -1;  // stream_index of the example, or -1 for a batch

    Eigen::Index size() const { return values.size(); }
};

}  // namespace gss
