#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gss/errors.hpp"
#include "gss/model/example.hpp"

namespace gss::model {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using MatrixMap = Eigen::Map<RowMatrix>;

/// Fully connected classifier input -> hidden... -> K with ReLU hidden units
/// and a softmax output.
///
/// All parameters live in one flat vector. Layout is layer-major; within a
/// layer the (out x in) weight matrix comes first in row-major order,
/// followed by the bias vector. Gradients use the same layout, so gradient
/// index i always refers to parameter i.
class MlpModel {
public:
    MlpModel() = default;

    /// Zero-initialized model. `layer_sizes` is {input, hidden..., classes}.
    explicit MlpModel(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
        if (sizes_.size() < 2) {
            throw ShapeError("model needs at least an input and an output layer");
        }
        for (auto s : sizes_) {
            if (s == 0) throw ShapeError("layer sizes must be positive");
        }
        std::size_t total = 0;
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
            weight_offset_.push_back(total);
            total += sizes_[l + 1] * sizes_[l];
            bias_offset_.push_back(total);
            total += sizes_[l + 1];
        }
        params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
    }

    /// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases likewise.
    template <class Rng>
    static MlpModel random(std::vector<std::size_t> layer_sizes, Rng& rng) {
        MlpModel m(std::move(layer_sizes));
        for (std::size_t l = 0; l < m.layer_count(); ++l) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(m.sizes_[l]));
            std::uniform_real_distribution<double> dist(-bound, bound);
            const std::size_t begin = m.weight_offset_[l];
            const std::size_t end = m.bias_offset_[l] + m.sizes_[l + 1];
            for (std::size_t i = begin; i < end; ++i) {
                m.params_[static_cast<Eigen::Index>(i)] = dist(rng);
            }
        }
        return m;
    }

    std::size_t input_dim() const { return sizes_.front(); }
    std::size_t num_classes() const { return sizes_.back(); }
    std::size_t layer_count() const { return sizes_.size() - 1; }
    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
    std::size_t parameter_count() const { return static_cast<std::size_t>(params_.size()); }

    const Eigen::VectorXd& flatten() const { return params_; }

    void unflatten(const Eigen::VectorXd& flat) {
        if (flat.size() != params_.size()) {
            throw ShapeError("parameter vector has length " + std::to_string(flat.size()) +
                             ", model expects " + std::to_string(params_.size()));
        }
        params_ = flat;
    }

    ConstMatrixMap weights(std::size_t layer) const {
        return ConstMatrixMap(params_.data() + weight_offset_[layer], rows(layer), cols(layer));
    }
    MatrixMap weights(std::size_t layer) {
        return MatrixMap(params_.data() + weight_offset_[layer], rows(layer), cols(layer));
    }
    Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const {
        return Eigen::Map<const Eigen::VectorXd>(params_.data() + bias_offset_[layer], rows(layer));
    }
    Eigen::Map<Eigen::VectorXd> bias(std::size_t layer) {
        return Eigen::Map<Eigen::VectorXd>(params_.data() + bias_offset_[layer], rows(layer));
    }

    std::size_t weight_offset(std::size_t layer) const { return weight_offset_[layer]; }
    std::size_t bias_offset(std::size_t layer) const { return bias_offset_[layer]; }

    Eigen::VectorXd& mutable_parameters() { return params_; }

    friend bool operator==(const MlpModel& a, const MlpModel& b) {
        return a.sizes_ == b.sizes_ && a.params_.size() == b.params_.size() &&
               (a.params_.array() == b.params_.array()).all();
    }

private:
    Eigen::Index rows(std::size_t layer) const { return static_cast<Eigen::Index>(sizes_[layer + 1]); }
    Eigen::Index cols(std::size_t layer) const { return static_cast<Eigen::Index>(sizes_[layer]); }

    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> weight_offset_;
    std::vector<std::size_t> bias_offset_;
    Eigen::VectorXd params_;
};

namespace detail {

inline void check_input(const MlpModel& model, const Eigen::VectorXd& features) {
    if (static_cast<std::size_t>(features.size()) != model.input_dim()) {
        throw ShapeError("input has " + std::to_string(features.size()) + " features, model expects " +
                         std::to_string(model.input_dim()));
    }
}

// Post-activation values of every layer; activations[0] is the input and the
// last entry holds the logits.
inline std::vector<Eigen::VectorXd> forward_trace(const MlpModel& model, const Eigen::VectorXd& features) {
    check_input(model, features);
    std::vector<Eigen::VectorXd> acts;
    acts.reserve(model.layer_count() + 1);
    acts.push_back(features);
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        Eigen::VectorXd z = model.weights(l) * acts.back() + model.bias(l);
        if (l + 1 < model.layer_count()) z = z.cwiseMax(0.0);
        acts.push_back(std::move(z));
    }
    return acts;
}

inline double log_sum_exp(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    return m + std::log((logits.array() - m).exp().sum());
}

}  // namespace detail

/// Pre-softmax logits.
inline Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& features) {
    return detail::forward_trace(model, features).back();
}

/// Activations of the last hidden layer (the input itself for a model with
/// no hidden layers). Used as the feature-space embedding for clustering.
inline Eigen::VectorXd hidden_features(const MlpModel& model, const Eigen::VectorXd& features) {
    auto acts = detail::forward_trace(model, features);
    return acts[acts.size() - 2];
}

inline Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    return (logits.array() - detail::log_sum_exp(logits)).exp().matrix();
}

/// Softmax cross-entropy, log-sum-exp stabilized.
inline double loss(const Eigen::VectorXd& logits, int label) {
    if (label < 0 || label >= logits.size()) {
        throw LabelError("label " + std::to_string(label) + " outside [0, " + std::to_string(logits.size()) + ")");
    }
    return std::max(0.0, detail::log_sum_exp(logits) - logits[label]);
}

inline double example_loss(const MlpModel& model, const Example& example) {
    return loss(forward(model, example.features), example.label);
}

namespace detail {

// Adds `scale` times the gradient of one example's loss into `out`.
inline void accumulate_gradient(const MlpModel& model, const Example& example, double scale,
                                Eigen::VectorXd& out) {
    if (example.label < 0 || static_cast<std::size_t>(example.label) >= model.num_classes()) {
        throw LabelError("label " + std::to_string(example.label) + " outside model classes");
    }
    const auto acts = forward_trace(model, example.features);
    Eigen::VectorXd delta = softmax(acts.back());
    delta[example.label] -= 1.0;
    delta *= scale;
    for (std::size_t l = model.layer_count(); l-- > 0;) {
        const auto rows = static_cast<Eigen::Index>(model.layer_sizes()[l + 1]);
        const auto cols = static_cast<Eigen::Index>(model.layer_sizes()[l]);
        MatrixMap gw(out.data() + model.weight_offset(l), rows, cols);
        Eigen::Map<Eigen::VectorXd> gb(out.data() + model.bias_offset(l), rows);
        gw.noalias() += delta * acts[l].transpose();
        gb += delta;
        if (l > 0) {
            Eigen::VectorXd back = model.weights(l).transpose() * delta;
            // acts[l] > 0 exactly where the ReLU was active
            delta = (acts[l].array() > 0.0).select(back, 0.0);
        }
    }
}

inline void check_finite(const Eigen::VectorXd& v) {
    if (!v.allFinite()) throw ValueError("gradient contains non-finite entries");
}

}  // namespace detail

/// Exact gradient of loss(forward(x), y) with respect to the flat parameters.
inline GradientVector example_gradient(const MlpModel& model, const Example& example) {
    GradientVector g{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.parameter_count())),
                     example.stream_index};
    detail::accumulate_gradient(model, example, 1.0, g.values);
    detail::check_finite(g.values);
    return g;
}

/// Mean of the per-example gradients.
inline GradientVector batch_gradient(const MlpModel& model, std::span<const Example> batch) {
    if (batch.empty()) throw EmptyInputError("batch_gradient on an empty batch");
    GradientVector g{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.parameter_count())), -1};
    for (const auto& ex : batch) detail::accumulate_gradient(model, ex, 1.0, g.values);
    g.values /= static_cast<double>(batch.size());
    detail::check_finite(g.values);
    return g;
}

inline void sgd_step(MlpModel& model, const GradientVector& direction, double lr) {
    if (static_cast<std::size_t>(direction.size()) != model.parameter_count()) {
        throw ShapeError("direction has length " + std::to_string(direction.size()) + ", model has " +
                         std::to_string(model.parameter_count()) + " parameters");
    }
    model.mutable_parameters().noalias() -= lr * direction.values;
}

inline int predict(const MlpModel& model, const Eigen::VectorXd& features) {
    Eigen::Index best = 0;
    forward(model, features).maxCoeff(&best);
    return static_cast<int>(best);
}

}  // namespace gss::model
