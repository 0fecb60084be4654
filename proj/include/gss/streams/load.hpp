#pragma once

#include <type_traits>
#include <variant>

#include "gss/streams/dataset.hpp"
#include "gss/streams/digits8x8_data.hpp"

namespace gss::streams {

/// The bundled 8x8 digits (64 features, 10 classes). Every fourth image goes
/// to the test split; intensities 0..16 are scaled to [0, 1].
inline Dataset load_bundled_digits() {
    Dataset ds;
    ds.name = "digits8x8";
    ds.input_dim = 64;
    ds.num_classes = 10;
    for (std::size_t i = 0; i < detail::kDigitsCount; ++i) {
        const auto* row = detail::kDigits.data() + i * detail::kDigitsRow;
        Example ex;
        ex.label = row[0];
        ex.features.resize(64);
        for (Eigen::Index k = 0; k < 64; ++k) ex.features[k] = row[1 + k] / 16.0;
        auto& split = (i % 4 == 3) ? ds.test : ds.train;
        ex.stream_index = static_cast<std::int64_t>(split.size());
        split.push_back(std::move(ex));
    }
    return ds;
}

inline Dataset load_dataset(const DatasetSource& source) {
    return std::visit(
        [](const auto& src) -> Dataset {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, BundledDigits>) {
                return load_bundled_digits();
            } else {
                Dataset ds;
                if constexpr (std::is_same_v<T, CsvSource>) {
                    ds.name = src.train_path;
                    ds.train = load_csv(src.train_path);
                    ds.test = load_csv(src.test_path);
                } else {
                    ds.name = src.train_images;
                    ds.train = load_idx_pair(src.train_images, src.train_labels);
                    ds.test = load_idx_pair(src.test_images, src.test_labels);
                }
                if (ds.train.empty()) throw DataError(ds.name + ": no training examples");
                ds.input_dim = static_cast<std::size_t>(ds.train.front().features.size());
                ds.num_classes = src.num_classes != 0 ? src.num_classes : infer_classes(ds);
                check_dataset(ds);
                return ds;
            }
        },
        source);
}

}  // namespace gss::streams
