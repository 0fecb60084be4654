#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gss/errors.hpp"
#include "gss/model/example.hpp"

namespace gss::streams {

struct Dataset {
    std::string name;
    ExampleList train;
    ExampleList test;
    std::size_t input_dim = 0;
    std::size_t num_classes = 0;
};

// Sources accepted by load_dataset.
struct BundledDigits {};
struct CsvSource {
    std::string train_path;
    std::string test_path;
    std::size_t num_classes = 0;  // 0: one more than the largest label seen
};
struct IdxSource {
    std::string train_images, train_labels, test_images, test_labels;
    std::size_t num_classes = 10;
};
using DatasetSource = std::variant<BundledDigits, CsvSource, IdxSource>;

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset) {
    if (offset + 4 > bytes.size()) throw ParseError("truncated IDX header", offset);
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

struct IdxArray {
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> data;
};

// Big-endian header: two zero bytes, type code 0x08 (unsigned byte), the
// dimension count, then one 32-bit size per dimension; payload follows.
inline IdxArray parse_idx(const std::vector<std::uint8_t>& bytes, std::uint8_t expected_rank) {
    const std::uint32_t magic = read_be32(bytes, 0);
    if ((magic >> 16) != 0) throw ParseError("IDX magic must start with two zero bytes", 0);
    if (((magic >> 8) & 0xff) != 0x08) throw ParseError("unsupported IDX element type (only unsigned byte)", 2);
    const auto rank = static_cast<std::uint8_t>(magic & 0xff);
    if (rank != expected_rank) {
        throw ParseError("IDX rank " + std::to_string(rank) + ", expected " + std::to_string(expected_rank), 3);
    }
    IdxArray arr;
    std::size_t count = 1;
    for (std::uint8_t k = 0; k < rank; ++k) {
        arr.dims.push_back(read_be32(bytes, 4 + 4 * std::size_t{k}));
        count *= arr.dims.back();
    }
    const std::size_t header = 4 + 4 * std::size_t{rank};
    if (bytes.size() < header + count) {
        throw ParseError("IDX payload shorter than header dimensions imply", bytes.size());
    }
    if (bytes.size() > header + count) throw ParseError("trailing bytes after IDX payload", header + count);
    arr.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
    return arr;
}

}  // namespace detail

/// Images from an IDX file of rank 3 (magic 0x00000803), flattened row-major
/// and scaled to [0, 1].
inline std::vector<Eigen::VectorXd> load_idx_images(const std::string& path) {
    const auto arr = detail::parse_idx(detail::read_file(path), 3);
    const std::size_t n = arr.dims[0];
    const std::size_t dim = std::size_t{arr.dims[1]} * arr.dims[2];
    std::vector<Eigen::VectorXd> out(n, Eigen::VectorXd(static_cast<Eigen::Index>(dim)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < dim; ++k) out[i][static_cast<Eigen::Index>(k)] = arr.data[i * dim + k] / 255.0;
    }
    return out;
}

/// Labels from an IDX file of rank 1 (magic 0x00000801).
inline std::vector<int> load_idx_labels(const std::string& path) {
    const auto arr = detail::parse_idx(detail::read_file(path), 1);
    return {arr.data.begin(), arr.data.end()};
}

inline ExampleList load_idx_pair(const std::string& images, const std::string& labels) {
    auto x = load_idx_images(images);
    auto y = load_idx_labels(labels);
    if (x.size() != y.size()) throw DataError("IDX image and label counts differ");
    ExampleList out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = {std::move(x[i]), y[i], static_cast<std::int64_t>(i)};
    return out;
}

/// Rows of `label,f1,...,fD` with raw intensities in [0, 255]; features are
/// divided by 255. Blank lines and lines starting with '#' are skipped.
inline ExampleList parse_csv(const std::string& text) {
    ExampleList out;
    std::size_t pos = 0;
    std::size_t width = 0;
    while (pos < text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string line = text.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t line_start = pos;
        pos = eol + 1;
        if (line.empty() || line[0] == '#') continue;

        std::vector<double> cells;
        std::size_t cell_start = 0;
        while (cell_start <= line.size()) {
            const std::size_t comma = std::min(line.find(',', cell_start), line.size());
            const std::string cell = line.substr(cell_start, comma - cell_start);
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos) {
                throw ParseError("malformed CSV cell '" + cell + "'", line_start + cell_start);
            }
            cells.push_back(value);
            cell_start = comma + 1;
        }
        if (cells.size() < 2) throw ParseError("CSV row needs a label and at least one feature", line_start);
        if (width == 0) width = cells.size();
        if (cells.size() != width) throw ParseError("CSV row has inconsistent column count", line_start);
        if (cells[0] < 0 || cells[0] != static_cast<double>(static_cast<int>(cells[0]))) {
            throw ParseError("CSV label must be a non-negative integer", line_start);
        }
        Example ex;
        ex.label = static_cast<int>(cells[0]);
        ex.stream_index = static_cast<std::int64_t>(out.size());
        ex.features.resize(static_cast<Eigen::Index>(cells.size() - 1));
        for (std::size_t k = 1; k < cells.size(); ++k) {
            if (!(cells[k] >= 0.0 && cells[k] <= 255.0)) {
                throw ValueError("CSV feature " + std::to_string(cells[k]) + " outside [0, 255] at byte offset " +
                                 std::to_string(line_start));
            }
            ex.features[static_cast<Eigen::Index>(k - 1)] = cells[k] / 255.0;
        }
        out.push_back(std::move(ex));
    }
    return out;
}

inline ExampleList load_csv(const std::string& path) {
    const auto bytes = detail::read_file(path);
    return parse_csv(std::string(bytes.begin(), bytes.end()));
}

/// Inverse of parse_csv: features are written back on the 0..255 scale with
/// round-trip precision.
inline std::string to_csv(const ExampleList& examples) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (const auto& ex : examples) {
        os << ex.label;
        for (Eigen::Index k = 0; k < ex.features.size(); ++k) os << ',' << ex.features[k] * 255.0;
        os << '\n';
    }
    return os.str();
}

inline void write_csv(const std::string& path, const ExampleList& examples) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << to_csv(examples);
}

inline void check_dataset(const Dataset& ds) {
    for (const auto* split : {&ds.train, &ds.test}) {
        for (const auto& ex : *split) {
            if (static_cast<std::size_t>(ex.features.size()) != ds.input_dim) {
                throw DataError(ds.name + ": example with " + std::to_string(ex.features.size()) + " features");
            }
            if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= ds.num_classes) {
                throw DataError(ds.name + ": label " + std::to_string(ex.label) + " outside class range");
            }
        }
    }
}

inline std::size_t infer_classes(const Dataset& ds) {
    int top = -1;
    for (const auto* split : {&ds.train, &ds.test}) {
        for (const auto& ex : *split) top = std::max(top, ex.label);
    }
    return static_cast<std::size_t>(top + 1);
}

}  // namespace gss::streams
