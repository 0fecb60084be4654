#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gss/errors.hpp"
#include "gss/selection/strategy.hpp"
#include "gss/streams/load.hpp"
#include "gss/training/online.hpp"

namespace gss::harness {

inline const std::vector<std::string> kBenchmarks = {"disjoint", "permuted", "imbalanced", "blurry"};

struct ExperimentConfig {
    std::string benchmark = "disjoint";
    std::vector<std::string> strategies = {"gss-greedy"};
    std::size_t buffer_size = 100;
    std::vector<std::uint64_t> seeds = {1, 2, 3};

    std::string dataset = "bundled";  // bundled | csv:<train>,<test> | idx:<train-img>,<train-lbl>,<test-img>,<test-lbl>
    std::vector<std::size_t> hidden = {100, 100};

    std::optional<std::size_t> n_tasks;  // default 5, or 4 for permuted
    std::size_t per_task_train = 200;
    std::size_t heavy_task = 0;
    std::size_t heavy_count = 200;
    std::size_t light_count = 20;
    double swap_fraction = 0.1;

    training::TrainConfig train;
    selection::StrategyOptions strategy_options;

    std::size_t tasks() const { return n_tasks.value_or(benchmark == "permuted" ? 4 : 5); }

    void validate() const {
        if (std::find(kBenchmarks.begin(), kBenchmarks.end(), benchmark) == kBenchmarks.end()) {
            throw ConfigError("unknown benchmark '" + benchmark + "'; valid: disjoint, permuted, imbalanced, blurry");
        }
        if (strategies.empty()) throw ConfigError("at least one strategy is required");
        for (const auto& s : strategies) {
            if (std::find(selection::kStrategyNames.begin(), selection::kStrategyNames.end(), s) ==
                selection::kStrategyNames.end()) {
                (void)selection::make_strategy(s, 0);  // throws with the list of valid names
            }
        }
        if (seeds.empty()) throw ConfigError("seeds must not be empty");
        train.validate();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': cannot parse '" + value + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

}  // namespace detail

/// Flat `key = value` text; '#' starts a comment. Every key is optional, so
/// an empty file yields the desk-scale disjoint benchmark with gss-greedy.
inline ExperimentConfig parse_config(const std::string& text) {
    using namespace detail;
    ExperimentConfig cfg;
    bool rehearsal_size_set = false;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "benchmark") cfg.benchmark = value;
        else if (key == "strategy" || key == "strategies") cfg.strategies = split_list(value);
        else if (key == "buffer_size") cfg.buffer_size = parse_number<std::size_t>(key, value);
        else if (key == "seeds") {
            cfg.seeds.clear();
            for (const auto& s : split_list(value)) cfg.seeds.push_back(parse_number<std::uint64_t>(key, s));
        } else if (key == "dataset") cfg.dataset = value;
        else if (key == "hidden") {
            cfg.hidden.clear();
            for (const auto& s : split_list(value)) cfg.hidden.push_back(parse_number<std::size_t>(key, s));
        } else if (key == "n_tasks") cfg.n_tasks = parse_number<std::size_t>(key, value);
        else if (key == "per_task_train") cfg.per_task_train = parse_number<std::size_t>(key, value);
        else if (key == "heavy_task") cfg.heavy_task = parse_number<std::size_t>(key, value);
        else if (key == "heavy_count") cfg.heavy_count = parse_number<std::size_t>(key, value);
        else if (key == "light_count") cfg.light_count = parse_number<std::size_t>(key, value);
        else if (key == "swap_fraction") cfg.swap_fraction = parse_number<double>(key, value);
        else if (key == "batch_size") cfg.train.batch_size = parse_number<std::size_t>(key, value);
        else if (key == "iterations_per_batch") cfg.train.iterations_per_batch = parse_number<std::size_t>(key, value);
        else if (key == "learning_rate") cfg.train.learning_rate = parse_number<double>(key, value);
        else if (key == "rehearsal_batch_size") {
            cfg.train.rehearsal_batch_size = parse_number<std::size_t>(key, value);
            rehearsal_size_set = true;
        } else if (key == "update_mode") {
            if (value == "rehearsal") cfg.train.update_mode = training::UpdateMode::rehearsal;
            else if (value == "constrained") cfg.train.update_mode = training::UpdateMode::constrained;
            else throw ConfigError("update_mode must be rehearsal or constrained, got '" + value + "'");
        } else if (key == "eval_interval") cfg.train.eval_interval = parse_number<std::size_t>(key, value);
        else if (key == "freeze_rehearsal_draw") cfg.train.freeze_rehearsal_draw = parse_bool(key, value);
        else if (key == "projection_tol") cfg.train.projection.tol = parse_number<double>(key, value);
        else if (key == "greedy_n") cfg.strategy_options.greedy.n = parse_number<std::size_t>(key, value);
        else if (key == "greedy_gate") cfg.strategy_options.greedy.negative_similarity_gate = parse_bool(key, value);
        else if (key == "recent_size") cfg.strategy_options.recent_capacity = parse_number<std::size_t>(key, value);
        else if (key == "iqp_enumeration_limit") cfg.strategy_options.iqp.enumeration_limit = parse_number<double>(key, value);
        else if (key == "iqp_restarts") cfg.strategy_options.iqp.restarts = parse_number<std::size_t>(key, value);
        else if (key == "refresh_cluster_embeddings") cfg.strategy_options.refresh_cluster_embeddings = parse_bool(key, value);
        else {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key +
                              "'; valid: benchmark, strategy, buffer_size, seeds, dataset, hidden, n_tasks, "
                              "per_task_train, heavy_task, heavy_count, light_count, swap_fraction, batch_size, "
                              "iterations_per_batch, learning_rate, rehearsal_batch_size, update_mode, eval_interval, "
                              "freeze_rehearsal_draw, projection_tol, greedy_n, greedy_gate, recent_size, "
                              "iqp_enumeration_limit, iqp_restarts, refresh_cluster_embeddings");
        }
    }
    if (!rehearsal_size_set) cfg.train.rehearsal_batch_size = cfg.train.batch_size;
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline streams::DatasetSource dataset_source(const std::string& spec) {
    if (spec == "bundled") return streams::BundledDigits{};
    if (spec.rfind("csv:", 0) == 0) {
        const auto parts = detail::split_list(spec.substr(4));
        if (parts.size() != 2) throw ConfigError("dataset csv:<train>,<test> needs two paths");
        return streams::CsvSource{parts[0], parts[1], 0};
    }
    if (spec.rfind("idx:", 0) == 0) {
        const auto parts = detail::split_list(spec.substr(4));
        if (parts.size() != 4) throw ConfigError("dataset idx: needs four paths");
        return streams::IdxSource{parts[0], parts[1], parts[2], parts[3], 10};
    }
    throw ConfigError("unknown dataset '" + spec + "'; valid: bundled, csv:<train>,<test>, idx:<four paths>");
}

}  // namespace gss::harness
