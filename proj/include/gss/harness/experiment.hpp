#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gss/geometry/correlation.hpp"
#include "gss/harness/config.hpp"

namespace gss::harness {

struct RunRecord {
    std::uint64_t seed = 0;
    std::string strategy;
    training::RunResult result;
};

struct RunFailure {
    std::uint64_t seed = 0;
    std::string strategy;
    std::string message;
};

struct SummaryRow {
    std::string strategy;
    int task_id = -1;  // -1: average over tasks
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation over seeds; 0 for one seed
};

struct ExperimentResult {
    std::vector<RunRecord> runs;
    std::vector<RunFailure> failures;
    std::vector<SummaryRow> summary;

    bool ok() const { return failures.empty(); }

    std::optional<double> mean_average(const std::string& strategy) const {
        for (const auto& row : summary) {
            if (row.strategy == strategy && row.task_id < 0) return row.mean;
        }
        return std::nullopt;
    }
};

/// Independent generator for one purpose of one seed.
inline Rng derived_rng(std::uint64_t seed, std::uint64_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(purpose)};
    return Rng(seq);
}

inline streams::TaskStream build_stream(const ExperimentConfig& cfg, const streams::Dataset& ds, std::uint64_t seed) {
    Rng rng = derived_rng(seed, 1);
    const auto bs = cfg.train.batch_size;
    if (cfg.benchmark == "disjoint") return streams::disjoint_stream(ds, cfg.tasks(), cfg.per_task_train, rng, bs);
    if (cfg.benchmark == "permuted") return streams::permuted_stream(ds, cfg.tasks(), cfg.per_task_train, rng, bs);
    if (cfg.benchmark == "imbalanced") {
        return streams::imbalanced_stream(ds, cfg.tasks(), cfg.heavy_task, cfg.heavy_count, cfg.light_count, rng, bs);
    }
    return streams::blurry_stream(ds, cfg.tasks(), cfg.swap_fraction, cfg.per_task_train, rng, bs);
}

inline model::MlpModel build_model(const ExperimentConfig& cfg, const streams::Dataset& ds, std::uint64_t seed) {
    std::vector<std::size_t> sizes{ds.input_dim};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(ds.num_classes);
    Rng rng = derived_rng(seed, 2);
    return model::MlpModel::random(sizes, rng);
}

inline training::RunResult run_single(const ExperimentConfig& cfg, const streams::Dataset& ds, std::uint64_t seed,
                                      const std::string& strategy_name) {
    const auto stream = build_stream(cfg, ds, seed);
    auto model = build_model(cfg, ds, seed);
    auto strategy = selection::make_strategy(strategy_name, cfg.buffer_size, cfg.strategy_options);
    auto train = cfg.train;
    train.seed = seed;
    Rng rng = derived_rng(seed, 3);
    return training::run_online(stream, *strategy, model, train, rng);
}

inline std::vector<SummaryRow> summarize(const std::vector<RunRecord>& runs, const std::vector<std::string>& order) {
    std::vector<SummaryRow> rows;
    for (const auto& name : order) {
        std::map<int, std::vector<double>> finals;
        for (const auto& r : runs) {
            if (r.strategy != name) continue;
            for (const auto& p : r.result.final_metrics()) finals[p.task_id].push_back(p.accuracy);
        }
        // per-task rows first, the average (-1) last
        std::vector<int> ids;
        for (const auto& [id, v] : finals) {
            if (id >= 0) ids.push_back(id);
        }
        if (finals.count(-1)) ids.push_back(-1);
        for (int id : ids) {
            const auto& v = finals[id];
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
            rows.push_back({name, id, mean, sd});
        }
    }
    return rows;
}

/// Every (seed, strategy) pair on its own freshly built stream, model, and
/// strategy. The stream and initial model depend only on the seed, so all
/// strategies see identical data for a given seed.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto ds = streams::load_dataset(dataset_source(cfg.dataset));
    ExperimentResult out;
    for (auto seed : cfg.seeds) {
        for (const auto& name : cfg.strategies) {
            try {
                out.runs.push_back({seed, name, run_single(cfg, ds, seed, name)});
            } catch (const std::exception& e) {
                out.failures.push_back({seed, name, e.what()});
            }
        }
    }
    out.summary = summarize(out.runs, cfg.strategies);
    return out;
}

inline std::string task_label(int id) { return id < 0 ? "avg" : std::to_string(id); }

inline std::string metrics_csv(const ExperimentConfig& cfg, const ExperimentResult& res) {
    std::ostringstream os;
    os << std::setprecision(10);
    os << "seed,strategy,update_mode,examples_seen,task_id,accuracy\n";
    for (const auto& r : res.runs) {
        for (const auto& p : r.result.timeline) {
            os << r.seed << ',' << r.strategy << ',' << training::to_string(cfg.train.update_mode) << ','
               << p.examples_seen << ',' << task_label(p.task_id) << ',' << p.accuracy << '\n';
        }
    }
    return os.str();
}

inline std::string summary_csv(const ExperimentResult& res) {
    std::ostringstream os;
    os << std::setprecision(10);
    os << "strategy,task_id,mean,std\n";
    for (const auto& row : res.summary) {
        os << row.strategy << ',' << task_label(row.task_id) << ',' << row.mean << ',' << row.std << '\n';
    }
    return os.str();
}

inline std::string buffer_csv(const std::vector<selection::Slot>& slots) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "stream_index,label,score\n";
    for (const auto& s : slots) os << s.example.stream_index << ',' << s.example.label << ',' << s.score << '\n';
    return os.str();
}

inline std::string pairs_csv(const geometry::CorrelationResult& res) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "surrogate,angle_fraction\n";
    for (const auto& p : res.pairs) os << p.surrogate << ',' << p.angle_fraction << '\n';
    os << "# rho=";
    if (res.rho) os << *res.rho;
    else os << "NA";
    os << ",trials=" << res.pairs.size() << ",samples=" << res.mc_samples << '\n';
    return os.str();
}

/// Gradient snapshot: one vector per line, comma-separated reals. Blank
/// lines and '#' comments are skipped.
inline geometry::GradientSet parse_vector_snapshot(const std::string& text) {
    std::vector<Eigen::VectorXd> vecs;
    std::istringstream in(text);
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        const std::size_t line_start = offset;
        offset += line.size() + 1;
        const auto t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<double> vals;
        for (const auto& cell : detail::split_list(t)) {
            try {
                std::size_t used = 0;
                vals.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ParseError("malformed number '" + cell + "' in vector snapshot", line_start);
            }
        }
        vecs.emplace_back(Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
    }
    return geometry::GradientSet(std::move(vecs));
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

}  // namespace gss::harness
