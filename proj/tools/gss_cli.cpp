// gss: command-line front end for the sample-selection experiments.
//
//   gss train --config exp.cfg --out results/
//   gss correlate --dim 200 --set-size 4 --trials 100 --samples 100000 --seed 1 --out pairs.csv
//   gss angle --input grads.csv --samples 1000000 --seed 1
//   gss buffer-dump --config exp.cfg --out buffer.csv

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gss/gss.hpp"

namespace {

gss::harness::ExperimentConfig config_or_default(const std::string& path) {
    return path.empty() ? gss::harness::parse_config("") : gss::harness::load_config(path);
}

int cmd_train(const std::string& config_path, const std::string& out_dir) {
    const auto cfg = config_or_default(config_path);
    const auto res = gss::harness::run_experiment(cfg);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    gss::harness::write_text((dir / "metrics.csv").string(), gss::harness::metrics_csv(cfg, res));
    gss::harness::write_text((dir / "summary.csv").string(), gss::harness::summary_csv(res));
    for (const auto& row : res.summary) {
        if (row.task_id < 0) {
            std::cout << row.strategy << " avg " << 100.0 * row.mean << " +- " << 100.0 * row.std << "\n";
        }
    }
    for (const auto& f : res.failures) {
        std::cerr << "run failed: seed " << f.seed << ", strategy " << f.strategy << ": " << f.message << "\n";
    }
    return res.ok() ? 0 : 1;
}

int cmd_correlate(long dim, std::size_t set_size, std::size_t trials, std::uint64_t samples, std::uint64_t seed,
                  const std::string& out) {
    gss::Rng rng(seed);
    const auto res = gss::geometry::correlation_experiment(dim, set_size, trials, samples, rng);
    const auto text = gss::harness::pairs_csv(res);
    gss::harness::write_text(out, text);
    std::cout << text.substr(text.rfind("# rho="));
    return 0;
}

int cmd_angle(const std::string& input, std::uint64_t samples, std::uint64_t seed) {
    std::ifstream in(input);
    if (!in) throw gss::Error("cannot open " + input);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto set = gss::harness::parse_vector_snapshot(ss.str());
    gss::Rng rng(seed);
    const auto est = gss::geometry::solid_angle_mc(set, samples, rng);
    std::cout << "fraction=" << est.fraction << " std_error=" << est.std_error << " rank=" << est.span_rank
              << " samples=" << est.samples_used << " surrogate=" << gss::geometry::surrogate(set) << "\n";
    return 0;
}

int cmd_buffer_dump(const std::string& config_path, const std::string& out) {
    const auto cfg = config_or_default(config_path);
    const auto ds = gss::streams::load_dataset(gss::harness::dataset_source(cfg.dataset));
    const auto res = gss::harness::run_single(cfg, ds, cfg.seeds.front(), cfg.strategies.front());
    gss::harness::write_text(out, gss::harness::buffer_csv(res.final_buffer));
    std::cout << "wrote " << res.final_buffer.size() << " slots to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient-based replay-buffer sample selection for online continual learning"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "results";
    auto* train = app.add_subcommand("train", "Run a seeded strategy sweep; writes metrics.csv and summary.csv");
    train->add_option("--config", config_path, "key = value experiment config (empty: desk-scale defaults)");
    train->add_option("--out", out_dir, "output directory");

    long dim = 200;
    std::size_t set_size = 4, trials = 100;
    std::uint64_t samples = 100000, seed = 1;
    std::string pairs_out = "pairs.csv";
    auto* corr = app.add_subcommand("correlate", "Surrogate vs. cone solid angle on random vector sets");
    corr->add_option("--dim", dim, "ambient dimension")->check(CLI::PositiveNumber);
    corr->add_option("--set-size", set_size, "vectors per set")->check(CLI::PositiveNumber);
    corr->add_option("--trials", trials, "number of random sets")->check(CLI::PositiveNumber);
    corr->add_option("--samples", samples, "Monte-Carlo samples per set");
    corr->add_option("--seed", seed, "random seed");
    corr->add_option("--out", pairs_out, "pairs CSV path");

    std::string input;
    std::uint64_t angle_samples = 1000000, angle_seed = 1;
    auto* angle = app.add_subcommand("angle", "Monte-Carlo solid angle of the cone of a gradient snapshot");
    angle->add_option("--input", input, "one comma-separated vector per line")->required();
    angle->add_option("--samples", angle_samples, "Monte-Carlo samples");
    angle->add_option("--seed", angle_seed, "random seed");

    std::string dump_config, dump_out = "buffer.csv";
    auto* dump = app.add_subcommand("buffer-dump", "Final buffer composition of the first (seed, strategy) run");
    dump->add_option("--config", dump_config, "experiment config");
    dump->add_option("--out", dump_out, "buffer CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) return cmd_train(config_path, out_dir);
        if (*corr) return cmd_correlate(dim, set_size, trials, samples, seed, pairs_out);
        if (*angle) return cmd_angle(input, angle_samples, angle_seed);
        if (*dump) return cmd_buffer_dump(dump_config, dump_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
