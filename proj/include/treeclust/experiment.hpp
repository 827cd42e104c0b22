#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treeclust/batch_hac.hpp"
#include "treeclust/incremental.hpp"
#include "treeclust/io.hpp"
#include "treeclust/validation.hpp"

namespace treeclust {

enum class DataSource { synthetic, mnist };

inline DataSource source_from_string(const std::string& s) {
    if (s == "synthetic") return DataSource::synthetic;
    if (s == "mnist") return DataSource::mnist;
    throw ConfigError("unknown data source: " + s);
}

/// The three ways this library produces a tree for the same data: batch
/// agglomeration, repair from a uniformly random tree, and insertion of
/// the last point into the batch tree over the rest.
enum class Method { batch, repair_from_random, insert_and_repair };

inline std::string to_string(Method m) {
    switch (m) {
    case Method::batch: return "hac";
    case Method::repair_from_random: return "anytime-from-random";
    case Method::insert_and_repair: return "incremental";
    }
    return "?";
}

struct ExperimentConfig {
    std::vector<std::size_t> sizes{10, 20, 30, 40, 50};
    std::size_t trials = 100;
    std::vector<Linkage> kinds{Linkage::single};
    DataSource source = DataSource::synthetic;
    std::uint64_t rng_seed = 0;
    std::string images_path, labels_path; // mnist source only
    std::size_t max_iterations = 0;       // 0 = the 10n^2 default budget
};

struct ReportRow {
    std::size_t n = 0;
    Linkage kind = Linkage::single;
    Method method = Method::batch;
    std::string metric;
    double mean = 0.0;
    double variance = 0.0;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
};

inline std::string to_csv(const ExperimentReport& report) {
    std::string out = "n,kind,method,metric,mean,variance\n";
    for (const auto& r : report.rows)
        out += std::to_string(r.n) + ',' + to_string(r.kind) + ',' + to_string(r.method) +
               ',' + r.metric + ',' + detail::fmt_double(r.mean) + ',' +
               detail::fmt_double(r.variance) + '\n';
    return out;
}

namespace detail {

inline void validate(const ExperimentConfig& config) {
    if (config.sizes.empty()) throw ConfigError("no sizes given");
    for (std::size_t n : config.sizes) {
        if (n < 2) throw ConfigError("sizes must be at least 2");
        if (config.source == DataSource::mnist && n % 10 != 0)
            throw ConfigError("mnist sizes must be divisible by 10");
    }
    if (config.trials == 0) throw ConfigError("trials must be positive");
    if (config.kinds.empty()) throw ConfigError("no linkage kinds given");
    if (config.source == DataSource::mnist &&
        (config.images_path.empty() || config.labels_path.empty()))
        throw ConfigError("mnist source needs --images and --labels");
}

inline void push_stats(ExperimentReport& report, std::size_t n, Linkage kind,
                       Method method, const std::string& metric,
                       const std::vector<double>& samples) {
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    double variance = 0.0;
    if (samples.size() > 1) {
        for (double v : samples) variance += (v - mean) * (v - mean);
        variance /= static_cast<double>(samples.size() - 1);
    }
    report.rows.push_back({n, kind, method, metric, mean, variance});
}

} // namespace detail

/// Runs trials for every (size, kind) pair and reports mean and sample
/// variance of repair iterations and cophenetic correlation per method.
/// Trial streams derive from (seed, size, kind, trial), so the report is
/// byte-identical for a given config regardless of execution order.
inline ExperimentReport run_experiment(const ExperimentConfig& config) {
    detail::validate(config);
    DigitBank bank;
    if (config.source == DataSource::mnist)
        bank = load_digit_bank(config.images_path, config.labels_path);

    constexpr Method methods[]{Method::batch, Method::repair_from_random,
                               Method::insert_and_repair};
    ExperimentReport report;
    for (std::size_t n : config.sizes) {
        for (std::size_t k = 0; k < config.kinds.size(); ++k) {
            const Linkage kind = config.kinds[k];
            const std::uint64_t block =
                mix_seed(mix_seed(config.rng_seed, static_cast<std::uint64_t>(n)),
                         static_cast<std::uint64_t>(k));

            std::vector<std::vector<double>> iterations(3), correlation(3);
            for (std::size_t t = 0; t < config.trials; ++t) {
                const std::uint64_t data_seed = mix_seed(block, 2 * t);
                const std::uint64_t tree_seed = mix_seed(block, 2 * t + 1);
                const Dataset data = config.source == DataSource::synthetic
                                         ? gen_uniform_square(n, data_seed)
                                         : sample_digits(bank, n / 10, data_seed);

                const auto batch_tree = hac(data, kind);
                iterations[0].push_back(0.0);

                const auto repaired = anytime_cluster(
                    data, kind, random_tree(data.index_set(), tree_seed),
                    config.max_iterations);
                iterations[1].push_back(static_cast<double>(repaired.iterations));

                const Label last = data.labels().back();
                const Dataset base = data.without_point(last);
                const std::vector<double> pt(data.point(last).begin(),
                                             data.point(last).end());
                const auto start =
                    base.labels().size() >= 2
                        ? hac(base, kind)
                        : from_cluster_set(base.index_set(), {base.index_set()});
                const auto grown = incremental_cluster(base, kind, start, last, pt,
                                                       config.max_iterations);
                iterations[2].push_back(static_cast<double>(grown.iterations));

                if (n >= 3) {
                    correlation[0].push_back(
                        cophenetic_correlation(data, kind, batch_tree));
                    correlation[1].push_back(
                        cophenetic_correlation(data, kind, repaired.final_tree));
                    correlation[2].push_back(
                        cophenetic_correlation(data, kind, grown.final_tree));
                }
            }
            for (std::size_t m = 0; m < 3; ++m)
                detail::push_stats(report, n, kind, methods[m], "iterations",
                                   iterations[m]);
            // two points give a single distance pair, so correlation is
            // undefined there and those rows are omitted
            if (n >= 3)
                for (std::size_t m = 0; m < 3; ++m)
                    detail::push_stats(report, n, kind, methods[m],
                                       "cophenetic_correlation", correlation[m]);
        }
    }
    return report;
}

} // namespace treeclust
