#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treeclust/treeclust.hpp"

namespace {

using namespace treeclust;

BinaryHierarchy read_tree_file(const std::string& path) {
    const std::string text = read_text_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return from_json(text);
    return from_newick(text);
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty())
        std::cout << content;
    else
        write_text_file(path, content);
}

struct CommonOpts {
    std::string linkage = "single";
    std::string dissimilarity = "euclidean";
    std::uint64_t seed = 0;
    std::size_t max_iter = 0;
};

void add_linkage_flags(CLI::App& cmd, CommonOpts& opts) {
    cmd.add_option("--linkage", opts.linkage, "single|complete|average|minimax|ward");
    cmd.add_option("--dissimilarity", opts.dissimilarity, "euclidean|sqeuclidean|cosine");
}

Dataset load_dataset(const std::string& path, const CommonOpts& opts) {
    return read_dataset_csv(read_text_file(path), dissimilarity_from_string(opts.dissimilarity));
}

int dispatch(int argc, char** argv) {
    CLI::App app{"anytime hierarchical clustering toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "sample points uniformly from the unit square");
    std::size_t gen_n = 10;
    std::string gen_out;
    gen->add_option("--n", gen_n, "number of points")->required();
    gen->add_option("--seed", opts.seed, "rng seed");
    gen->add_option("--output", gen_out, "dataset CSV path (default stdout)");

    // load-mnist
    auto* mnist = app.add_subcommand("load-mnist", "sample a balanced digit subset from IDX files");
    std::string mnist_images, mnist_labels, mnist_out;
    std::size_t per_digit = 1;
    mnist->add_option("--images", mnist_images, "IDX image file")->required();
    mnist->add_option("--labels", mnist_labels, "IDX label file")->required();
    mnist->add_option("--per-digit", per_digit, "images per digit")->required();
    mnist->add_option("--seed", opts.seed, "rng seed");
    mnist->add_option("--output", mnist_out, "dataset CSV path (default stdout)");

    // hac
    auto* batch = app.add_subcommand("hac", "batch agglomerative clustering");
    std::string batch_in, batch_out;
    batch->add_option("--input", batch_in, "dataset CSV")->required();
    batch->add_option("--output", batch_out, "tree path (default stdout)");
    add_linkage_flags(*batch, opts);

    // anytime
    auto* repair = app.add_subcommand("anytime", "repair a tree until locally homogeneous");
    std::string repair_in, repair_init = "random", repair_out, repair_trace;
    repair->add_option("--input", repair_in, "dataset CSV")->required();
    repair->add_option("--init", repair_init, "'random' or a tree file");
    repair->add_option("--seed", opts.seed, "seed for the random initial tree");
    repair->add_option("--max-iter", opts.max_iter, "iteration budget (0 = 10n^2)");
    repair->add_option("--output", repair_out, "final tree path (default stdout)");
    repair->add_option("--trace", repair_trace, "per-step trace CSV path");
    add_linkage_flags(*repair, opts);

    // insert
    auto* ins = app.add_subcommand("insert", "insert one point into a tree, then repair");
    std::string ins_in, ins_tree, ins_out, ins_trace;
    Label ins_label = 0;
    ins->add_option("--input", ins_in, "dataset CSV including the new point")->required();
    ins->add_option("--tree", ins_tree, "tree over the other points")->required();
    ins->add_option("--label", ins_label, "label of the point to insert")->required();
    ins->add_option("--max-iter", opts.max_iter, "iteration budget (0 = 10n^2)");
    ins->add_option("--output", ins_out, "final tree path (default stdout)");
    ins->add_option("--trace", ins_trace, "per-step trace CSV path");
    add_linkage_flags(*ins, opts);

    // validate
    auto* val = app.add_subcommand("validate", "cophenetic correlation of a tree against its data");
    std::string val_in, val_tree, val_matrix;
    val->add_option("--input", val_in, "dataset CSV")->required();
    val->add_option("--tree", val_tree, "tree file")->required();
    val->add_option("--matrix", val_matrix, "also write the induced dissimilarity matrix CSV");
    add_linkage_flags(*val, opts);

    // experiment
    auto* exp = app.add_subcommand("experiment", "mean iterations and correlation per method");
    ExperimentConfig config;
    std::vector<std::string> exp_kinds{"single"};
    std::string exp_source = "synthetic", exp_out;
    exp->add_option("--sizes", config.sizes, "dataset sizes")->delimiter(',');
    exp->add_option("--trials", config.trials, "trials per size and kind");
    exp->add_option("--linkage", exp_kinds, "linkage kinds")->delimiter(',');
    exp->add_option("--source", exp_source, "synthetic|mnist");
    exp->add_option("--seed", config.rng_seed, "rng seed");
    exp->add_option("--max-iter", config.max_iterations, "iteration budget (0 = 10n^2)");
    exp->add_option("--images", config.images_path, "IDX image file (mnist source)");
    exp->add_option("--labels", config.labels_path, "IDX label file (mnist source)");
    exp->add_option("--output", exp_out, "report CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints help text or the usage error
        return code == 0 ? 0 : 2;
    }

    if (*gen) {
        emit(gen_out, write_dataset_csv(gen_uniform_square(gen_n, opts.seed)));
    } else if (*mnist) {
        emit(mnist_out,
             write_dataset_csv(load_mnist(mnist_images, mnist_labels, per_digit, opts.seed)));
    } else if (*batch) {
        const Dataset data = load_dataset(batch_in, opts);
        emit(batch_out, to_newick(hac(data, linkage_from_string(opts.linkage))) + "\n");
    } else if (*repair) {
        const Dataset data = load_dataset(repair_in, opts);
        const LinkageKind kind = linkage_from_string(opts.linkage);
        const BinaryHierarchy init = repair_init == "random"
                                         ? random_tree(data.index_set(), opts.seed)
                                         : read_tree_file(repair_init);
        const auto trace = anytime_cluster(data, kind, init, opts.max_iter);
        std::cerr << "iterations=" << trace.iterations
                  << " objective_h=" << objective_h(data, kind, trace.final_tree) << "\n";
        emit(repair_out, to_newick(trace.final_tree) + "\n");
        if (!repair_trace.empty()) write_text_file(repair_trace, write_trace_csv(trace));
    } else if (*ins) {
        const Dataset data = load_dataset(ins_in, opts);
        const LinkageKind kind = linkage_from_string(opts.linkage);
        const std::vector<double> pt(data.point(ins_label).begin(),
                                     data.point(ins_label).end());
        const auto trace = incremental_cluster(data.without_point(ins_label), kind,
                                               read_tree_file(ins_tree), ins_label, pt,
                                               opts.max_iter);
        std::cerr << "iterations=" << trace.iterations << "\n";
        emit(ins_out, to_newick(trace.final_tree) + "\n");
        if (!ins_trace.empty()) write_text_file(ins_trace, write_trace_csv(trace));
    } else if (*val) {
        const Dataset data = load_dataset(val_in, opts);
        const LinkageKind kind = linkage_from_string(opts.linkage);
        const BinaryHierarchy tree = read_tree_file(val_tree);
        std::cout << detail::fmt_double(cophenetic_correlation(data, kind, tree)) << "\n";
        if (!val_matrix.empty())
            write_text_file(val_matrix,
                            write_matrix_csv(cophenetic_matrix(data, kind, tree),
                                             data.index_set()));
    } else if (*exp) {
        config.source = source_from_string(exp_source);
        config.kinds.clear();
        for (const auto& k : exp_kinds) config.kinds.push_back(linkage_from_string(k));
        emit(exp_out, to_csv(run_experiment(config)));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const treeclust::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
