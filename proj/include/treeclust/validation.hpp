#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "treeclust/dataset.hpp"
#include "treeclust/errors.hpp"
#include "treeclust/hierarchy.hpp"
#include "treeclust/linkage.hpp"

namespace treeclust {

/// Dissimilarity the hierarchy itself induces: entry (i,j) is the linkage
/// between the two children of the lowest cluster containing both labels.
/// Rows and columns follow sorted label order; the diagonal is zero. Ward
/// trees are scored with average linkage, the usual convention for a
/// variance-based merge cost.
inline std::vector<std::vector<double>> cophenetic_matrix(const Dataset& data,
                                                          LinkageKind kind,
                                                          const BinaryHierarchy& tree) {
    if (tree.index_set() != data.index_set())
        throw IndexSetMismatchError("tree and dataset cover different labels");
    const LinkageKind scoring =
        kind.kind == Linkage::ward ? LinkageKind{Linkage::average, kind.strategy} : kind;

    const auto& labels = data.labels();
    const std::size_t n = labels.size();
    std::vector<std::size_t> row(static_cast<std::size_t>(labels.back()) + 1);
    for (std::size_t i = 0; i < n; ++i) row[static_cast<std::size_t>(labels[i])] = i;

    std::vector<std::vector<double>> u(n, std::vector<double>(n, 0.0));
    for (int id = 0; id < tree.node_count(); ++id) {
        const auto& node = tree.node(id);
        if (node.is_leaf()) continue;
        const Cluster& left = tree.node(node.left).cluster;
        const Cluster& right = tree.node(node.right).cluster;
        const double v = linkage_eval(data, scoring, left, right);
        for (Label i : left)
            for (Label j : right) {
                u[row[static_cast<std::size_t>(i)]][row[static_cast<std::size_t>(j)]] = v;
                u[row[static_cast<std::size_t>(j)]][row[static_cast<std::size_t>(i)]] = v;
            }
    }
    return u;
}

/// Pearson correlation between the pointwise Euclidean distances and the
/// tree-induced dissimilarities, taken over unordered label pairs.
inline double cophenetic_correlation(const Dataset& data, LinkageKind kind,
                                     const BinaryHierarchy& tree) {
    const auto u = cophenetic_matrix(data, kind, tree);
    const auto& labels = data.labels();
    const std::size_t n = labels.size();

    std::vector<double> d_flat, u_flat;
    d_flat.reserve(n * (n - 1) / 2);
    u_flat.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            d_flat.push_back(std::sqrt(
                squared_distance(data.point(labels[i]), data.point(labels[j]))));
            u_flat.push_back(u[i][j]);
        }
    if (d_flat.size() < 2)
        throw DegenerateVarianceError("correlation needs at least three points");

    const auto m = static_cast<double>(d_flat.size());
    double mean_d = 0.0, mean_u = 0.0;
    for (std::size_t k = 0; k < d_flat.size(); ++k) {
        mean_d += d_flat[k];
        mean_u += u_flat[k];
    }
    mean_d /= m;
    mean_u /= m;
    double cov = 0.0, var_d = 0.0, var_u = 0.0;
    for (std::size_t k = 0; k < d_flat.size(); ++k) {
        const double dd = d_flat[k] - mean_d;
        const double du = u_flat[k] - mean_u;
        cov += dd * du;
        var_d += dd * dd;
        var_u += du * du;
    }
    if (var_d == 0.0 || var_u == 0.0)
        throw DegenerateVarianceError("a constant matrix has no correlation");
    return cov / std::sqrt(var_d * var_u);
}

} // namespace treeclust
