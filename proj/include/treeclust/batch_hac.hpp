#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "treeclust/dataset.hpp"
#include "treeclust/errors.hpp"
#include "treeclust/hierarchy.hpp"
#include "treeclust/linkage.hpp"

namespace treeclust {

/// Bottom-up agglomerative clustering: repeatedly merges the pair of
/// active clusters with minimum linkage. Deterministic tie-break: among
/// minimal pairs, the lexicographically smallest ordered pair of the two
/// clusters' minimum labels wins. Single/complete/average/ward linkages
/// update the active matrix with the Lance-Williams rule; minimax is
/// re-evaluated directly after every merge.
inline BinaryHierarchy hac(const Dataset& data, LinkageKind kind) {
    const std::vector<Label>& labels = data.labels();
    const std::size_t n = labels.size();
    if (n < 2) throw IndexSetTooSmallError("clustering needs at least two points");

    std::vector<BinaryHierarchy::Node> nodes;
    nodes.reserve(2 * n - 1);
    for (Label l : labels) nodes.push_back({Cluster{l}, -1, -1, -1});

    const bool direct = kind.kind == Linkage::minimax;
    std::vector<std::vector<double>> link(2 * n - 1, std::vector<double>(2 * n - 1, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            link[i][j] = link[j][i] =
                kind.kind == Linkage::ward
                    ? 0.5 * squared_distance(data.point(labels[i]), data.point(labels[j]))
                    : dissimilarity(data, labels[i], labels[j]);

    std::vector<int> active(n); // stays sorted by cluster minimum label
    for (std::size_t i = 0; i < n; ++i) active[i] = static_cast<int>(i);

    while (active.size() > 1) {
        std::size_t bi = 0, bj = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < active.size(); ++i)
            for (std::size_t j = i + 1; j < active.size(); ++j) {
                const double v = link[static_cast<std::size_t>(active[i])]
                                     [static_cast<std::size_t>(active[j])];
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }

        const int a = active[bi];
        const int b = active[bj];
        const int merged = static_cast<int>(nodes.size());
        const auto& ca = nodes[static_cast<std::size_t>(a)].cluster;
        const auto& cb = nodes[static_cast<std::size_t>(b)].cluster;
        nodes.push_back({cluster_union(ca, cb), -1, a, b});

        for (int other : active) {
            if (other == a || other == b) continue;
            const auto& co = nodes[static_cast<std::size_t>(other)].cluster;
            const double v =
                direct ? linkage_eval(data, Linkage::minimax,
                                      nodes[static_cast<std::size_t>(merged)].cluster, co)
                       : lance_williams_update(
                             kind.kind, ca.size(), cb.size(), co.size(),
                             link[static_cast<std::size_t>(a)][static_cast<std::size_t>(other)],
                             link[static_cast<std::size_t>(b)][static_cast<std::size_t>(other)],
                             link[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
            link[static_cast<std::size_t>(merged)][static_cast<std::size_t>(other)] = v;
            link[static_cast<std::size_t>(other)][static_cast<std::size_t>(merged)] = v;
        }

        active[bi] = merged; // same minimum label slot as the removed pair
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    }

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].left >= 0) {
            nodes[static_cast<std::size_t>(nodes[i].left)].parent = static_cast<int>(i);
            nodes[static_cast<std::size_t>(nodes[i].right)].parent = static_cast<int>(i);
        }
    }
    return BinaryHierarchy::from_nodes(std::move(nodes), active[0]);
}

struct MonotonicityCheck {
    bool monotone = true;
    std::optional<Cluster> violating_grandchild;
};

/// A tree is monotone when every grandchild is at least as close to its
/// sibling as its parent is to the parent's sibling. Reports the first
/// violating grandchild in pre-order.
inline MonotonicityCheck is_monotone(const Dataset& data, LinkageKind kind,
                                     const BinaryHierarchy& tree) {
    if (tree.index_set() != data.index_set())
        throw IndexSetMismatchError("tree and dataset cover different labels");
    constexpr double tol = 1e-12;
    for (int id : tree.preorder()) {
        const auto& node = tree.node(id);
        if (node.parent < 0 || tree.node(node.parent).parent < 0) continue;
        const auto& parent = tree.node(node.parent);
        const auto& grand = tree.node(parent.parent);
        const Cluster& sibling =
            tree.node(parent.left == id ? parent.right : parent.left).cluster;
        const Cluster& parent_sibling =
            tree.node(grand.left == node.parent ? grand.right : grand.left).cluster;
        const double inner = linkage_eval(data, kind, node.cluster, sibling);
        const double outer = linkage_eval(data, kind, parent.cluster, parent_sibling);
        if (inner > outer + tol) return {false, node.cluster};
    }
    return {true, std::nullopt};
}

} // namespace treeclust
