#pragma once

#include <algorithm>
#include <vector>

#include "treeclust/anytime.hpp"
#include "treeclust/dataset.hpp"
#include "treeclust/errors.hpp"
#include "treeclust/hierarchy.hpp"
#include "treeclust/linkage.hpp"

namespace treeclust {

namespace detail {

/// ℓ(V, {i}) for every node of the tree in one bottom-up pass. Works for
/// the kinds whose recurrence ignores the within-pair linkage (single,
/// complete, average): only the n leaf dissimilarities are evaluated.
inline std::vector<double> links_to_point(const Dataset& data, Linkage kind,
                                          const BinaryHierarchy& tree, Label point,
                                          std::size_t* evals) {
    std::vector<double> to_point(static_cast<std::size_t>(tree.node_count()), 0.0);
    auto order = tree.preorder();
    std::reverse(order.begin(), order.end()); // children before parents
    for (int id : order) {
        const auto& n = tree.node(id);
        if (n.is_leaf()) {
            to_point[static_cast<std::size_t>(id)] =
                dissimilarity(data, n.cluster[0], point);
            if (evals) ++*evals;
            continue;
        }
        const double l = to_point[static_cast<std::size_t>(n.left)];
        const double r = to_point[static_cast<std::size_t>(n.right)];
        switch (kind) {
        case Linkage::single: to_point[static_cast<std::size_t>(id)] = std::min(l, r); break;
        case Linkage::complete: to_point[static_cast<std::size_t>(id)] = std::max(l, r); break;
        default: {
            const auto nl = static_cast<double>(tree.node(n.left).cluster.size());
            const auto nr = static_cast<double>(tree.node(n.right).cluster.size());
            to_point[static_cast<std::size_t>(id)] = (nl * l + nr * r) / (nl + nr);
        }
        }
    }
    return to_point;
}

/// Splices a new leaf in as the sibling of an existing node.
inline BinaryHierarchy attach_sibling(const BinaryHierarchy& tree, int at, Label label) {
    std::vector<BinaryHierarchy::Node> nodes;
    nodes.reserve(static_cast<std::size_t>(tree.node_count()) + 2);
    for (int i = 0; i < tree.node_count(); ++i) nodes.push_back(tree.node(i));

    const int leaf = static_cast<int>(nodes.size());
    nodes.push_back({Cluster{label}, -1, -1, -1});
    const int joint = static_cast<int>(nodes.size());
    const int above = nodes[static_cast<std::size_t>(at)].parent;
    nodes.push_back({cluster_union(nodes[static_cast<std::size_t>(at)].cluster, {label}),
                     above, at, leaf});
    nodes[static_cast<std::size_t>(at)].parent = joint;
    nodes[static_cast<std::size_t>(leaf)].parent = joint;

    int root = tree.root();
    if (above < 0) {
        root = joint;
    } else {
        auto& parent = nodes[static_cast<std::size_t>(above)];
        (parent.left == at ? parent.left : parent.right) = joint;
        for (int a = above; a >= 0; a = nodes[static_cast<std::size_t>(a)].parent)
            nodes[static_cast<std::size_t>(a)].cluster =
                cluster_union(nodes[static_cast<std::size_t>(a)].cluster, {label});
    }
    return BinaryHierarchy::from_nodes(std::move(nodes), root);
}

} // namespace detail

/// Grows the hierarchy by one labelled point. Starting at the root, the
/// new point either joins the current cluster as its sibling (when the
/// cluster's own pair is tighter than the point is to either side) or
/// descends into the nearer child; reaching a leaf attaches the point as
/// that leaf's sibling. Linkage evaluation count stays linear in |J|; the
/// optional counter reports it.
inline BinaryHierarchy insert_point(const Dataset& data, LinkageKind kind,
                                    const BinaryHierarchy& tree, Label new_label,
                                    const std::vector<double>& new_point,
                                    std::size_t* eval_count = nullptr) {
    if (tree.find({new_label}) >= 0)
        throw DuplicateLabelError("label " + std::to_string(new_label) + " already in tree");
    const Dataset grown = data.with_point(new_label, new_point);
    if (eval_count) *eval_count = 0;

    const bool recurrent = kind.kind == Linkage::single || kind.kind == Linkage::complete ||
                           kind.kind == Linkage::average;
    std::vector<double> to_point;
    if (recurrent)
        to_point = detail::links_to_point(grown, kind.kind, tree, new_label, eval_count);

    const auto side_link = [&](int id) {
        if (recurrent) return to_point[static_cast<std::size_t>(id)];
        if (eval_count) ++*eval_count;
        return linkage_eval(grown, kind, tree.node(id).cluster, {new_label});
    };

    int at = tree.root();
    while (!tree.node(at).is_leaf()) {
        const auto& n = tree.node(at);
        if (eval_count) ++*eval_count;
        const double pair = linkage_eval(grown, kind, tree.node(n.left).cluster,
                                         tree.node(n.right).cluster);
        const double left = side_link(n.left);
        const double right = side_link(n.right);
        if (pair <= std::min(left, right)) break;
        at = right < left ? n.right : n.left; // ties descend left
    }
    return detail::attach_sibling(tree, at, new_label);
}

/// Insertion followed by anytime repair on the grown dataset; the trace
/// covers only the repair phase.
inline AnytimeTrace incremental_cluster(const Dataset& data, LinkageKind kind,
                                        const BinaryHierarchy& tree, Label new_label,
                                        const std::vector<double>& new_point,
                                        std::size_t max_iterations = 0) {
    const BinaryHierarchy grown_tree = insert_point(data, kind, tree, new_label, new_point);
    const Dataset grown = data.with_point(new_label, new_point);
    return anytime_cluster(grown, kind, grown_tree, max_iterations);
}

/// Drops a leaf and splices its parent away. Purely structural; the
/// dataset is untouched.
inline BinaryHierarchy remove_point(const BinaryHierarchy& tree, Label label) {
    const int leaf = tree.find({label});
    if (leaf < 0)
        throw UnknownLabelError("label " + std::to_string(label) + " not in tree");
    const int parent = tree.node(leaf).parent;
    if (parent < 0) throw IndexSetTooSmallError("cannot remove the only point");
    const int sibling = tree.node(parent).left == leaf ? tree.node(parent).right
                                                       : tree.node(parent).left;
    const int above = tree.node(parent).parent;

    std::vector<BinaryHierarchy::Node> nodes;
    std::vector<int> remap(static_cast<std::size_t>(tree.node_count()), -1);
    for (int i = 0; i < tree.node_count(); ++i) {
        if (i == leaf || i == parent) continue;
        remap[static_cast<std::size_t>(i)] = static_cast<int>(nodes.size());
        nodes.push_back(tree.node(i));
    }
    for (auto& n : nodes) {
        n.cluster = cluster_difference(n.cluster, {label});
        if (n.parent == parent) n.parent = above;
        if (n.parent >= 0) n.parent = remap[static_cast<std::size_t>(n.parent)];
        if (n.left == parent) n.left = sibling;
        if (n.right == parent) n.right = sibling;
        if (n.left >= 0) {
            n.left = remap[static_cast<std::size_t>(n.left)];
            n.right = remap[static_cast<std::size_t>(n.right)];
        }
    }
    const int root = above < 0 ? remap[static_cast<std::size_t>(sibling)]
                               : remap[static_cast<std::size_t>(tree.root())];
    return BinaryHierarchy::from_nodes(std::move(nodes), root);
}

/// Leaf removal followed by anytime repair of the shrunken tree. The
/// dataset may keep the removed point; the tree simply no longer covers it.
inline AnytimeTrace decremental_cluster(const Dataset& data, LinkageKind kind,
                                        const BinaryHierarchy& tree, Label label,
                                        std::size_t max_iterations = 0) {
    return anytime_cluster(data, kind, remove_point(tree, label), max_iterations);
}

} // namespace treeclust
