#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "treeclust/batch_hac.hpp"
#include "treeclust/dataset.hpp"
#include "treeclust/errors.hpp"
#include "treeclust/hierarchy.hpp"
#include "treeclust/linkage.hpp"

namespace treeclust {

/// Total linkage cost: half the sum of ℓ(I, sibling(I)) over all clusters,
/// i.e. each sibling pair counted once; the root contributes zero.
inline double objective_h(const Dataset& data, LinkageKind kind,
                          const BinaryHierarchy& tree) {
    double h = 0.0;
    for (int id = 0; id < tree.node_count(); ++id) {
        const auto& n = tree.node(id);
        if (!n.is_leaf())
            h += linkage_eval(data, kind, tree.node(n.left).cluster,
                              tree.node(n.right).cluster);
    }
    return h;
}

/// Sum of sibling-pair linkages grouped by the depth of the pair's parent:
/// entry t covers the pairs whose parent sits t levels from the root
/// (root itself at t=1). Levels with no interior node contribute zero;
/// the profile always has |J|-1 entries.
inline std::vector<double> level_profile(const Dataset& data, LinkageKind kind,
                                         const BinaryHierarchy& tree) {
    std::vector<double> profile(static_cast<std::size_t>(tree.leaf_count() - 1), 0.0);
    for (int id = 0; id < tree.node_count(); ++id) {
        const auto& n = tree.node(id);
        if (n.is_leaf()) continue;
        profile[static_cast<std::size_t>(tree.depth_of(id) - 1)] += linkage_eval(
            data, kind, tree.node(n.left).cluster, tree.node(n.right).cluster);
    }
    return profile;
}

/// All 2|J|-1 values ℓ(I, sibling(I)) in ascending order; each sibling
/// pair appears twice and the root once as zero.
inline std::vector<double> sorted_profile(const Dataset& data, LinkageKind kind,
                                          const BinaryHierarchy& tree) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(tree.node_count()));
    values.push_back(0.0); // root has no sibling
    for (int id = 0; id < tree.node_count(); ++id) {
        const auto& n = tree.node(id);
        if (n.is_leaf()) continue;
        const double v = linkage_eval(data, kind, tree.node(n.left).cluster,
                                      tree.node(n.right).cluster);
        values.push_back(v);
        values.push_back(v);
    }
    std::sort(values.begin(), values.end());
    return values;
}

/// Local homogeneity at a grandchild I with parent P: the sibling pair
/// under P must be at least as close to each other as either is to P's
/// sibling. Equality passes.
inline bool is_locally_homogeneous(const Dataset& data, LinkageKind kind,
                                   const BinaryHierarchy& tree, const Cluster& grandchild) {
    const auto rel = relations(tree, grandchild);
    if (!rel.is_grandchild)
        throw NotAGrandchildError("local homogeneity is defined at grandchildren");
    const Cluster& sibling = *rel.sibling;
    const Cluster parent_sibling = *relations(tree, *rel.parent).sibling;
    const double inner = linkage_eval(data, kind, grandchild, sibling);
    const double to_outer = linkage_eval(data, kind, grandchild, parent_sibling);
    const double sibling_to_outer = linkage_eval(data, kind, sibling, parent_sibling);
    return inner <= std::min(to_outer, sibling_to_outer);
}

/// First grandchild in pre-order (smaller-minimum-label child first) whose
/// sibling pair strictly violates local homogeneity, or nothing.
inline std::optional<Cluster> find_violation(const Dataset& data, LinkageKind kind,
                                             const BinaryHierarchy& tree) {
    for (int id : tree.preorder()) {
        const auto& n = tree.node(id);
        if (n.parent < 0) continue;
        const auto& p = tree.node(n.parent);
        if (p.parent < 0 || p.left != id) continue; // pair tested at its left child
        const auto& gp = tree.node(p.parent);
        const Cluster& sibling = tree.node(p.right).cluster;
        const Cluster& outer =
            tree.node(gp.left == n.parent ? gp.right : gp.left).cluster;
        const double inner = linkage_eval(data, kind, n.cluster, sibling);
        if (inner > std::min(linkage_eval(data, kind, n.cluster, outer),
                             linkage_eval(data, kind, sibling, outer)))
            return n.cluster;
    }
    return std::nullopt;
}

struct AnytimeStepResult {
    BinaryHierarchy tree;
    bool moved = false;
    std::optional<Cluster> swapped;
};

/// One repair step: locate the first violation, pick among the violating
/// pair the child farthest from the parent's sibling (ties to the smaller
/// minimum label) and swap it out with an NNI move.
inline AnytimeStepResult anytime_step(const Dataset& data, LinkageKind kind,
                                      const BinaryHierarchy& tree) {
    const auto violating = find_violation(data, kind, tree);
    if (!violating) return {tree, false, std::nullopt};
    const auto rel = relations(tree, *violating);
    const Cluster& sibling = *rel.sibling;
    const Cluster outer = *relations(tree, *rel.parent).sibling;
    const double own = linkage_eval(data, kind, *violating, outer);
    const double sib = linkage_eval(data, kind, sibling, outer);
    // the violating cluster is the pair's smaller-minimum-label child, so
    // it also wins the argmax tie
    const Cluster& star = sib > own ? sibling : *violating;
    return {nni_move(tree, star), true, star};
}

struct AnytimeStepRecord {
    Cluster violating_cluster;
    Cluster swapped_grandchild;
    double objective_h = 0.0;
    std::vector<double> level_profile;
    std::vector<double> sorted_profile;
};

struct AnytimeTrace {
    std::vector<AnytimeStepRecord> steps;
    BinaryHierarchy final_tree;
    std::size_t iterations = 0;
};

/// Incrementally maintained state for the anytime loop: a mutable tree
/// whose sibling-pair linkages are cached per node, with per-node
/// sufficient statistics where the kind admits them (ward always, average
/// under squared Euclidean or unit-norm cosine). An NNI move invalidates
/// exactly two cached pair values, so a step costs one scan plus two
/// linkage evaluations.
class AnytimeEngine {
public:
    AnytimeEngine(const Dataset& data, LinkageKind kind, const BinaryHierarchy& initial)
        : data_(&data), kind_(kind.kind) {
        if (!cluster_subset(initial.index_set(), data.index_set()))
            throw IndexSetMismatchError("tree labels missing from the dataset");

        use_stats_ = kind_ == Linkage::ward ||
                     (kind_ == Linkage::average && stats_cover_average());
        rows_.reserve(static_cast<std::size_t>(initial.leaf_count()));
        for (Label l : initial.index_set()) rows_.push_back(l);

        if (!use_stats_) {
            const std::size_t n = rows_.size();
            dist_.assign(n, std::vector<double>(n, 0.0));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    dist_[i][j] = dist_[j][i] = dissimilarity(data, rows_[i], rows_[j]);
        }

        nodes_.resize(static_cast<std::size_t>(initial.node_count()));
        for (int id = 0; id < initial.node_count(); ++id) {
            const auto& src = initial.node(id);
            auto& dst = nodes_[static_cast<std::size_t>(id)];
            dst.members.reserve(src.cluster.size());
            for (Label l : src.cluster) dst.members.push_back(row_of(l));
            dst.parent = src.parent;
            dst.left = src.left;
            dst.right = src.right;
        }
        root_ = initial.root();

        if (use_stats_) fill_stats(root_);
        for (auto& node : nodes_) node.pair_link = 0.0;
        for (std::size_t id = 0; id < nodes_.size(); ++id) {
            const auto& n = nodes_[id];
            if (n.left < 0) continue;
            const double v = link(n.left, n.right);
            nodes_[static_cast<std::size_t>(n.left)].pair_link = v;
            nodes_[static_cast<std::size_t>(n.right)].pair_link = v;
        }
    }

    struct Move {
        Cluster violating;
        Cluster swapped;
    };

    /// Scans for the first violating pair and repairs it. Returns the move
    /// made, or nothing when the tree is already homogeneous.
    std::optional<Move> step() {
        std::vector<int> stack{root_};
        while (!stack.empty()) {
            const int id = stack.back();
            stack.pop_back();
            const auto& n = nodes_[static_cast<std::size_t>(id)];
            if (n.left >= 0) {
                stack.push_back(n.right);
                stack.push_back(n.left);
            }
            const int p = n.parent;
            if (p < 0) continue;
            const auto& parent = nodes_[static_cast<std::size_t>(p)];
            if (parent.parent < 0 || parent.left != id) continue;

            const auto& grand = nodes_[static_cast<std::size_t>(parent.parent)];
            const int outer = grand.left == p ? grand.right : grand.left;
            const double own = link(id, outer);
            const double sib = link(parent.right, outer);
            if (n.pair_link > std::min(own, sib)) {
                const int star = sib > own ? parent.right : parent.left;
                Move move{cluster_of(id), cluster_of(star)};
                apply_move(star);
                return move;
            }
        }
        return std::nullopt;
    }

    double objective() const {
        double h = 0.0;
        for (const auto& n : nodes_) h += n.pair_link;
        return 0.5 * h;
    }

    std::vector<double> level_profile() const {
        std::vector<double> profile(leaf_count() - 1, 0.0);
        for (std::size_t id = 0; id < nodes_.size(); ++id) {
            const auto& n = nodes_[id];
            if (n.left < 0) continue;
            profile[static_cast<std::size_t>(depth_of(static_cast<int>(id)) - 1)] +=
                nodes_[static_cast<std::size_t>(n.left)].pair_link;
        }
        return profile;
    }

    std::vector<double> sorted_profile() const {
        std::vector<double> values;
        values.reserve(nodes_.size());
        for (const auto& n : nodes_) values.push_back(n.pair_link);
        std::sort(values.begin(), values.end());
        return values;
    }

    BinaryHierarchy tree() const {
        std::vector<BinaryHierarchy::Node> out(nodes_.size());
        for (std::size_t id = 0; id < nodes_.size(); ++id) {
            const auto& n = nodes_[id];
            out[id].cluster = cluster_of(static_cast<int>(id));
            out[id].parent = n.parent;
            out[id].left = n.left;
            out[id].right = n.right;
        }
        return BinaryHierarchy::from_nodes(std::move(out), root_);
    }

private:
    struct Node {
        std::vector<int> members; // dataset row indices, ascending
        int parent = -1;
        int left = -1;
        int right = -1;
        double pair_link = 0.0; // cached ℓ(this, sibling); 0 at the root
        SufficientStats stats;
    };

    const Dataset* data_;
    Linkage kind_;
    bool use_stats_ = false;
    std::vector<Label> rows_;               // row index -> label
    std::vector<std::vector<double>> dist_; // pairwise, only without stats
    std::vector<Node> nodes_;
    int root_ = -1;

    bool stats_cover_average() const {
        if (data_->kind() == Dissimilarity::squared_euclidean) return true;
        if (data_->kind() != Dissimilarity::cosine) return false;
        for (Label l : data_->labels()) {
            const auto p = data_->point(l);
            if (std::abs(dot(p, p) - 1.0) > 1e-12) return false;
        }
        return true;
    }

    int row_of(Label l) const {
        const auto it = std::lower_bound(rows_.begin(), rows_.end(), l);
        return static_cast<int>(it - rows_.begin());
    }

    Cluster cluster_of(int id) const {
        Cluster c;
        c.reserve(nodes_[static_cast<std::size_t>(id)].members.size());
        for (int r : nodes_[static_cast<std::size_t>(id)].members)
            c.push_back(rows_[static_cast<std::size_t>(r)]);
        return c;
    }

    std::size_t leaf_count() const { return (nodes_.size() + 1) / 2; }

    int depth_of(int id) const {
        int d = 1;
        for (int p = nodes_[static_cast<std::size_t>(id)].parent; p >= 0;
             p = nodes_[static_cast<std::size_t>(p)].parent)
            ++d;
        return d;
    }

    void fill_stats(int id) {
        auto& n = nodes_[static_cast<std::size_t>(id)];
        if (n.left < 0) {
            const auto p = data_->point(rows_[static_cast<std::size_t>(n.members[0])]);
            n.stats = {1, std::vector<double>(p.begin(), p.end()), 0.0};
            return;
        }
        fill_stats(n.left);
        fill_stats(n.right);
        n.stats = merge_stats(nodes_[static_cast<std::size_t>(n.left)].stats,
                              nodes_[static_cast<std::size_t>(n.right)].stats);
    }

    double link(int a, int b) const {
        const auto& na = nodes_[static_cast<std::size_t>(a)];
        const auto& nb = nodes_[static_cast<std::size_t>(b)];
        if (kind_ == Linkage::ward) return fast_ward(na.stats, nb.stats);
        if (use_stats_)
            return fast_average(na.stats, nb.stats,
                                data_->kind() == Dissimilarity::cosine
                                    ? Dissimilarity::cosine
                                    : Dissimilarity::squared_euclidean);
        switch (kind_) {
        case Linkage::single:
        case Linkage::complete:
        case Linkage::average: {
            double acc =
                kind_ == Linkage::single ? std::numeric_limits<double>::infinity() : 0.0;
            for (int i : na.members)
                for (int j : nb.members) {
                    const double d =
                        dist_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                    if (kind_ == Linkage::single) acc = std::min(acc, d);
                    else if (kind_ == Linkage::complete) acc = std::max(acc, d);
                    else acc += d;
                }
            if (kind_ == Linkage::average)
                acc /= static_cast<double>(na.members.size()) *
                       static_cast<double>(nb.members.size());
            return acc;
        }
        case Linkage::minimax: {
            std::vector<int> all;
            all.reserve(na.members.size() + nb.members.size());
            std::merge(na.members.begin(), na.members.end(), nb.members.begin(),
                       nb.members.end(), std::back_inserter(all));
            double best = std::numeric_limits<double>::infinity();
            for (int i : all) {
                double radius = 0.0;
                for (int j : all)
                    radius = std::max(
                        radius,
                        dist_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
                best = std::min(best, radius);
            }
            return best;
        }
        default:
            throw UnsupportedKindError("unhandled linkage kind");
        }
    }

    void apply_move(int g) {
        const int p = nodes_[static_cast<std::size_t>(g)].parent;
        const int gp = nodes_[static_cast<std::size_t>(p)].parent;
        auto& pn = nodes_[static_cast<std::size_t>(p)];
        auto& gn = nodes_[static_cast<std::size_t>(gp)];
        const int sib = pn.left == g ? pn.right : pn.left;
        const int psib = gn.left == p ? gn.right : gn.left;

        auto& sn = nodes_[static_cast<std::size_t>(sib)];
        auto& on = nodes_[static_cast<std::size_t>(psib)];
        std::vector<int> merged;
        merged.reserve(sn.members.size() + on.members.size());
        std::merge(sn.members.begin(), sn.members.end(), on.members.begin(),
                   on.members.end(), std::back_inserter(merged));
        pn.members = std::move(merged);
        pn.left = sn.members.front() < on.members.front() ? sib : psib;
        pn.right = pn.left == sib ? psib : sib;
        sn.parent = p;
        on.parent = p;
        nodes_[static_cast<std::size_t>(g)].parent = gp;
        const auto& gmem = nodes_[static_cast<std::size_t>(g)].members;
        gn.left = gmem.front() < pn.members.front() ? g : p;
        gn.right = gn.left == g ? p : g;
        if (use_stats_) pn.stats = merge_stats(sn.stats, on.stats);

        const double inner = link(sib, psib);
        sn.pair_link = inner;
        on.pair_link = inner;
        const double upper = link(g, p);
        nodes_[static_cast<std::size_t>(g)].pair_link = upper;
        pn.pair_link = upper;
    }
};

/// Runs repair steps until the tree is homogeneous, recording the
/// objective and both profiles after every move. The iteration budget
/// (default 10·|J|²) turns a floating-point comparison cycle into an
/// error instead of a hang.
inline AnytimeTrace anytime_cluster(const Dataset& data, LinkageKind kind,
                                    const BinaryHierarchy& initial,
                                    std::size_t max_iterations = 0) {
    const auto n = static_cast<std::size_t>(initial.leaf_count());
    const std::size_t budget = max_iterations > 0 ? max_iterations : 10 * n * n;
    AnytimeEngine engine(data, kind, initial);
    AnytimeTrace trace;
    for (;;) {
        auto move = engine.step();
        if (!move) break;
        if (trace.steps.size() == budget)
            throw IterationBudgetExceededError(
                "no homogeneous tree within " + std::to_string(budget) + " iterations");
        trace.steps.push_back({std::move(move->violating), std::move(move->swapped),
                               engine.objective(), engine.level_profile(),
                               engine.sorted_profile()});
    }
    trace.final_tree = engine.tree();
    trace.iterations = trace.steps.size();
    return trace;
}

} // namespace treeclust
