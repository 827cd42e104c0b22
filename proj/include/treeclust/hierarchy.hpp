#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "treeclust/errors.hpp"
#include "treeclust/random.hpp"

namespace treeclust {

using Label = int;

/// A cluster is a set of leaf labels, kept sorted and duplicate-free.
using Cluster = std::vector<Label>;

/// The leaf label set of a hierarchy; same canonical representation.
using IndexSet = Cluster;

/// Sorts and dedupes; convenient for literals in call sites and tests.
inline Cluster make_cluster(std::initializer_list<Label> labels) {
    Cluster c(labels);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

inline bool is_canonical_cluster(const Cluster& c) {
    return !c.empty() && std::is_sorted(c.begin(), c.end()) &&
           std::adjacent_find(c.begin(), c.end()) == c.end();
}

inline Cluster cluster_union(const Cluster& a, const Cluster& b) {
    Cluster out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline Cluster cluster_intersection(const Cluster& a, const Cluster& b) {
    Cluster out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline Cluster cluster_difference(const Cluster& a, const Cluster& b) {
    Cluster out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline bool clusters_disjoint(const Cluster& a, const Cluster& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else return false;
    }
    return true;
}

inline bool cluster_subset(const Cluster& a, const Cluster& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// The ordered (A,B,C) triple of common clusters characterizing an
/// NNI-adjacent tree pair: A∪B is the cluster unique to the first tree,
/// B∪C the one unique to the second.
struct NniTriplet {
    Cluster a;
    Cluster b;
    Cluster c;
};

struct NniTripletResult {
    std::optional<NniTriplet> triplet; ///< engaged iff the trees are NNI-adjacent
    bool trees_equal = false;          ///< true when the cluster sets coincide
};

/// Relations of one cluster inside a hierarchy. Depth counts the ancestors
/// of the cluster including itself, so the root sits at depth 1.
struct ClusterRelations {
    std::optional<Cluster> parent;
    std::optional<std::pair<Cluster, Cluster>> children;
    std::optional<Cluster> sibling;
    std::optional<Cluster> grandparent;
    bool is_grandchild = false;
    int depth = 0;
};

/// Rooted binary hierarchy over a finite label set. Immutable after
/// construction; restructuring operations return new trees. Two trees are
/// equal iff their cluster sets are equal. Children are canonically ordered
/// with the smaller minimum label on the left, so traversals are stable.
class BinaryHierarchy {
public:
    struct Node {
        Cluster cluster;
        int parent = -1;
        int left = -1;
        int right = -1;
        bool is_leaf() const { return left < 0; }
    };

    BinaryHierarchy() = default;

    /// Wraps an explicit node structure. Callers must supply a structurally
    /// valid tree; this canonicalizes child order and checks invariants.
    static BinaryHierarchy from_nodes(std::vector<Node> nodes, int root) {
        BinaryHierarchy tree;
        tree.nodes_ = std::move(nodes);
        tree.root_ = root;
        tree.canonicalize();
        tree.index_set_ = tree.nodes_[static_cast<std::size_t>(root)].cluster;
        tree.check_structure();
        return tree;
    }

    const IndexSet& index_set() const { return index_set_; }
    int root() const { return root_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    int leaf_count() const { return static_cast<int>(index_set_.size()); }
    const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }

    /// All clusters, sorted lexicographically.
    std::vector<Cluster> cluster_set() const {
        std::vector<Cluster> out;
        out.reserve(nodes_.size());
        for (const Node& n : nodes_) out.push_back(n.cluster);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Node id holding exactly this cluster, or -1.
    int find(const Cluster& cluster) const {
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].cluster == cluster) return static_cast<int>(i);
        return -1;
    }

    bool contains(const Cluster& cluster) const { return find(cluster) >= 0; }

    /// Node ids in depth-first pre-order, left child first.
    std::vector<int> preorder() const {
        std::vector<int> order;
        order.reserve(nodes_.size());
        std::vector<int> stack{root_};
        while (!stack.empty()) {
            int id = stack.back();
            stack.pop_back();
            order.push_back(id);
            const Node& n = node(id);
            if (!n.is_leaf()) {
                stack.push_back(n.right);
                stack.push_back(n.left);
            }
        }
        return order;
    }

    /// Grandchild clusters G(τ) in pre-order scan order.
    std::vector<Cluster> grandchildren() const {
        std::vector<Cluster> out;
        for (int id : preorder()) {
            const Node& n = node(id);
            if (n.parent >= 0 && node(n.parent).parent >= 0) out.push_back(n.cluster);
        }
        return out;
    }

    /// Number of ancestors of the node including itself (root: 1).
    int depth_of(int id) const {
        int d = 1;
        for (int p = node(id).parent; p >= 0; p = node(p).parent) ++d;
        return d;
    }

    friend bool operator==(const BinaryHierarchy& a, const BinaryHierarchy& b) {
        return a.cluster_set() == b.cluster_set();
    }
    friend bool operator!=(const BinaryHierarchy& a, const BinaryHierarchy& b) {
        return !(a == b);
    }

private:
    std::vector<Node> nodes_;
    int root_ = -1;
    IndexSet index_set_;

    void canonicalize() {
        for (Node& n : nodes_) {
            if (n.is_leaf()) continue;
            const Cluster& l = nodes_[static_cast<std::size_t>(n.left)].cluster;
            const Cluster& r = nodes_[static_cast<std::size_t>(n.right)].cluster;
            if (l.front() > r.front()) std::swap(n.left, n.right);
        }
    }

    void check_structure() const {
        if (root_ < 0 || nodes_.empty()) throw NotBinaryError("empty tree");
        const std::size_t n = index_set_.size();
        if (nodes_.size() != 2 * n - 1)
            throw NotBinaryError("node count is not 2|J|-1");
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const Node& node = nodes_[i];
            if (!is_canonical_cluster(node.cluster))
                throw NotBinaryError("cluster not in canonical form");
            if (node.is_leaf()) {
                if (node.cluster.size() != 1 || node.right >= 0)
                    throw NotBinaryError("leaf with children");
            } else {
                const Cluster& l = nodes_[static_cast<std::size_t>(node.left)].cluster;
                const Cluster& r = nodes_[static_cast<std::size_t>(node.right)].cluster;
                if (!clusters_disjoint(l, r) || cluster_union(l, r) != node.cluster)
                    throw NotBinaryError("children do not partition their parent");
            }
            if (node.parent < 0 && static_cast<int>(i) != root_)
                throw NotBinaryError("non-root node without parent");
        }
    }

    friend class TreeBuilder;
};

/// Incremental construction of hierarchies by attaching one leaf at a time
/// to a chosen edge. Edges are indexed 0..2k-2 for a k-leaf tree: first the
/// parent edges of non-root nodes in id order, then the virtual root edge.
/// Backs uniform sampling and exhaustive enumeration.
class TreeBuilder {
public:
    TreeBuilder(Label first, Label second) {
        nodes_.push_back({Cluster{first}, 2, -1, -1});
        nodes_.push_back({Cluster{second}, 2, -1, -1});
        nodes_.push_back({cluster_union(nodes_[0].cluster, nodes_[1].cluster), -1, 0, 1});
        root_ = 2;
    }

    int leaf_count() const { return (static_cast<int>(nodes_.size()) + 1) / 2; }
    int edge_count() const { return static_cast<int>(nodes_.size()); } // 2k-2 real + root edge

    void attach_leaf(Label label, int edge) {
        const int root_edge = edge_count() - 1;
        const int leaf = static_cast<int>(nodes_.size());
        nodes_.push_back({Cluster{label}, -1, -1, -1});
        if (edge == root_edge) { // grow a new root
            const int top = static_cast<int>(nodes_.size());
            nodes_.push_back({insert_label(nodes_[static_cast<std::size_t>(root_)].cluster, label),
                              -1, root_, leaf});
            nodes_[static_cast<std::size_t>(root_)].parent = top;
            nodes_[static_cast<std::size_t>(leaf)].parent = top;
            root_ = top;
            return;
        }
        const int below = nth_nonroot(edge);
        const int above = nodes_[static_cast<std::size_t>(below)].parent;
        const int mid = static_cast<int>(nodes_.size());
        nodes_.push_back({insert_label(nodes_[static_cast<std::size_t>(below)].cluster, label),
                          above, below, leaf});
        auto& parent = nodes_[static_cast<std::size_t>(above)];
        (parent.left == below ? parent.left : parent.right) = mid;
        nodes_[static_cast<std::size_t>(below)].parent = mid;
        nodes_[static_cast<std::size_t>(leaf)].parent = mid;
        for (int a = above; a >= 0; a = nodes_[static_cast<std::size_t>(a)].parent)
            nodes_[static_cast<std::size_t>(a)].cluster =
                insert_label(nodes_[static_cast<std::size_t>(a)].cluster, label);
    }

    BinaryHierarchy build() const {
        return BinaryHierarchy::from_nodes(nodes_, root_);
    }

private:
    std::vector<BinaryHierarchy::Node> nodes_;
    int root_ = -1;

    int nth_nonroot(int k) const {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (static_cast<int>(i) == root_) continue;
            if (k-- == 0) return static_cast<int>(i);
        }
        throw Error("edge index out of range");
    }

    static Cluster insert_label(Cluster c, Label x) {
        c.insert(std::upper_bound(c.begin(), c.end(), x), x);
        return c;
    }
};

/// Reconstructs the unique hierarchy whose cluster set equals the given
/// laminar family. The family must contain the full index set, every
/// singleton, and give every non-singleton exactly one two-way split.
inline BinaryHierarchy from_cluster_set(const IndexSet& index_set,
                                        std::vector<Cluster> clusters) {
    if (!is_canonical_cluster(index_set))
        throw MissingRootOrLeafError("index set must be non-empty, sorted and distinct");
    for (Cluster& c : clusters) {
        if (c.empty()) throw NotBinaryError("empty cluster in family");
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        if (!cluster_subset(c, index_set))
            throw UnknownLabelError("cluster contains a label outside the index set");
    }
    std::sort(clusters.begin(), clusters.end());
    clusters.erase(std::unique(clusters.begin(), clusters.end()), clusters.end());

    if (std::find(clusters.begin(), clusters.end(), index_set) == clusters.end())
        throw MissingRootOrLeafError("family does not contain the index set");
    for (Label x : index_set)
        if (std::find(clusters.begin(), clusters.end(), Cluster{x}) == clusters.end())
            throw MissingRootOrLeafError("family is missing a singleton");

    for (std::size_t i = 0; i < clusters.size(); ++i)
        for (std::size_t j = i + 1; j < clusters.size(); ++j) {
            const Cluster& a = clusters[i];
            const Cluster& b = clusters[j];
            if (!clusters_disjoint(a, b) && !cluster_subset(a, b) && !cluster_subset(b, a))
                throw NotLaminarError("two clusters overlap without nesting");
        }

    // parent of a cluster = its smallest strict superset in the family
    const std::size_t k = clusters.size();
    std::vector<int> parent(k, -1);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t best = k;
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j || clusters[j].size() <= clusters[i].size()) continue;
            if (!cluster_subset(clusters[i], clusters[j])) continue;
            if (best == k || clusters[j].size() < clusters[best].size()) best = j;
        }
        if (best < k) parent[i] = static_cast<int>(best);
    }

    std::vector<std::vector<int>> children(k);
    int root = -1;
    for (std::size_t i = 0; i < k; ++i) {
        if (parent[i] < 0) root = static_cast<int>(i);
        else children[static_cast<std::size_t>(parent[i])].push_back(static_cast<int>(i));
    }

    std::vector<BinaryHierarchy::Node> nodes(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto& ch = children[i];
        if (clusters[i].size() == 1) {
            if (!ch.empty()) throw NotBinaryError("singleton with sub-clusters");
        } else if (ch.size() != 2) {
            throw NotBinaryError("cluster without a two-way split");
        }
        nodes[i].cluster = clusters[i];
        nodes[i].parent = parent[i];
        if (ch.size() == 2) {
            nodes[i].left = ch[0];
            nodes[i].right = ch[1];
        }
    }
    return BinaryHierarchy::from_nodes(std::move(nodes), root);
}

/// Parent, children, sibling, grandparent and depth of a cluster.
inline ClusterRelations relations(const BinaryHierarchy& tree, const Cluster& cluster) {
    const int id = tree.find(cluster);
    if (id < 0) throw UnknownClusterError("cluster not in tree");
    ClusterRelations rel;
    const auto& n = tree.node(id);
    if (!n.is_leaf())
        rel.children = {tree.node(n.left).cluster, tree.node(n.right).cluster};
    if (n.parent >= 0) {
        const auto& p = tree.node(n.parent);
        rel.parent = p.cluster;
        rel.sibling = tree.node(p.left == id ? p.right : p.left).cluster;
        if (p.parent >= 0) {
            rel.grandparent = tree.node(p.parent).cluster;
            rel.is_grandchild = true;
        }
    }
    rel.depth = tree.depth_of(id);
    return rel;
}

/// NNI move at a grandchild cluster: swaps it with its parent's sibling.
/// Exactly one cluster is exchanged — the grandchild's parent is replaced
/// by the union of the two swapped-out siblings.
inline BinaryHierarchy nni_move(const BinaryHierarchy& tree, const Cluster& grandchild) {
    const int g = tree.find(grandchild);
    if (g < 0) throw UnknownClusterError("cluster not in tree");
    const int p = tree.node(g).parent;
    if (p < 0 || tree.node(p).parent < 0)
        throw NotAGrandchildError("NNI move requires a cluster with a grandparent");
    const int gp = tree.node(p).parent;

    std::vector<BinaryHierarchy::Node> nodes;
    nodes.reserve(static_cast<std::size_t>(tree.node_count()));
    for (int i = 0; i < tree.node_count(); ++i) nodes.push_back(tree.node(i));

    const int sib = nodes[static_cast<std::size_t>(p)].left == g
                        ? nodes[static_cast<std::size_t>(p)].right
                        : nodes[static_cast<std::size_t>(p)].left;
    const int psib = nodes[static_cast<std::size_t>(gp)].left == p
                         ? nodes[static_cast<std::size_t>(gp)].right
                         : nodes[static_cast<std::size_t>(gp)].left;

    // reuse p's slot for the new sibling∪parent's-sibling cluster
    auto& slot = nodes[static_cast<std::size_t>(p)];
    slot.cluster = cluster_union(nodes[static_cast<std::size_t>(sib)].cluster,
                                 nodes[static_cast<std::size_t>(psib)].cluster);
    slot.left = sib;
    slot.right = psib;
    slot.parent = gp;
    nodes[static_cast<std::size_t>(sib)].parent = p;
    nodes[static_cast<std::size_t>(psib)].parent = p;
    nodes[static_cast<std::size_t>(g)].parent = gp;
    auto& top = nodes[static_cast<std::size_t>(gp)];
    top.left = g;
    top.right = p;
    return BinaryHierarchy::from_nodes(std::move(nodes), tree.root());
}

/// Decides NNI adjacency via the unique-triplet characterization. Equal
/// trees are reported as non-adjacent with trees_equal set.
inline NniTripletResult nni_triplet(const BinaryHierarchy& tree_a,
                                    const BinaryHierarchy& tree_b) {
    if (tree_a.index_set() != tree_b.index_set())
        throw IndexSetMismatchError("trees are over different index sets");
    const auto ca = tree_a.cluster_set();
    const auto cb = tree_b.cluster_set();
    std::vector<Cluster> only_a;
    std::vector<Cluster> only_b;
    std::set_difference(ca.begin(), ca.end(), cb.begin(), cb.end(), std::back_inserter(only_a));
    std::set_difference(cb.begin(), cb.end(), ca.begin(), ca.end(), std::back_inserter(only_b));
    if (only_a.empty() && only_b.empty()) return {std::nullopt, true};
    if (only_a.size() != 1 || only_b.size() != 1) return {std::nullopt, false};

    // the triple is forced: A∪B = only_a, B∪C = only_b, with B their overlap
    NniTriplet t;
    t.a = cluster_difference(only_a[0], only_b[0]);
    t.b = cluster_intersection(only_a[0], only_b[0]);
    t.c = cluster_difference(only_b[0], only_a[0]);
    if (t.a.empty() || t.b.empty() || t.c.empty()) return {std::nullopt, false};
    const auto common = [&](const Cluster& c) {
        return std::binary_search(ca.begin(), ca.end(), c) &&
               std::binary_search(cb.begin(), cb.end(), c);
    };
    if (!common(t.a) || !common(t.b) || !common(t.c)) return {std::nullopt, false};
    return {std::move(t), false};
}

/// Samples uniformly over the (2|J|-3)!! hierarchies by sequential leaf
/// insertion at a uniformly chosen edge.
inline BinaryHierarchy random_tree(const IndexSet& index_set, std::uint64_t rng_seed) {
    if (!is_canonical_cluster(index_set) || index_set.size() < 2)
        throw IndexSetTooSmallError("need at least two labels");
    std::mt19937_64 rng(rng_seed);
    TreeBuilder builder(index_set[0], index_set[1]);
    for (std::size_t i = 2; i < index_set.size(); ++i) {
        const auto edges = static_cast<std::uint64_t>(builder.edge_count());
        builder.attach_leaf(index_set[i], static_cast<int>(uniform_below(rng, edges)));
    }
    return builder.build();
}

/// (2n-3)!! as an exact decimal string; the tree-space size grows too fast
/// for any fixed-width integer.
inline std::string count_trees(int n) {
    if (n < 2) throw IndexSetTooSmallError("count is defined for n >= 2");
    std::vector<std::uint64_t> limbs{1}; // little-endian base 1e9
    constexpr std::uint64_t base = 1000000000ULL;
    for (int k = 3; k <= n; ++k) {
        const auto factor = static_cast<std::uint64_t>(2 * k - 3);
        std::uint64_t carry = 0;
        for (auto& limb : limbs) {
            const std::uint64_t v = limb * factor + carry;
            limb = v % base;
            carry = v / base;
        }
        while (carry) {
            limbs.push_back(carry % base);
            carry /= base;
        }
    }
    std::string out = std::to_string(limbs.back());
    for (auto it = limbs.rbegin() + 1; it != limbs.rend(); ++it) {
        std::string part = std::to_string(*it);
        out += std::string(9 - part.size(), '0') + part;
    }
    return out;
}

/// Visits every hierarchy over the index set exactly once.
inline void for_each_tree(const IndexSet& index_set,
                          const std::function<void(const BinaryHierarchy&)>& visit) {
    if (!is_canonical_cluster(index_set) || index_set.size() < 2)
        throw IndexSetTooSmallError("need at least two labels");
    if (index_set.size() > 10)
        throw IndexSetTooLargeError("enumeration is super-exponential; |J| <= 10");
    std::function<void(TreeBuilder&, std::size_t)> recurse =
        [&](TreeBuilder& builder, std::size_t next) {
            if (next == index_set.size()) {
                visit(builder.build());
                return;
            }
            const int edges = builder.edge_count();
            for (int e = 0; e < edges; ++e) {
                TreeBuilder copy = builder;
                copy.attach_leaf(index_set[next], e);
                recurse(copy, next + 1);
            }
        };
    TreeBuilder base(index_set[0], index_set[1]);
    recurse(base, 2);
}

inline std::vector<BinaryHierarchy> enumerate_trees(const IndexSet& index_set) {
    std::vector<BinaryHierarchy> out;
    for_each_tree(index_set, [&](const BinaryHierarchy& t) { out.push_back(t); });
    return out;
}

} // namespace treeclust
