#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "treeclust/dataset.hpp"
#include "treeclust/errors.hpp"
#include "treeclust/hierarchy.hpp"

namespace treeclust {

enum class Linkage { single, complete, average, minimax, ward };

/// How a linkage value is obtained: from the defining formula, by folding
/// the Lance-Williams recurrence up from singletons, or from cached
/// sufficient statistics (ward always; average only under squared
/// Euclidean or unit-norm cosine dissimilarity).
enum class EvalStrategy { direct, recurrence, sufficient_stats };

struct LinkageKind {
    Linkage kind = Linkage::single;
    EvalStrategy strategy = EvalStrategy::direct;

    LinkageKind() = default;
    LinkageKind(Linkage k) : kind(k) {} // NOLINT: implicit by design
    LinkageKind(Linkage k, EvalStrategy s) : kind(k), strategy(s) {}
};

inline std::string to_string(Linkage k) {
    switch (k) {
    case Linkage::single: return "single";
    case Linkage::complete: return "complete";
    case Linkage::average: return "average";
    case Linkage::minimax: return "minimax";
    case Linkage::ward: return "ward";
    }
    return "?";
}

inline Linkage linkage_from_string(const std::string& s) {
    if (s == "single") return Linkage::single;
    if (s == "complete") return Linkage::complete;
    if (s == "average") return Linkage::average;
    if (s == "minimax") return Linkage::minimax;
    if (s == "ward") return Linkage::ward;
    throw UnsupportedKindError("unknown linkage: " + s);
}

/// Ward's linkage from sufficient statistics: |A||B|/(|A|+|B|) times the
/// squared centroid gap. Constant time in the cluster sizes.
inline double fast_ward(const SufficientStats& a, const SufficientStats& b) {
    if (a.centroid.size() != b.centroid.size())
        throw DimensionMismatchError("stats have different dimensions");
    const auto na = static_cast<double>(a.cardinality);
    const auto nb = static_cast<double>(b.cardinality);
    double gap = 0.0;
    for (std::size_t k = 0; k < a.centroid.size(); ++k) {
        const double d = a.centroid[k] - b.centroid[k];
        gap += d * d;
    }
    return na * nb / (na + nb) * gap;
}

/// Average linkage from sufficient statistics. Squared Euclidean uses the
/// bias-variance split var_A + var_B + ||c_A - c_B||^2; cosine assumes all
/// points are unit vectors, giving 1 - c_A . c_B.
inline double fast_average(const SufficientStats& a, const SufficientStats& b,
                           Dissimilarity kind) {
    if (a.centroid.size() != b.centroid.size())
        throw DimensionMismatchError("stats have different dimensions");
    switch (kind) {
    case Dissimilarity::squared_euclidean: {
        double gap = 0.0;
        for (std::size_t k = 0; k < a.centroid.size(); ++k) {
            const double d = a.centroid[k] - b.centroid[k];
            gap += d * d;
        }
        return a.variance + b.variance + gap;
    }
    case Dissimilarity::cosine: {
        double dp = 0.0;
        for (std::size_t k = 0; k < a.centroid.size(); ++k)
            dp += a.centroid[k] * b.centroid[k];
        return 1.0 - dp;
    }
    case Dissimilarity::euclidean:
        break;
    }
    throw UnsupportedDissimilarityError(
        "sufficient statistics evaluate average linkage only under squared "
        "Euclidean or unit-norm cosine dissimilarity");
}

/// One step of the Lance-Williams recurrence: the linkage of a merged pair
/// to a third cluster from the three pre-merge values.
inline double lance_williams_update(Linkage kind, std::size_t size_a, std::size_t size_b,
                                    std::size_t size_c, double l_ac, double l_bc,
                                    double l_ab) {
    const auto na = static_cast<double>(size_a);
    const auto nb = static_cast<double>(size_b);
    const auto nc = static_cast<double>(size_c);
    switch (kind) {
    case Linkage::single:
        return 0.5 * l_ac + 0.5 * l_bc - 0.5 * std::abs(l_ac - l_bc);
    case Linkage::complete:
        return 0.5 * l_ac + 0.5 * l_bc + 0.5 * std::abs(l_ac - l_bc);
    case Linkage::average:
        return (na * l_ac + nb * l_bc) / (na + nb);
    case Linkage::ward: {
        const double s = na + nb + nc;
        return ((na + nc) * l_ac + (nb + nc) * l_bc - nc * l_ab) / s;
    }
    case Linkage::minimax:
        break;
    }
    throw UnsupportedKindError("minimax linkage admits no recurrence update");
}

namespace detail {

inline void require_known(const Dataset& data, const Cluster& c) {
    for (Label l : c)
        if (!data.has_label(l))
            throw UnknownLabelError("label " + std::to_string(l) + " not in dataset");
}

inline double ward_direct(const Dataset& data, const Cluster& a, const Cluster& b) {
    return fast_ward(stats(data, a), stats(data, b));
}

inline double minimax_direct(const Dataset& data, const Cluster& a, const Cluster& b) {
    const Cluster u = cluster_union(a, b);
    double best = std::numeric_limits<double>::infinity();
    for (Label p : u) {
        double radius = 0.0;
        for (Label q : u) radius = std::max(radius, dissimilarity(data, p, q));
        best = std::min(best, radius);
    }
    return best;
}

inline double pairwise_reduce(const Dataset& data, Linkage kind, const Cluster& a,
                              const Cluster& b) {
    double acc = kind == Linkage::single ? std::numeric_limits<double>::infinity() : 0.0;
    for (Label i : a)
        for (Label j : b) {
            const double d = dissimilarity(data, i, j);
            switch (kind) {
            case Linkage::single: acc = std::min(acc, d); break;
            case Linkage::complete: acc = std::max(acc, d); break;
            default: acc += d; break;
            }
        }
    if (kind == Linkage::average)
        acc /= static_cast<double>(a.size()) * static_cast<double>(b.size());
    return acc;
}

inline double singleton_base(const Dataset& data, Linkage kind, Label i, Label j) {
    if (kind == Linkage::ward)
        return 0.5 * squared_distance(data.point(i), data.point(j));
    return dissimilarity(data, i, j);
}

/// Evaluates a linkage by merging singletons one at a time, carrying the
/// full linkage matrix with Lance-Williams updates. Slow but independent
/// of the defining formulas; the direct path is cross-checked against it.
inline double recurrence_eval(const Dataset& data, Linkage kind, const Cluster& a,
                              const Cluster& b) {
    std::vector<Cluster> groups;
    for (Label l : a) groups.push_back({l});
    for (Label l : b) groups.push_back({l});
    const std::size_t k = groups.size();
    std::vector<std::vector<double>> link(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            link[i][j] = link[j][i] = singleton_base(data, kind, groups[i][0], groups[j][0]);

    std::vector<std::size_t> active(k);
    for (std::size_t i = 0; i < k; ++i) active[i] = i;
    std::vector<std::size_t> sizes(k, 1);

    const auto merge_front = [&](std::size_t count) {
        // fold the first `count` active groups into one
        while (count > 1) {
            const std::size_t ia = active[0];
            const std::size_t ib = active[1];
            for (std::size_t pos = 2; pos < active.size(); ++pos) {
                const std::size_t ic = active[pos];
                link[ia][ic] = link[ic][ia] =
                    lance_williams_update(kind, sizes[ia], sizes[ib], sizes[ic],
                                          link[ia][ic], link[ib][ic], link[ia][ib]);
            }
            sizes[ia] += sizes[ib];
            active.erase(active.begin() + 1);
            --count;
        }
    };

    merge_front(a.size());
    // rotate so the grown b-part folds first while a stays a unit
    std::rotate(active.begin(), active.begin() + 1, active.end());
    merge_front(b.size());
    return link[active[0]][active[1]];
}

} // namespace detail

/// Linkage value between two disjoint clusters. An empty side always gives
/// zero, whatever the kind.
inline double linkage_eval(const Dataset& data, LinkageKind kind, const Cluster& a,
                           const Cluster& b) {
    detail::require_known(data, a);
    detail::require_known(data, b);
    if (a.empty() || b.empty()) return 0.0;
    if (!clusters_disjoint(a, b))
        throw OverlappingClustersError("linkage requires disjoint clusters");

    switch (kind.strategy) {
    case EvalStrategy::direct:
        break;
    case EvalStrategy::recurrence:
        if (kind.kind == Linkage::minimax)
            throw StrategyUnavailableError("minimax linkage admits no recurrence update");
        return detail::recurrence_eval(data, kind.kind, a, b);
    case EvalStrategy::sufficient_stats:
        if (kind.kind == Linkage::ward)
            return fast_ward(stats(data, a), stats(data, b));
        if (kind.kind == Linkage::average &&
            (data.kind() == Dissimilarity::squared_euclidean ||
             data.kind() == Dissimilarity::cosine))
            return fast_average(stats(data, a), stats(data, b), data.kind());
        throw StrategyUnavailableError(
            "sufficient statistics cover ward, and average under squared "
            "Euclidean or unit-norm cosine dissimilarity");
    }

    switch (kind.kind) {
    case Linkage::single:
    case Linkage::complete:
    case Linkage::average:
        return detail::pairwise_reduce(data, kind.kind, a, b);
    case Linkage::minimax:
        return detail::minimax_direct(data, a, b);
    case Linkage::ward:
        return detail::ward_direct(data, a, b);
    }
    throw UnsupportedKindError("unhandled linkage kind");
}

struct ReducibilityCheck {
    bool reducible_ok = true;
    bool strongly_reducible_ok = true;
    bool nni_reducible_ok = true;
};

/// Tests one disjoint triple against the three merge-behaviour properties.
/// Comparisons carry a 1e-12 slack so exact ties never count as violations.
inline ReducibilityCheck check_reducibility_on_triple(const Dataset& data, LinkageKind kind,
                                                      const Cluster& a, const Cluster& b,
                                                      const Cluster& c) {
    if (a.empty() || b.empty() || c.empty())
        throw Error("reducibility checks need non-empty clusters");
    if (!clusters_disjoint(a, b) || !clusters_disjoint(a, c) || !clusters_disjoint(b, c))
        throw OverlappingClustersError("clusters must be pairwise disjoint");
    constexpr double tol = 1e-12;

    const double l_ab = linkage_eval(data, kind, a, b);
    const double l_ac = linkage_eval(data, kind, a, c);
    const double l_bc = linkage_eval(data, kind, b, c);
    const double l_ab_c = linkage_eval(data, kind, cluster_union(a, b), c);

    ReducibilityCheck out;
    out.strongly_reducible_ok = l_ab_c >= std::min(l_ac, l_bc) - tol;
    out.reducible_ok = !(l_ab <= std::min(l_ac, l_bc) + tol) || out.strongly_reducible_ok;

    const double l_ac_b = linkage_eval(data, kind, cluster_union(a, c), b);
    const double l_bc_a = linkage_eval(data, kind, cluster_union(b, c), a);
    const bool nni_premise = l_bc <= std::min(l_ab, l_ac) + tol;
    const bool nni_conclusion =
        std::min(l_ab + l_ab_c, l_ac + l_ac_b) >= l_bc + l_bc_a - tol;
    out.nni_reducible_ok = !nni_premise || nni_conclusion;
    return out;
}

} // namespace treeclust
