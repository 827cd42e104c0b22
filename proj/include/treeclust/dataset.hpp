#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "treeclust/errors.hpp"
#include "treeclust/hierarchy.hpp"

namespace treeclust {

enum class Dissimilarity { euclidean, squared_euclidean, cosine };

inline std::string to_string(Dissimilarity d) {
    switch (d) {
    case Dissimilarity::euclidean: return "euclidean";
    case Dissimilarity::squared_euclidean: return "sqeuclidean";
    case Dissimilarity::cosine: return "cosine";
    }
    return "?";
}

inline Dissimilarity dissimilarity_from_string(const std::string& s) {
    if (s == "euclidean") return Dissimilarity::euclidean;
    if (s == "sqeuclidean" || s == "squared_euclidean") return Dissimilarity::squared_euclidean;
    if (s == "cosine") return Dissimilarity::cosine;
    throw UnsupportedDissimilarityError("unknown dissimilarity: " + s);
}

/// Point set in R^m with a bijective leaf labelling and a fixed
/// dissimilarity kind. Rows are stored in sorted-label order.
class Dataset {
public:
    Dataset(std::vector<Label> labels, std::vector<std::vector<double>> rows,
            Dissimilarity kind = Dissimilarity::euclidean)
        : kind_(kind) {
        if (labels.size() != rows.size())
            throw DimensionMismatchError("label and row counts differ");
        if (labels.empty()) throw EmptyDatasetError("dataset has no points");
        dim_ = rows.front().size();
        if (dim_ == 0) throw DimensionMismatchError("points need at least one coordinate");

        std::vector<std::size_t> order(labels.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });

        labels_.reserve(labels.size());
        coords_.reserve(labels.size() * dim_);
        for (std::size_t idx : order) {
            if (!labels_.empty() && labels_.back() == labels[idx])
                throw DuplicateLabelError("duplicate label " + std::to_string(labels[idx]));
            if (rows[idx].size() != dim_)
                throw DimensionMismatchError("rows have mixed dimensions");
            labels_.push_back(labels[idx]);
            coords_.insert(coords_.end(), rows[idx].begin(), rows[idx].end());
        }
        if (kind_ == Dissimilarity::cosine) check_nonzero_norms();
    }

    std::size_t size() const { return labels_.size(); }
    std::size_t dimension() const { return dim_; }
    Dissimilarity kind() const { return kind_; }
    const std::vector<Label>& labels() const { return labels_; }
    IndexSet index_set() const { return labels_; }

    bool has_label(Label l) const {
        return std::binary_search(labels_.begin(), labels_.end(), l);
    }

    std::span<const double> point(Label l) const {
        return {coords_.data() + row_of(l) * dim_, dim_};
    }

    /// Copy with one extra point appended.
    Dataset with_point(Label l, const std::vector<double>& coords) const {
        if (has_label(l)) throw DuplicateLabelError("duplicate label " + std::to_string(l));
        if (coords.size() != dim_) throw DimensionMismatchError("new point has wrong dimension");
        Dataset out(*this);
        const auto pos = std::lower_bound(out.labels_.begin(), out.labels_.end(), l);
        const auto row = static_cast<std::size_t>(pos - out.labels_.begin());
        out.labels_.insert(pos, l);
        out.coords_.insert(out.coords_.begin() + static_cast<std::ptrdiff_t>(row * dim_),
                           coords.begin(), coords.end());
        if (kind_ == Dissimilarity::cosine) out.check_nonzero_norms();
        return out;
    }

    /// Copy with one point removed.
    Dataset without_point(Label l) const {
        const std::size_t row = row_of(l);
        if (labels_.size() == 1) throw EmptyDatasetError("removing the last point");
        Dataset out(*this);
        out.labels_.erase(out.labels_.begin() + static_cast<std::ptrdiff_t>(row));
        const auto first = out.coords_.begin() + static_cast<std::ptrdiff_t>(row * dim_);
        out.coords_.erase(first, first + static_cast<std::ptrdiff_t>(dim_));
        return out;
    }

private:
    std::vector<Label> labels_;
    std::vector<double> coords_;
    std::size_t dim_ = 0;
    Dissimilarity kind_ = Dissimilarity::euclidean;

    std::size_t row_of(Label l) const {
        const auto it = std::lower_bound(labels_.begin(), labels_.end(), l);
        if (it == labels_.end() || *it != l)
            throw UnknownLabelError("label " + std::to_string(l) + " not in dataset");
        return static_cast<std::size_t>(it - labels_.begin());
    }

    void check_nonzero_norms() const {
        for (std::size_t r = 0; r < labels_.size(); ++r) {
            double sq = 0.0;
            for (std::size_t k = 0; k < dim_; ++k) {
                const double v = coords_[r * dim_ + k];
                sq += v * v;
            }
            if (sq == 0.0)
                throw ZeroNormVectorError("cosine dissimilarity undefined for zero vector, label " +
                                          std::to_string(labels_[r]));
        }
    }
};

inline double squared_distance(std::span<const double> x, std::span<const double> y) {
    double sq = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        sq += d * d;
    }
    return sq;
}

inline double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
    return s;
}

/// Pairwise dissimilarity under the dataset's kind.
inline double dissimilarity(const Dataset& data, Label i, Label j) {
    const auto x = data.point(i);
    const auto y = data.point(j);
    switch (data.kind()) {
    case Dissimilarity::euclidean: return std::sqrt(squared_distance(x, y));
    case Dissimilarity::squared_euclidean: return squared_distance(x, y);
    case Dissimilarity::cosine: {
        const double nx = std::sqrt(dot(x, x));
        const double ny = std::sqrt(dot(y, y));
        if (nx == 0.0 || ny == 0.0)
            throw ZeroNormVectorError("cosine dissimilarity undefined for zero vector");
        return 1.0 - dot(x, y) / (nx * ny);
    }
    }
    throw UnsupportedDissimilarityError("unhandled dissimilarity kind");
}

/// Cardinality, centroid and population variance of a cluster. Together
/// these determine centroid-based linkages without touching the raw points.
struct SufficientStats {
    std::size_t cardinality = 0;
    std::vector<double> centroid;
    double variance = 0.0;
};

inline SufficientStats stats(const Dataset& data, const Cluster& cluster) {
    if (cluster.empty()) throw Error("stats of an empty cluster");
    const std::size_t m = data.dimension();
    SufficientStats s;
    s.cardinality = cluster.size();
    s.centroid.assign(m, 0.0);
    for (Label l : cluster) {
        const auto p = data.point(l);
        for (std::size_t k = 0; k < m; ++k) s.centroid[k] += p[k];
    }
    const double inv = 1.0 / static_cast<double>(s.cardinality);
    for (double& c : s.centroid) c *= inv;
    double acc = 0.0;
    for (Label l : cluster)
        acc += squared_distance(data.point(l), s.centroid);
    s.variance = acc * inv;
    return s;
}

/// Stats of the disjoint union from the parts alone: the centroid is the
/// size-weighted mean, the variance picks up a between-centroids bias term
/// |A||B|/(|A|+|B|)^2 ||c_A - c_B||^2.
inline SufficientStats merge_stats(const SufficientStats& a, const SufficientStats& b) {
    if (a.centroid.size() != b.centroid.size())
        throw DimensionMismatchError("stats have different dimensions");
    const auto na = static_cast<double>(a.cardinality);
    const auto nb = static_cast<double>(b.cardinality);
    const double n = na + nb;
    SufficientStats out;
    out.cardinality = a.cardinality + b.cardinality;
    out.centroid.resize(a.centroid.size());
    double bias = 0.0;
    for (std::size_t k = 0; k < out.centroid.size(); ++k) {
        out.centroid[k] = (na * a.centroid[k] + nb * b.centroid[k]) / n;
        const double d = a.centroid[k] - b.centroid[k];
        bias += d * d;
    }
    out.variance = (na * a.variance + nb * b.variance) / n + (na * nb) / (n * n) * bias;
    return out;
}

/// Sum of squared errors about the centroid; |I| times the variance.
inline double sse(const Dataset& data, const Cluster& cluster) {
    const SufficientStats s = stats(data, cluster);
    return static_cast<double>(s.cardinality) * s.variance;
}

/// Scales every point to unit norm. Required before the fast cosine path;
/// never applied implicitly.
inline Dataset normalize_dataset(const Dataset& data) {
    std::vector<std::vector<double>> rows;
    rows.reserve(data.size());
    for (Label l : data.labels()) {
        const auto p = data.point(l);
        const double norm = std::sqrt(dot(p, p));
        if (norm == 0.0)
            throw ZeroNormVectorError("cannot normalize zero vector, label " + std::to_string(l));
        std::vector<double> row(p.begin(), p.end());
        for (double& v : row) v /= norm;
        rows.push_back(std::move(row));
    }
    return Dataset(data.labels(), std::move(rows), data.kind());
}

} // namespace treeclust
