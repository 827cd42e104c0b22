#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "treeclust/batch_hac.hpp"
#include "treeclust/random.hpp"

using namespace treeclust;

namespace {

Dataset line4(Dissimilarity kind = Dissimilarity::euclidean) {
    return Dataset({1, 2, 3, 4}, {{0.0}, {1.0}, {3.0}, {7.0}}, kind);
}

Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t m) {
    std::vector<Label> labels;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(static_cast<Label>(i + 1));
        std::vector<double> row(m);
        for (double& v : row) v = 10.0 * uniform_unit(rng);
        rows.push_back(std::move(row));
    }
    return Dataset(std::move(labels), std::move(rows));
}

const std::vector<Cluster> chain_clusters{
    {1}, {1, 2}, {1, 2, 3}, {1, 2, 3, 4}, {2}, {3}, {4}};

constexpr Linkage all_kinds[]{Linkage::single, Linkage::complete, Linkage::average,
                              Linkage::minimax, Linkage::ward};

} // namespace

TEST_CASE("agglomeration on the 1-D quartet") {
    CHECK(hac(line4(), Linkage::single).cluster_set() == chain_clusters);
    CHECK(hac(line4(), Linkage::ward).cluster_set() == chain_clusters);
    CHECK(hac(line4(), Linkage::complete).cluster_set() == chain_clusters);
    CHECK(hac(line4(), Linkage::average).cluster_set() == chain_clusters);
    CHECK(hac(line4(), Linkage::minimax).cluster_set() == chain_clusters);
}

TEST_CASE("two points give the unique tree") {
    const Dataset two({5, 9}, {{0.0}, {1.0}});
    const auto tree = hac(two, Linkage::average);
    CHECK(tree.cluster_set() == std::vector<Cluster>{{5}, {5, 9}, {9}});
    CHECK_THROWS_AS(hac(Dataset({1}, {{0.0}}), Linkage::single), IndexSetTooSmallError);
}

TEST_CASE("equal linkages break ties toward smaller labels") {
    const Dataset grid({1, 2, 3, 4}, {{0.0}, {1.0}, {2.0}, {3.0}});
    // every adjacent pair sits at distance one; the chain from the left wins
    CHECK(hac(grid, Linkage::single).cluster_set() == chain_clusters);
}

TEST_CASE("outputs are monotone for every kind") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 6; ++trial) {
        const auto data = random_dataset(rng, 10 + uniform_below(rng, 50), 3);
        for (Linkage kind : all_kinds) {
            const auto tree = hac(data, kind);
            const auto check = is_monotone(data, kind, tree);
            INFO(to_string(kind));
            CHECK(check.monotone);
            CHECK_FALSE(check.violating_grandchild);
        }
    }
}

TEST_CASE("monotonicity checker flags the first bad grandchild") {
    const auto data = line4();
    CHECK(is_monotone(data, Linkage::single, hac(data, Linkage::single)).monotone);

    const auto bad = from_cluster_set(
        {1, 2, 3, 4}, {{1}, {2}, {3}, {4}, {1, 4}, {2, 3}, {1, 2, 3, 4}});
    const auto check = is_monotone(data, Linkage::single, bad);
    CHECK_FALSE(check.monotone);
    REQUIRE(check.violating_grandchild);
    CHECK(*check.violating_grandchild == Cluster{1});

    const Dataset other({7, 8}, {{0.0}, {1.0}});
    CHECK_THROWS_AS(is_monotone(other, Linkage::single, bad), IndexSetMismatchError);
}

TEST_CASE("three leaf trees with ordered linkages are monotone") {
    const Dataset data({1, 2, 3}, {{0.0}, {1.0}, {5.0}});
    const auto tree = from_cluster_set({1, 2, 3}, {{1}, {2}, {3}, {1, 2}, {1, 2, 3}});
    for (Linkage kind : all_kinds) CHECK(is_monotone(data, kind, tree).monotone);
}

TEST_CASE("single linkage trees are label-permutation equivariant on generic data") {
    std::mt19937_64 rng(23);
    const std::size_t n = 18;
    const auto data = random_dataset(rng, n, 2);
    const auto base = hac(data, Linkage::single).cluster_set();

    // relabel points by a random permutation and map the result back
    std::vector<Label> perm(data.labels());
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
    std::vector<Label> new_labels;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        new_labels.push_back(perm[i]);
        const auto p = data.point(data.labels()[i]);
        rows.emplace_back(p.begin(), p.end());
    }
    const Dataset relabelled(new_labels, rows);

    auto mapped = hac(relabelled, Linkage::single).cluster_set();
    std::vector<Label> inverse(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        inverse[static_cast<std::size_t>(perm[i])] = data.labels()[i];
    for (Cluster& c : mapped) {
        for (Label& l : c) l = inverse[static_cast<std::size_t>(l)];
        std::sort(c.begin(), c.end());
    }
    std::sort(mapped.begin(), mapped.end());
    CHECK(mapped == base);
}

TEST_CASE("hundred point run stays fast") {
    std::mt19937_64 rng(99);
    const auto data = random_dataset(rng, 100, 3);
    const auto tree = hac(data, Linkage::minimax);
    CHECK(tree.leaf_count() == 100);
    CHECK(tree.node_count() == 199);
}
