#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "rrg/graph.hpp"

using namespace rrg;

TEST_CASE("permutation table validation and inversion") {
    CHECK(is_permutation_table({2, 0, 1}));
    CHECK_FALSE(is_permutation_table({0, 0, 1}));
    CHECK_FALSE(is_permutation_table({0, 3, 1}));
    Permutation p{2, 0, 1};
    Permutation inv = invert(p);
    for (std::int32_t i = 0; i < 3; ++i) CHECK(inv[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])] == i);
}

TEST_CASE("adjacency is symmetric with row sums 2d and even diagonal") {
    auto g = sample_graph(30, 3, 42);
    Eigen::MatrixXi A = adjacency(g);
    CHECK(A == A.transpose());
    for (int i = 0; i < g.n; ++i) {
        CHECK(A.row(i).sum() == 2 * g.d);
        CHECK(A(i, i) % 2 == 0);
    }
}

TEST_CASE("sampling is deterministic per (seed, stream)") {
    auto g1 = sample_graph(50, 2, 7, 3);
    auto g2 = sample_graph(50, 2, 7, 3);
    auto g3 = sample_graph(50, 2, 7, 4);
    CHECK(g1.perms == g2.perms);
    CHECK(g1.perms != g3.perms);
}

TEST_CASE("uniformity smoke test: single-cell chi-square stays sane") {
    // position 0 of pi_1 should be uniform over n values
    const int n = 8, trials = 8000;
    std::vector<int> hits(n, 0);
    for (int t = 0; t < trials; ++t) {
        auto g = sample_graph(n, 1, 99, static_cast<std::uint64_t>(t));
        hits[static_cast<std::size_t>(g.perms[0][0])]++;
    }
    double expect = static_cast<double>(trials) / n, chi2 = 0.0;
    for (int h : hits) chi2 += (h - expect) * (h - expect) / expect;
    CHECK(chi2 < 30.0);  // df = 7; crossing 30 has probability < 1e-4
}

TEST_CASE("trail spec validation") {
    TrailSpec s;
    s.vertices = {0, 1, 2};
    s.word = {{1, false}, {1, false}, {2, true}};
    CHECK_NOTHROW(s.validate(5, 2));
    s.word[1] = {1, true};  // adjacent inverse pair
    CHECK_THROWS_AS(s.validate(5, 2), std::invalid_argument);
    s.word[1] = {1, false};
    s.vertices = {0, 1, 1};
    CHECK_THROWS_AS(s.validate(5, 2), std::invalid_argument);
    s.vertices = {0, 1, 7};
    CHECK_THROWS_AS(s.validate(5, 2), std::invalid_argument);
    s.vertices = {0, 1, 2};
    s.word[2] = {3, false};
    CHECK_THROWS_AS(s.validate(5, 2), std::invalid_argument);
}

TEST_CASE("coupled graph always contains the trail; removed edges share ends") {
    Xoshiro256pp rng(5);
    for (int t = 0; t < 200; ++t) {
        auto g = sample_graph(20, 2, 11, static_cast<std::uint64_t>(t));
        TrailSpec s;
        s.vertices = {3, 8, 15};
        do {
            s.word.clear();
            for (int i = 0; i < 3; ++i)
                s.word.push_back({static_cast<int>(rng.bounded(2)) + 1, rng.bounded(2) == 1});
        } while (!is_cyclically_reduced(s.word));
        PermutationGraph gp = couple_conditioned(g, s);
        CHECK(contains_trail(gp, s));
        for (const LabeledEdge& e : removed_edges(g, gp)) CHECK(shares_tail_or_head(s, e));
    }
}

TEST_CASE("coupling law: conditioning a loop at 0 with n=4, d=1 is exact") {
    // Brute force: over all 24 base permutations, the coupled pi' must be
    // uniform on the 6 permutations fixing 0 (each hit exactly 4 times).
    TrailSpec s;
    s.vertices = {0};
    s.word = {{1, false}};
    Permutation base{0, 1, 2, 3};
    std::map<Permutation, int> law;
    do {
        PermutationGraph g(4, {base});
        PermutationGraph gp = couple_conditioned(g, s);
        law[gp.perms[0]]++;
    } while (std::next_permutation(base.begin(), base.end()));
    CHECK(law.size() == 6);
    for (const auto& [perm, count] : law) {
        CHECK(perm[0] == 0);
        CHECK(count == 4);
    }
}

TEST_CASE("apply_word walks letter by letter") {
    PermutationGraph g(3, {{1, 2, 0}});
    Word w{{1, false}, {1, false}};
    CHECK(apply_word(g, w, 0) == 2);
    Word wi{{1, true}};
    CHECK(apply_word(g, wi, 0) == 2);
}
