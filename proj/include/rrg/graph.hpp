#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rrg/rng.hpp"
#include "rrg/words.hpp"

namespace rrg {

using Permutation = std::vector<std::int32_t>;

inline bool is_permutation_table(const Permutation& p) {
    std::vector<bool> seen(p.size(), false);
    for (std::int32_t v : p) {
        if (v < 0 || v >= static_cast<std::int32_t>(p.size()) || seen[static_cast<std::size_t>(v)])
            return false;
        seen[static_cast<std::size_t>(v)] = true;
    }
    return true;
}

inline Permutation invert(const Permutation& p) {
    Permutation inv(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) inv[static_cast<std::size_t>(p[i])] = static_cast<std::int32_t>(i);
    return inv;
}

// 2d-regular multigraph on n vertices built from d permutations: one edge
// (i, perm_j(i)) for every i and j, loops counting 2 toward the degree.
struct PermutationGraph {
    int n = 0;
    int d = 0;
    std::vector<Permutation> perms;
    std::vector<Permutation> inv_perms;

    PermutationGraph() = default;
    PermutationGraph(int n_, std::vector<Permutation> perms_)
        : n(n_), d(static_cast<int>(perms_.size())), perms(std::move(perms_)) {
        for (const Permutation& p : perms) {
            if (static_cast<int>(p.size()) != n || !is_permutation_table(p))
                throw std::invalid_argument("PermutationGraph: invalid permutation table");
            inv_perms.push_back(invert(p));
        }
    }

    // Image of v under one letter.
    std::int32_t step(Letter l, std::int32_t v) const {
        const auto& table = l.inverted ? inv_perms : perms;
        return table[static_cast<std::size_t>(l.gen - 1)][static_cast<std::size_t>(v)];
    }
};

inline Permutation random_permutation(int n, Xoshiro256pp& rng) {
    Permutation p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    // Fisher-Yates with unbiased bounded draws.
    for (int i = n - 1; i > 0; --i) {
        auto j = static_cast<std::size_t>(rng.bounded(static_cast<std::uint64_t>(i) + 1));
        std::swap(p[static_cast<std::size_t>(i)], p[j]);
    }
    return p;
}

inline PermutationGraph sample_graph(int n, int d, Xoshiro256pp& rng) {
    if (n < 1 || d < 1) throw std::invalid_argument("sample_graph: n, d must be >= 1");
    std::vector<Permutation> perms;
    perms.reserve(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) perms.push_back(random_permutation(n, rng));
    return PermutationGraph(n, std::move(perms));
}

inline PermutationGraph sample_graph(int n, int d, std::uint64_t seed, std::uint64_t stream = 0) {
    Xoshiro256pp rng(seed, stream);
    return sample_graph(n, d, rng);
}

// Symmetric count matrix with self-loops counted twice on the diagonal.
inline Eigen::MatrixXi adjacency(const PermutationGraph& g) {
    Eigen::MatrixXi A = Eigen::MatrixXi::Zero(g.n, g.n);
    for (int j = 0; j < g.d; ++j)
        for (int i = 0; i < g.n; ++i) {
            int to = g.perms[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            A(i, to) += 1;
            A(to, i) += 1;
        }
    return A;
}

inline std::int32_t apply_word(const PermutationGraph& g, const Word& w, std::int32_t v) {
    for (const Letter& l : w) v = g.step(l, v);
    return v;
}

// A closed trail: vertices s_0..s_{k-1} and a word w of length k, with edge
// i running s_i -> s_{i+1 mod k} labeled w_{i+1}.
struct TrailSpec {
    std::vector<std::int32_t> vertices;
    Word word;

    int length() const { return static_cast<int>(word.size()); }
    std::int32_t vertex(int i) const {
        return vertices[static_cast<std::size_t>(i % length())];
    }

    void validate(int n, int d) const {
        if (word.empty() || word.size() != vertices.size())
            throw std::invalid_argument("TrailSpec: need |word| == |vertices| >= 1");
        for (const Letter& l : word)
            if (l.gen < 1 || l.gen > d) throw std::invalid_argument("TrailSpec: letter out of range");
        if (!is_cyclically_reduced(word))
            throw std::invalid_argument("TrailSpec: word not cyclically reduced");
        std::vector<std::int32_t> sorted = vertices;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("TrailSpec: vertices must be distinct");
        if (sorted.front() < 0 || sorted.back() >= n)
            throw std::invalid_argument("TrailSpec: vertex out of range");
    }
};

inline bool contains_trail(const PermutationGraph& g, const TrailSpec& s) {
    for (int i = 0; i < s.length(); ++i)
        if (g.step(s.word[static_cast<std::size_t>(i)], s.vertex(i)) != s.vertex(i + 1)) return false;
    return true;
}

namespace detail {

// Constraint edges of s for generator l, oriented so pi_l(a) = b.
inline std::vector<std::pair<std::int32_t, std::int32_t>> constraint_edges(const TrailSpec& s, int l) {
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    for (int i = 0; i < s.length(); ++i) {
        const Letter& w = s.word[static_cast<std::size_t>(i)];
        if (w.gen != l) continue;
        if (w.inverted)
            edges.emplace_back(s.vertex(i + 1), s.vertex(i));
        else
            edges.emplace_back(s.vertex(i), s.vertex(i + 1));
    }
    return edges;
}

}  // namespace detail

// Size-biased coupling: G' distributed as g conditioned to contain the cycle
// s, built by composing one transposition per constrained edge,
// pi_l' = tau_M ... tau_1 pi_l.
inline PermutationGraph couple_conditioned(const PermutationGraph& g, const TrailSpec& s) {
    s.validate(g.n, g.d);
    std::vector<Permutation> perms = g.perms;
    for (int l = 1; l <= g.d; ++l) {
        Permutation& p = perms[static_cast<std::size_t>(l - 1)];
        Permutation inv = invert(p);
        for (auto [a, b] : detail::constraint_edges(s, l)) {
            // tau swaps the values p(a) and b.
            std::int32_t c = p[static_cast<std::size_t>(a)];
            if (c == b) continue;
            std::int32_t a2 = inv[static_cast<std::size_t>(b)];
            std::swap(p[static_cast<std::size_t>(a)], p[static_cast<std::size_t>(a2)]);
            std::swap(inv[static_cast<std::size_t>(c)], inv[static_cast<std::size_t>(b)]);
        }
    }
    PermutationGraph out(g.n, std::move(perms));
    if (!contains_trail(out, s))
        throw std::logic_error("couple_conditioned: coupled graph does not contain the trail");
    return out;
}

// A directed labeled edge i -> pi_gen(i).
struct LabeledEdge {
    std::int32_t tail = 0;
    std::int32_t head = 0;
    int gen = 1;

    friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

// Directed labeled edges of g that are absent from g_prime.
inline std::vector<LabeledEdge> removed_edges(const PermutationGraph& g, const PermutationGraph& g_prime) {
    if (g.n != g_prime.n || g.d != g_prime.d)
        throw std::invalid_argument("removed_edges: shape mismatch");
    std::vector<LabeledEdge> out;
    for (int l = 0; l < g.d; ++l)
        for (int i = 0; i < g.n; ++i) {
            std::int32_t to = g.perms[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)];
            if (g_prime.perms[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] != to)
                out.push_back({i, to, l + 1});
        }
    return out;
}

// The coupling lemma's shape condition: a removed edge i -> j labeled pi_l
// must share its labeled tail or labeled head with the trail.
inline bool shares_tail_or_head(const TrailSpec& s, const LabeledEdge& e) {
    for (auto [a, b] : detail::constraint_edges(s, e.gen))
        if (a == e.tail || b == e.head) return true;
    return false;
}

}  // namespace rrg
