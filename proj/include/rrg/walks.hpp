#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rrg/graph.hpp"
#include "rrg/words.hpp"

namespace rrg {

enum class CountKind { Cycles, Nbw, Cnbw, Bad };

// Integer walk/cycle counts for lengths 1..r.
struct CountVector {
    CountKind kind = CountKind::Cycles;
    int n = 0;
    int d = 0;
    std::vector<std::int64_t> values;  // values[k-1] = count at length k

    int r() const { return static_cast<int>(values.size()); }
    std::int64_t at(int k) const { return values.at(static_cast<std::size_t>(k - 1)); }
};

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_walk_count_range(int n, int d, int r) {
    // Worst case CNBW_k <= 2dn (2d-1)^(k-1); keep a wide margin below 2^63.
    long double bound = 2.0L * d * n;
    for (int i = 1; i < r; ++i) bound *= 2.0L * d - 1;
    if (bound > 4e18L) throw BudgetError("walk counts may overflow 64-bit integers");
}

}  // namespace detail

// C_k: closed trails of length k with distinct vertices s_0..s_{k-1} and
// cyclically reduced word, divided by the 2k cyclic/inverted shifts.
// Labeled depth-first search; a branch dies when it leaves the set of
// unvisited vertices or backtracks.
inline CountVector count_cycles(const PermutationGraph& g, int r) {
    if (r < 1) throw std::invalid_argument("count_cycles: r must be >= 1");
    std::vector<std::int64_t> trails(static_cast<std::size_t>(r), 0);
    std::vector<Letter> letters;
    for (int gen = 1; gen <= g.d; ++gen) {
        letters.push_back({gen, false});
        letters.push_back({gen, true});
    }
    std::vector<bool> visited(static_cast<std::size_t>(g.n), false);

    for (std::int32_t v0 = 0; v0 < g.n; ++v0) {
        // depth-first over reduced trails from v0
        struct Frame {
            std::int32_t vertex;
            Letter letter;
        };
        std::vector<Frame> stack;
        auto extend = [&](auto&& self, std::int32_t v, Letter first, Letter last, int depth) -> void {
            for (const Letter& l : letters) {
                if (depth > 0 && l == inverse(last)) continue;
                std::int32_t next = g.step(l, v);
                int k = depth + 1;
                if (next == v0) {
                    // closed: the wrap-around condition needs checking only here
                    Letter w1 = depth == 0 ? l : first;
                    if (l != inverse(w1)) trails[static_cast<std::size_t>(k - 1)]++;
                    continue;
                }
                if (k >= r || visited[static_cast<std::size_t>(next)]) continue;
                visited[static_cast<std::size_t>(next)] = true;
                self(self, next, depth == 0 ? l : first, l, k);
                visited[static_cast<std::size_t>(next)] = false;
            }
        };
        visited[static_cast<std::size_t>(v0)] = true;
        extend(extend, v0, Letter{}, Letter{}, 0);
        visited[static_cast<std::size_t>(v0)] = false;
    }

    CountVector out{CountKind::Cycles, g.n, g.d, {}};
    out.values.resize(static_cast<std::size_t>(r));
    for (int k = 1; k <= r; ++k) {
        std::int64_t t = trails[static_cast<std::size_t>(k - 1)];
        if (t % (2 * k) != 0)
            throw std::logic_error("count_cycles: trail count not divisible by 2k");
        out.values[static_cast<std::size_t>(k - 1)] = t / (2 * k);
    }
    return out;
}

// CNBW_k = sum over cyclically reduced words of |Fix(w_k o ... o w_1)|.
// Enumeration oracle; cost grows like a(d,k) * k * n.
inline CountVector count_cnbw_words(const PermutationGraph& g, int r) {
    if (r < 1) throw std::invalid_argument("count_cnbw_words: r must be >= 1");
    detail::check_walk_count_range(g.n, g.d, r);
    CountVector out{CountKind::Cnbw, g.n, g.d, {}};
    out.values.resize(static_cast<std::size_t>(r), 0);
    std::vector<std::int32_t> image(static_cast<std::size_t>(g.n));
    for (int k = 1; k <= r; ++k) {
        detail::check_enumeration_budget(g.d, k);
        std::int64_t total = 0;
        detail::visit_cyclically_reduced(g.d, k, [&](const Word& w) {
            for (std::int32_t v = 0; v < g.n; ++v) image[static_cast<std::size_t>(v)] = v;
            for (const Letter& l : w) {
                const auto& table = l.inverted ? g.inv_perms : g.perms;
                const Permutation& p = table[static_cast<std::size_t>(l.gen - 1)];
                for (std::int32_t v = 0; v < g.n; ++v)
                    image[static_cast<std::size_t>(v)] = p[static_cast<std::size_t>(image[static_cast<std::size_t>(v)])];
            }
            for (std::int32_t v = 0; v < g.n; ++v)
                if (image[static_cast<std::size_t>(v)] == v) ++total;
        });
        out.values[static_cast<std::size_t>(k - 1)] = total;
    }
    return out;
}

// CNBW_k = tr(B^k) for the non-backtracking transfer operator on directed
// edge states (vertex, arriving letter); exact integer arithmetic.
inline CountVector count_cnbw_transfer(const PermutationGraph& g, int r) {
    if (r < 1) throw std::invalid_argument("count_cnbw_transfer: r must be >= 1");
    detail::check_walk_count_range(g.n, g.d, r);
    const int letters = 2 * g.d;
    const std::int64_t states = static_cast<std::int64_t>(g.n) * letters;
    if (states > 200000) throw BudgetError("count_cnbw_transfer: state space 2dn too large");

    auto letter_of = [&](int idx) { return Letter{idx / 2 + 1, (idx % 2) != 0}; };
    auto state_id = [&](std::int32_t v, int a) { return static_cast<std::size_t>(v) * static_cast<std::size_t>(letters) + static_cast<std::size_t>(a); };

    CountVector out{CountKind::Cnbw, g.n, g.d, {}};
    out.values.resize(static_cast<std::size_t>(r), 0);

    std::vector<std::int64_t> cur(static_cast<std::size_t>(states)), next(static_cast<std::size_t>(states));
    for (std::int64_t s0 = 0; s0 < states; ++s0) {
        std::fill(cur.begin(), cur.end(), 0);
        cur[static_cast<std::size_t>(s0)] = 1;
        for (int step = 1; step <= r; ++step) {
            std::fill(next.begin(), next.end(), 0);
            for (std::int64_t s = 0; s < states; ++s) {
                std::int64_t c = cur[static_cast<std::size_t>(s)];
                if (c == 0) continue;
                auto v = static_cast<std::int32_t>(s / letters);
                int a = static_cast<int>(s % letters);
                for (int b = 0; b < letters; ++b) {
                    Letter lb = letter_of(b);
                    if (lb == inverse(letter_of(a))) continue;
                    next[state_id(g.step(lb, v), b)] += c;
                }
            }
            std::swap(cur, next);
            out.values[static_cast<std::size_t>(step - 1)] += cur[static_cast<std::size_t>(s0)];
        }
    }
    return out;
}

// Direct dynamic program over (vertex, last letter) states with an open
// first step; counts all closed non-backtracking walks.
inline CountVector count_nbw_dp(const PermutationGraph& g, int r) {
    if (r < 1) throw std::invalid_argument("count_nbw_dp: r must be >= 1");
    detail::check_walk_count_range(g.n, g.d, r);
    const int letters = 2 * g.d;
    const std::size_t states = static_cast<std::size_t>(g.n) * static_cast<std::size_t>(letters);
    auto letter_of = [&](int idx) { return Letter{idx / 2 + 1, (idx % 2) != 0}; };
    auto state_id = [&](std::int32_t v, int a) { return static_cast<std::size_t>(v) * static_cast<std::size_t>(letters) + static_cast<std::size_t>(a); };

    CountVector out{CountKind::Nbw, g.n, g.d, {}};
    out.values.resize(static_cast<std::size_t>(r), 0);
    std::vector<std::int64_t> cur(states), next(states);
    for (std::int32_t v0 = 0; v0 < g.n; ++v0) {
        std::fill(cur.begin(), cur.end(), 0);
        for (int b = 0; b < letters; ++b) cur[state_id(g.step(letter_of(b), v0), b)] += 1;
        for (int k = 1; k <= r; ++k) {
            if (k > 1) {
                std::fill(next.begin(), next.end(), 0);
                for (std::size_t s = 0; s < states; ++s) {
                    std::int64_t c = cur[s];
                    if (c == 0) continue;
                    auto v = static_cast<std::int32_t>(s / static_cast<std::size_t>(letters));
                    int a = static_cast<int>(s % static_cast<std::size_t>(letters));
                    for (int b = 0; b < letters; ++b) {
                        Letter lb = letter_of(b);
                        if (lb == inverse(letter_of(a))) continue;
                        next[state_id(g.step(lb, v), b)] += c;
                    }
                }
                std::swap(cur, next);
            }
            for (int a = 0; a < letters; ++a)
                out.values[static_cast<std::size_t>(k - 1)] += cur[state_id(v0, a)];
        }
    }
    return out;
}

// NBW from CNBW by the tail-adding recursion:
// NBW_k = CNBW_k + (2d-1) NBW_{k-2} - CNBW_{k-2} for k >= 3.
inline CountVector count_nbw_from_cnbw(const CountVector& cnbw) {
    if (cnbw.kind != CountKind::Cnbw) throw std::invalid_argument("count_nbw_from_cnbw: expected CNBW input");
    CountVector out{CountKind::Nbw, cnbw.n, cnbw.d, cnbw.values};
    for (int k = 3; k <= cnbw.r(); ++k)
        out.values[static_cast<std::size_t>(k - 1)] =
            cnbw.at(k) + (2 * cnbw.d - 1) * out.at(k - 2) - cnbw.at(k - 2);
    return out;
}

inline CountVector count_nbw(const PermutationGraph& g, int r) {
    return count_nbw_from_cnbw(count_cnbw_transfer(g, r));
}

// B_k = CNBW_k - sum_{j|k} 2j C_j; nonnegative for every graph.
inline CountVector bad_walks(const CountVector& cycles, const CountVector& cnbw) {
    if (cycles.kind != CountKind::Cycles || cnbw.kind != CountKind::Cnbw || cycles.r() != cnbw.r())
        throw std::invalid_argument("bad_walks: need matching cycle and CNBW vectors");
    CountVector out{CountKind::Bad, cnbw.n, cnbw.d, {}};
    out.values.resize(static_cast<std::size_t>(cnbw.r()));
    for (int k = 1; k <= cnbw.r(); ++k) {
        std::int64_t good = 0;
        for (int j = 1; j <= k; ++j)
            if (k % j == 0) good += 2 * static_cast<std::int64_t>(j) * cycles.at(j);
        std::int64_t b = cnbw.at(k) - good;
        if (b < 0) throw std::logic_error("bad_walks: negative B_k indicates a counting bug");
        out.values[static_cast<std::size_t>(k - 1)] = b;
    }
    return out;
}

inline CountVector bad_walks(const PermutationGraph& g, int r) {
    return bad_walks(count_cycles(g, r), count_cnbw_words(g, r));
}

// Ntilde_k = (2d-1)^(-k/2) (CNBW_k - mu_k(d)).
inline Eigen::VectorXd centered_cnbw(const CountVector& cnbw) {
    if (cnbw.kind != CountKind::Cnbw) throw std::invalid_argument("centered_cnbw: expected CNBW input");
    Eigen::VectorXd out(cnbw.r());
    for (int k = 1; k <= cnbw.r(); ++k) {
        double mu = static_cast<double>(mean_cnbw_infty(cnbw.d, k));
        out(k - 1) = (static_cast<double>(cnbw.at(k)) - mu) /
                     std::pow(2.0 * cnbw.d - 1.0, 0.5 * k);
    }
    return out;
}

}  // namespace rrg
