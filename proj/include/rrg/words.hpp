#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace rrg {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// A generator pi_g or its inverse. Generators are numbered 1..d.
struct Letter {
    int gen = 1;
    bool inverted = false;

    friend bool operator==(const Letter&, const Letter&) = default;
    // Lexicographic letter order: pi_1 < pi_1^-1 < pi_2 < pi_2^-1 < ...
    friend auto operator<=>(const Letter& a, const Letter& b) {
        if (a.gen != b.gen) return a.gen <=> b.gen;
        return static_cast<int>(a.inverted) <=> static_cast<int>(b.inverted);
    }
};

inline Letter inverse(Letter l) { return {l.gen, !l.inverted}; }

using Word = std::vector<Letter>;

// e[i-1] = number of occurrences of pi_i or pi_i^-1 in the word.
inline std::vector<int> word_profile(const Word& w, int d) {
    std::vector<int> e(static_cast<std::size_t>(d), 0);
    for (const Letter& l : w) e.at(static_cast<std::size_t>(l.gen - 1))++;
    return e;
}

// No adjacent inverse pair, including the wrap-around pair (w_1, w_k).
inline bool is_cyclically_reduced(const Word& w) {
    if (w.empty()) throw std::invalid_argument("is_cyclically_reduced: empty word");
    const std::size_t k = w.size();
    for (std::size_t i = 0; i + 1 < k; ++i)
        if (w[i + 1] == inverse(w[i])) return false;
    return w[0] != inverse(w[k - 1]);
}

// Number of cyclically reduced words of length k on 2d letters.
inline BigInt a_closed_form(int d, int k) {
    if (d < 1 || k < 1) throw std::invalid_argument("a_closed_form: d, k must be >= 1");
    BigInt base = 2 * d - 1;
    BigInt p = boost::multiprecision::pow(base, static_cast<unsigned>(k));
    return (k % 2 == 0) ? BigInt(p - 1 + 2 * d) : BigInt(p + 1);
}

inline BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt r = 1;
    for (int i = 0; i < k; ++i) {
        r *= n - i;
        r /= i + 1;
    }
    return r;
}

// Inclusion-exclusion over the positions at which an adjacent inverse pair
// occurs; the l = k term degenerates to a 2d correction for even k.
inline BigInt a_inclusion_exclusion(int d, int k) {
    if (d < 1 || k < 1) throw std::invalid_argument("a_inclusion_exclusion: d, k must be >= 1");
    BigInt sum = 0;
    for (int l = 0; l < k; ++l) {
        BigInt term = binomial(k, l) * boost::multiprecision::pow(BigInt(2 * d), static_cast<unsigned>(k - l));
        sum += (l % 2 == 0) ? term : -term;
    }
    if (k % 2 == 0) sum += 2 * d;
    return sum;
}

struct EnumerationBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Depth-first enumeration of cyclically reduced words in lexicographic
// order; only reduced prefixes are ever extended.
template <class Visit>
void visit_cyclically_reduced(int d, int k, Visit&& visit) {
    Word w;
    w.reserve(static_cast<std::size_t>(k));
    auto letters = [&] {
        std::vector<Letter> ls;
        for (int g = 1; g <= d; ++g) {
            ls.push_back({g, false});
            ls.push_back({g, true});
        }
        return ls;
    }();
    auto rec = [&](auto&& self) -> void {
        if (static_cast<int>(w.size()) == k) {
            if (w[0] != inverse(w.back())) visit(w);
            return;
        }
        for (const Letter& l : letters) {
            if (!w.empty() && l == inverse(w.back())) continue;
            w.push_back(l);
            self(self);
            w.pop_back();
        }
    };
    rec(rec);
}

inline void check_enumeration_budget(int d, int k) {
    long double total = 1;
    for (int i = 0; i < k; ++i) total *= 2.0L * d;
    if (total > 1e8L)
        throw EnumerationBudgetError("word enumeration budget exceeded: (2d)^k > 1e8");
}

}  // namespace detail

inline std::vector<Word> enumerate_cyclically_reduced(int d, int k) {
    if (d < 1 || k < 1) throw std::invalid_argument("enumerate_cyclically_reduced: d, k must be >= 1");
    detail::check_enumeration_budget(d, k);
    std::vector<Word> out;
    detail::visit_cyclically_reduced(d, k, [&](const Word& w) { out.push_back(w); });
    return out;
}

// [n]_j = n(n-1)...(n-j+1), with [n]_0 = 1.
inline BigInt falling_factorial(const BigInt& n, int j) {
    if (j < 0 || n < j) throw std::domain_error("falling_factorial: need 0 <= j <= n");
    BigInt r = 1;
    for (int i = 0; i < j; ++i) r *= n - i;
    return r;
}

// [n]_v * prod_i 1/[n]_{e_i}: the exact expected number of appearing trail
// tuples for a category with v vertices and per-label edge counts e.
inline BigRat expected_category_count(long long n, long long v, const std::vector<int>& e) {
    if (n < v) throw std::domain_error("expected_category_count: need n >= v");
    BigRat r(falling_factorial(BigInt(n), static_cast<int>(v)));
    for (int ei : e) {
        if (ei > n) throw std::domain_error("expected_category_count: need n >= max e_i");
        r /= BigRat(falling_factorial(BigInt(n), ei));
    }
    return r;
}

// Exact E[C_k^(n)] = (1/2k) sum_w [n]_k prod_i 1/[n]_{e_w^i}, grouping the
// cyclically reduced words by multiplicity profile.
inline BigRat expected_cycle_count_exact(long long n, int d, int k) {
    if (n < k) throw std::domain_error("expected_cycle_count_exact: need n >= k");
    detail::check_enumeration_budget(d, k);
    std::map<std::vector<int>, long long> profiles;
    detail::visit_cyclically_reduced(d, k, [&](const Word& w) { profiles[word_profile(w, d)]++; });
    BigRat total = 0;
    for (const auto& [profile, count] : profiles)
        total += BigRat(count) * expected_category_count(n, k, profile);
    return total / (2 * k);
}

// mu_k(d) = E[CNBW_k^infty] = sum_{j|k} a(d,j).
inline BigInt mean_cnbw_infty(int d, int k) {
    if (d < 1 || k < 1) throw std::invalid_argument("mean_cnbw_infty: d, k must be >= 1");
    BigInt sum = 0;
    for (int j = 1; j <= k; ++j)
        if (k % j == 0) sum += a_closed_form(d, j);
    return sum;
}

// Theta_k = E[(CNBW_k^infty)^2] = sum_{j|k} 2j a(d,j) + mu_k(d)^2.
inline BigInt theta(int d, int k) {
    BigInt var = 0;
    for (int j = 1; j <= k; ++j)
        if (k % j == 0) var += 2 * j * a_closed_form(d, j);
    BigInt mu = mean_cnbw_infty(d, k);
    return var + mu * mu;
}

}  // namespace rrg
