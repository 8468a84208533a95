#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rrg/spectra.hpp"
#include "rrg/walks.hpp"
#include "rrg/words.hpp"

namespace rrg {

enum class PolyKind { T, U, Phi, Gamma, P };

// Stable three-term recurrence evaluation of the polynomial bases used for
// linear eigenvalue statistics. T and U take the argument directly; Phi,
// Gamma and P live on [-2,2] and halve the argument internally.
inline double eval_basis(PolyKind kind, int k, double x, int d = 0) {
    if (k < 0) throw std::invalid_argument("eval_basis: k must be >= 0");
    if ((kind == PolyKind::Gamma || kind == PolyKind::P) && d < 1)
        throw std::invalid_argument("eval_basis: Gamma and P need d >= 1");
    auto cheb_t = [](int n, double y) {
        if (n == 0) return 1.0;
        double prev = 1.0, cur = y;
        for (int i = 1; i < n; ++i) {
            double nxt = 2.0 * y * cur - prev;
            prev = cur;
            cur = nxt;
        }
        return cur;
    };
    auto cheb_u = [](int n, double y) {
        if (n < 0) return 0.0;
        if (n == 0) return 1.0;
        double prev = 1.0, cur = 2.0 * y;
        for (int i = 1; i < n; ++i) {
            double nxt = 2.0 * y * cur - prev;
            prev = cur;
            cur = nxt;
        }
        return cur;
    };
    switch (kind) {
        case PolyKind::T:
            return cheb_t(k, x);
        case PolyKind::U:
            return cheb_u(k, x);
        case PolyKind::Phi:
            return k == 0 ? 1.0 : 2.0 * cheb_t(k, 0.5 * x);
        case PolyKind::Gamma: {
            if (k == 0) return 1.0;
            double g = 2.0 * cheb_t(k, 0.5 * x);
            if (k % 2 == 0) g += (2.0 * d - 2.0) / std::pow(2.0 * d - 1.0, k / 2);
            return g;
        }
        case PolyKind::P:
            return cheb_u(k, 0.5 * x) - (k >= 2 ? cheb_u(k - 2, 0.5 * x) / (2.0 * d - 1.0) : 0.0);
    }
    throw std::logic_error("eval_basis: unknown kind");
}

enum class SeriesBasis { Phi, Gamma };

// Finite expansion f(x) = sum_k c_k B_k(x) on [-2,2], B in {Phi, Gamma(d)}.
struct ChebSeries {
    SeriesBasis basis = SeriesBasis::Phi;
    int d = 0;  // only meaningful for the Gamma basis
    Eigen::VectorXd coeffs;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    double eval(double x) const {
        PolyKind kind = basis == SeriesBasis::Phi ? PolyKind::Phi : PolyKind::Gamma;
        double sum = 0.0;
        for (int k = 0; k <= degree(); ++k) sum += coeffs(k) * eval_basis(kind, k, x, d);
        return sum;
    }
};

// Gamma_k and Phi_k differ by a constant for even k, so converting a series
// between the bases only moves mass into c_0.
inline ChebSeries to_gamma_basis(const ChebSeries& s, int d) {
    if (s.basis == SeriesBasis::Gamma) return s;
    ChebSeries out{SeriesBasis::Gamma, d, s.coeffs};
    for (int k = 2; k <= s.degree(); k += 2)
        out.coeffs(0) -= s.coeffs(k) * (2.0 * d - 2.0) / std::pow(2.0 * d - 1.0, k / 2);
    return out;
}

inline ChebSeries to_phi_basis(const ChebSeries& s) {
    if (s.basis == SeriesBasis::Phi) return s;
    ChebSeries out{SeriesBasis::Phi, 0, s.coeffs};
    for (int k = 2; k <= s.degree(); k += 2)
        out.coeffs(0) += s.coeffs(k) * (2.0 * s.d - 2.0) / std::pow(2.0 * s.d - 1.0, k / 2);
    return out;
}

// Chebyshev-Gauss quadrature at 4K nodes on x = 2 cos(theta):
// c_k = (1/pi) int_0^pi f(2 cos t) cos(kt) dt.
inline ChebSeries expand(const std::function<double(double)>& f, int K, SeriesBasis basis, int d = 0) {
    if (K <= 0) throw std::invalid_argument("expand: K must be positive");
    const int nodes = 4 * K;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(K + 1);
    for (int j = 0; j < nodes; ++j) {
        double theta = (j + 0.5) * std::numbers::pi / nodes;
        double fx = f(2.0 * std::cos(theta));
        for (int k = 0; k <= K; ++k) c(k) += fx * std::cos(k * theta);
    }
    c /= static_cast<double>(nodes);
    ChebSeries phi{SeriesBasis::Phi, 0, c};
    return basis == SeriesBasis::Phi ? phi : to_gamma_basis(phi, d);
}

// Grid sup of |f - f_K| over [-a, a]; used to measure coefficient decay.
inline double truncation_error(const std::function<double(double)>& f, const ChebSeries& series, int K,
                               double a = 2.0, int grid = 10000) {
    if (a < 2.0) throw std::invalid_argument("truncation_error: interval bound must be >= 2");
    ChebSeries truncated = series;
    if (K < series.degree()) truncated.coeffs = series.coeffs.head(K + 1).eval();
    double sup = 0.0;
    for (int i = 0; i <= grid; ++i) {
        double x = -a + 2.0 * a * i / grid;
        sup = std::max(sup, std::abs(f(x) - truncated.eval(x)));
    }
    return sup;
}

enum class LinStatMode { FixedD, GrowingD };

struct LinStatResult {
    double raw = 0.0;       // sum_i f(lambda_i)
    double centered = 0.0;  // raw - n c_0 (- m^f_r(n) in growing mode)
};

// Centering constant m^f_r(n) of the growing-d law.
inline double growing_centering(const ChebSeries& phi_series, int r, long long n, int d) {
    double m = 0.0;
    for (int i = 1; i <= std::min(r, phi_series.degree()); ++i) {
        double mu = static_cast<double>(mean_cnbw_infty(d, i));
        double even_shift = (i % 2 == 0) ? (2.0 * d - 2.0) * static_cast<double>(n) : 0.0;
        m += phi_series.coeffs(i) * std::pow(2.0 * d - 1.0, -0.5 * i) * (mu - even_shift);
    }
    return m;
}

inline LinStatResult linear_statistic(const Spectrum& spec, const ChebSeries& series, LinStatMode mode,
                                      int r = -1) {
    if (mode == LinStatMode::FixedD && series.basis != SeriesBasis::Gamma)
        throw std::invalid_argument("linear_statistic: fixed-d mode needs a Gamma-basis series");
    if (mode == LinStatMode::GrowingD && series.basis != SeriesBasis::Phi)
        throw std::invalid_argument("linear_statistic: growing-d mode needs a Phi-basis series");
    if (r < 0) r = series.degree();
    LinStatResult res;
    for (int i = 0; i < spec.n; ++i) res.raw += series.eval(spec.values(i));
    res.centered = res.raw - spec.n * series.coeffs(0);
    if (mode == LinStatMode::GrowingD)
        res.centered -= growing_centering(series, r, spec.n, spec.d);
    return res;
}

// Walk-side route through the trace identity; in both modes the centered
// statistic reduces to sum_k c_k (2d-1)^(-k/2) CNBW_k (minus its mean, in
// growing mode).
inline double linear_statistic_from_walks(const CountVector& cnbw, const ChebSeries& series,
                                          LinStatMode mode, int r = -1) {
    if (r < 0) r = series.degree();
    r = std::min({r, series.degree(), cnbw.r()});
    double sum = 0.0;
    for (int k = 1; k <= r; ++k) {
        double term = static_cast<double>(cnbw.at(k));
        if (mode == LinStatMode::GrowingD) term -= static_cast<double>(mean_cnbw_infty(cnbw.d, k));
        sum += series.coeffs(k) * std::pow(2.0 * cnbw.d - 1.0, -0.5 * k) * term;
    }
    return sum;
}

// r_n = floor(beta log n / log(2d-1)), clamped to at least 1.
inline int rn_rule(long long n, int d, double beta) {
    if (beta <= 0.0 || beta >= 0.5) throw std::invalid_argument("rn_rule: beta must lie in (0, 1/2)");
    if (d < 2) throw std::invalid_argument("rn_rule: d must be >= 2");
    int r = static_cast<int>(std::floor(beta * std::log(static_cast<double>(n)) / std::log(2.0 * d - 1.0)));
    return std::max(r, 1);
}

// Kesten-McKay density normalized to support [-2,2].
inline double kesten_mckay_density(int d, double x) {
    if (std::abs(x) > 2.0) throw std::domain_error("kesten_mckay_density: |x| must be <= 2");
    double twod = 2.0 * d;
    return twod * (twod - 1.0) * std::sqrt(4.0 - x * x) /
           (2.0 * std::numbers::pi * (twod * twod - (twod - 1.0) * x * x));
}

}  // namespace rrg
