#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "rrg/graph.hpp"
#include "rrg/walks.hpp"

namespace rrg {

// Eigenvalues of (2d-1)^(-1/2) A in descending order.
struct Spectrum {
    Eigen::VectorXd values;
    int n = 0;
    int d = 0;
};

inline Spectrum eigenvalues(const Eigen::MatrixXi& A, int d, bool check_residuals = false) {
    if (A.rows() != A.cols() || A != A.transpose())
        throw std::invalid_argument("eigenvalues: matrix must be symmetric");
    const double scale = 1.0 / std::sqrt(2.0 * d - 1.0);
    Eigen::MatrixXd M = A.cast<double>() * scale;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        M, check_residuals ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigenvalues: eigensolver did not converge");
    if (check_residuals) {
        const double bound = 1e-8 * M.norm();
        for (int i = 0; i < M.rows(); ++i) {
            Eigen::VectorXd res =
                M * solver.eigenvectors().col(i) - solver.eigenvalues()(i) * solver.eigenvectors().col(i);
            if (res.norm() > bound)
                throw std::runtime_error("eigenvalues: residual bound violated");
        }
    }
    Spectrum s;
    s.values = solver.eigenvalues().reverse();
    s.n = static_cast<int>(A.rows());
    s.d = d;
    return s;
}

inline Spectrum eigenvalues(const PermutationGraph& g, bool check_residuals = false) {
    return eigenvalues(adjacency(g), g.d, check_residuals);
}

// max(lambda_2, |lambda_n|) of the unscaled adjacency matrix.
inline double second_eigenvalue(const Eigen::MatrixXi& A) {
    if (A.rows() < 2) throw std::invalid_argument("second_eigenvalue: need n >= 2");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A.cast<double>(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("second_eigenvalue: eigensolver did not converge");
    const auto& ev = solver.eigenvalues();  // ascending
    return std::max(ev(ev.size() - 2), std::abs(ev(0)));
}

namespace detail {

// Gamma_k(x) for k = 0..r at one point, via the T_k three-term recurrence.
inline void gamma_row(double x, int d, int r, std::span<double> out) {
    double t_prev = 1.0;       // T_0(x/2)
    double t_cur = 0.5 * x;    // T_1(x/2)
    out[0] = 1.0;
    for (int k = 1; k <= r; ++k) {
        double tk = (k == 1) ? t_cur : 0.0;
        if (k > 1) {
            tk = x * t_cur - t_prev;
            t_prev = t_cur;
            t_cur = tk;
        }
        double g = 2.0 * tk;
        if (k % 2 == 0) g += (2.0 * d - 2.0) / std::pow(2.0 * d - 1.0, k / 2);
        out[static_cast<std::size_t>(k)] = g;
    }
}

}  // namespace detail

struct TraceIdentityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CNBW_k = (2d-1)^(k/2) sum_i Gamma_k(lambda_i), rounded to integer. Errors
// out when the rounding distance exceeds tolerance, which signals an
// eigensolver or counting bug.
inline CountVector cnbw_from_spectrum(const Spectrum& spec, int r,
                                      std::vector<double>* rounding_distance = nullptr) {
    if (r < 1) throw std::invalid_argument("cnbw_from_spectrum: r must be >= 1");
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(r + 1);
    std::vector<double> row(static_cast<std::size_t>(r) + 1);
    for (int i = 0; i < spec.n; ++i) {
        detail::gamma_row(spec.values(i), spec.d, r, row);
        for (int k = 0; k <= r; ++k) sums(k) += row[static_cast<std::size_t>(k)];
    }
    CountVector out{CountKind::Cnbw, spec.n, spec.d, {}};
    out.values.resize(static_cast<std::size_t>(r));
    if (rounding_distance) rounding_distance->assign(static_cast<std::size_t>(r), 0.0);
    for (int k = 1; k <= r; ++k) {
        double raw = std::pow(2.0 * spec.d - 1.0, 0.5 * k) * sums(k);
        double rounded = std::round(raw);
        double dist = std::abs(rounded - raw);
        if (rounding_distance) (*rounding_distance)[static_cast<std::size_t>(k - 1)] = dist;
        if (dist > std::max(1e-3, 1e-6 * std::abs(rounded)))
            throw TraceIdentityError("cnbw_from_spectrum: trace identity violated at k=" + std::to_string(k));
        out.values[static_cast<std::size_t>(k - 1)] = static_cast<std::int64_t>(rounded);
    }
    return out;
}

// e(A,B) = #{(i,a) : a in A, pi_i(a) in B}.
inline std::int64_t edge_count(const PermutationGraph& g, std::span<const std::int32_t> A,
                               std::span<const std::int32_t> B) {
    std::vector<bool> in_b(static_cast<std::size_t>(g.n), false);
    for (std::int32_t b : B) in_b[static_cast<std::size_t>(b)] = true;
    std::int64_t count = 0;
    for (const Permutation& p : g.perms)
        for (std::int32_t a : A)
            if (in_b[static_cast<std::size_t>(p[static_cast<std::size_t>(a)])]) ++count;
    return count;
}

struct DiscrepancyRecord {
    std::size_t size_a = 0;
    std::size_t size_b = 0;
    std::int64_t edges = 0;
    double mu = 0.0;
    int property = 0;  // 1 or 2; 0 flags a violation of both
};

struct DiscrepancyReport {
    std::vector<DiscrepancyRecord> records;
    std::size_t violations = 0;
};

// Kahn-Szemeredi discrepancy audit with c1 = e^4, c2 = 2 e^2 (6+m).
inline DiscrepancyReport discrepancy_check(
    const PermutationGraph& g,
    const std::vector<std::pair<std::vector<std::int32_t>, std::vector<std::int32_t>>>& pairs, double m) {
    const double c1 = std::exp(4.0);
    const double c2 = 2.0 * std::exp(2.0) * (6.0 + m);
    DiscrepancyReport report;
    for (const auto& [A, B] : pairs) {
        if (A.empty() || B.empty()) throw std::invalid_argument("discrepancy_check: empty vertex set");
        DiscrepancyRecord rec;
        rec.size_a = A.size();
        rec.size_b = B.size();
        rec.edges = edge_count(g, A, B);
        rec.mu = static_cast<double>(A.size()) * static_cast<double>(B.size()) * g.d / g.n;
        double ratio = static_cast<double>(rec.edges) / rec.mu;
        double larger = static_cast<double>(std::max(A.size(), B.size()));
        if (ratio <= c1) {
            rec.property = 1;
        } else if (static_cast<double>(rec.edges) * std::log(ratio) <=
                   c2 * larger * std::log(static_cast<double>(g.n) / larger)) {
            rec.property = 2;
        } else {
            rec.property = 0;
            ++report.violations;
        }
        report.records.push_back(rec);
    }
    return report;
}

}  // namespace rrg
