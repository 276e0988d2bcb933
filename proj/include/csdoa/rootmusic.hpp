// SPDX-License-Identifier: Apache-2.0
//
// csdoa - CS beamformer root-MUSIC library
//
// Rooting-polynomial construction for the classic (Phi = I) and compressed
// pipelines, companion-matrix root finding and root-to-angle selection.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csdoa/compression.hpp"
#include "csdoa/spectral.hpp"

namespace csdoa {

// Numerical degeneracy distinct from precondition violations; the CLI maps
// this to its own exit code.
class DegeneracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PipelineVariant { Classic, Cs };

inline std::string to_string(PipelineVariant v) {
    return v == PipelineVariant::Classic ? "classic" : "cs";
}

// Laurent polynomial sum_{k=-(N-1)}^{N-1} c_k z^k. Coefficients satisfy
// c_{-k} = conj(c_k), so roots come in conjugate-reciprocal pairs.
struct RootingPolynomial {
    std::vector<Complex> coefficients; // index i holds c_{i-(N-1)}
    PipelineVariant origin = PipelineVariant::Classic;

    int order() const { return (static_cast<int>(coefficients.size()) - 1) / 2; } // N-1

    Complex coefficient(int k) const { return coefficients[k + order()]; }

    Complex evaluate(Complex z) const {
        // Horner on z^{N-1} p(z), then divide the weight back out.
        Complex acc = 0.0;
        for (int i = static_cast<int>(coefficients.size()) - 1; i >= 0; --i)
            acc = acc * z + coefficients[i];
        return acc / std::pow(z, order());
    }
};

struct DoaEstimate {
    std::vector<double> angles_deg;       // ascending, size M
    std::vector<Complex> selected_roots;  // aligned with angles_deg
    std::vector<Complex> all_roots;       // 2(N-1) roots of the trimmed polynomial
};

// Coefficients of b^T(1/z) Gamma_N b(z) with b(z) = Phi a(z) and a(z) the
// length-N conjugate-steering monomial vector. With G = Phi^T Gamma_N Phi,
// c_k is the sum of the k-th diagonal of G. Pass no Phi for the classic
// polynomial (G = Gamma_N).
inline RootingPolynomial build_polynomial(const ComplexMatrix &gamma_n,
                                          const std::optional<MeasurementMatrix> &phi,
                                          int num_sensors) {
    ComplexMatrix g;
    if (phi) {
        if (phi->rows() != gamma_n.rows())
            throw std::invalid_argument("build_polynomial: projector dimension must equal Phi row count");
        if (phi->cols() != num_sensors)
            throw std::invalid_argument("build_polynomial: Phi column count must equal sensor count");
        const ComplexMatrix p = phi->data.cast<Complex>();
        g = p.transpose() * gamma_n * p;
    } else {
        if (gamma_n.rows() != num_sensors)
            throw std::invalid_argument("build_polynomial: projector dimension must equal sensor count");
        g = gamma_n;
    }

    RootingPolynomial poly;
    poly.origin = phi ? PipelineVariant::Cs : PipelineVariant::Classic;
    poly.coefficients.assign(2 * num_sensors - 1, Complex(0.0, 0.0));
    for (int i = 0; i < num_sensors; ++i)
        for (int j = 0; j < num_sensors; ++j)
            poly.coefficients[(i - j) + (num_sensors - 1)] += g(i, j);

    double max_mag = 0.0;
    for (const Complex &c : poly.coefficients) max_mag = std::max(max_mag, std::abs(c));
    if (max_mag < 1e-14)
        throw DegeneracyError("build_polynomial: zero polynomial (no noise subspace)");
    return poly;
}

// Roots of z^{N-1} p(z) via companion-matrix eigenvalues of the monic
// trimmed polynomial. Each returned root is residual-checked.
inline std::vector<Complex> find_roots(const RootingPolynomial &poly) {
    double max_mag = 0.0;
    for (const Complex &c : poly.coefficients) max_mag = std::max(max_mag, std::abs(c));
    if (max_mag < 1e-14)
        throw DegeneracyError("find_roots: all-zero polynomial");

    // Trim negligible leading/trailing coefficients.
    const double trim_tol = 1e-12 * max_mag;
    int lo = 0, hi = static_cast<int>(poly.coefficients.size()) - 1;
    while (hi > lo && std::abs(poly.coefficients[hi]) < trim_tol) --hi;
    while (lo < hi && std::abs(poly.coefficients[lo]) < trim_tol) ++lo;
    const int degree = hi - lo;
    if (degree < 1)
        throw DegeneracyError("find_roots: polynomial degenerates to a constant");

    const Complex leading = poly.coefficients[hi];
    ComplexMatrix companion = ComplexMatrix::Zero(degree, degree);
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i)
        companion(i, degree - 1) = -poly.coefficients[lo + i] / leading;

    Eigen::ComplexEigenSolver<ComplexMatrix> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("find_roots: companion eigensolver failed");

    std::vector<Complex> roots(solver.eigenvalues().data(),
                               solver.eigenvalues().data() + degree);

    for (const Complex &z : roots) {
        // Residual of the trimmed polynomial, normalized by the evaluation scale.
        Complex acc = 0.0;
        double scale = 0.0;
        Complex zk = 1.0;
        for (int i = lo; i <= hi; ++i) {
            acc += poly.coefficients[i] * zk;
            scale = std::max(scale, std::abs(poly.coefficients[i] * zk));
            zk *= z;
        }
        if (std::abs(acc) > 1e-6 * std::max(scale, max_mag))
            throw std::runtime_error("find_roots: root residual check failed");
    }
    return roots;
}

// Among roots inside (or on) the unit circle, drop conjugate-reciprocal
// duplicates, keep the M closest to the circle by |1 - |z|| (ties to the
// larger modulus) and map arguments to angles via arcsin.
inline DoaEstimate select_doa_roots(const std::vector<Complex> &roots, int num_sources,
                                    double spacing_ratio) {
    std::vector<Complex> interior;
    for (const Complex &z : roots)
        if (std::abs(z) <= 1.0 + 1e-9) interior.push_back(z);

    // A conjugate-reciprocal partner shares the argument and has reciprocal
    // modulus; when both land inside the tolerance band keep the inner one.
    std::vector<Complex> dedup;
    for (const Complex &z : interior) {
        bool duplicate = false;
        for (Complex &kept : dedup) {
            if (std::abs(z * std::conj(kept) - 1.0) < 1e-6) {
                if (std::abs(z) < std::abs(kept)) kept = z;
                duplicate = true;
                break;
            }
        }
        if (!duplicate) dedup.push_back(z);
    }

    if (static_cast<int>(dedup.size()) < num_sources)
        throw DegeneracyError("select_doa_roots: fewer interior roots than sources");

    std::sort(dedup.begin(), dedup.end(), [](const Complex &a, const Complex &b) {
        const double da = std::abs(1.0 - std::abs(a));
        const double db = std::abs(1.0 - std::abs(b));
        if (da != db) return da < db;
        return std::abs(a) > std::abs(b);
    });

    DoaEstimate est;
    est.all_roots = roots;
    std::vector<std::pair<double, Complex>> picked;
    for (int i = 0; i < num_sources; ++i) {
        const Complex z = dedup[i];
        const double ratio = std::arg(z) / (2.0 * M_PI * spacing_ratio);
        if (std::abs(ratio) > 1.0)
            throw DegeneracyError("select_doa_roots: root argument outside the arcsin domain");
        picked.emplace_back(std::asin(ratio) * 180.0 / M_PI, z);
    }
    std::sort(picked.begin(), picked.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    for (const auto &[angle, z] : picked) {
        est.angles_deg.push_back(angle);
        est.selected_roots.push_back(z);
    }
    return est;
}

// Full pipeline on one snapshot block: covariance, (compression,)
// eigendecomposition, subspace split, rooting, root selection.
inline DoaEstimate estimate_doa(const SnapshotMatrix &snapshots, int num_sources,
                                PipelineVariant variant,
                                const std::optional<MeasurementMatrix> &phi,
                                const ArrayGeometry &geometry) {
    if (variant == PipelineVariant::Classic && !geometry.is_uniform())
        throw std::invalid_argument(
            "estimate_doa: classic variant requires a uniform linear array");
    if (variant == PipelineVariant::Cs && !phi)
        throw std::invalid_argument("estimate_doa: cs variant requires a measurement matrix");

    SnapshotMatrix working = snapshots;
    if (variant == PipelineVariant::Cs) working = compress(*phi, snapshots);

    const CovarianceMatrix cov = sample_covariance(working);
    const EigenDecomposition eig = eigendecompose_hermitian(cov);
    const SubspaceSplit split = split_subspaces(eig, num_sources);
    const ComplexMatrix gamma_n = noise_projector(split);

    const RootingPolynomial poly =
        variant == PipelineVariant::Cs
            ? build_polynomial(gamma_n, phi, geometry.num_sensors)
            : build_polynomial(gamma_n, std::nullopt, geometry.num_sensors);
    const std::vector<Complex> roots = find_roots(poly);
    return select_doa_roots(roots, num_sources, geometry.spacing_ratio);
}

// Same pipeline starting from a known covariance (exact-model runs and
// replays of saved covariances).
inline DoaEstimate estimate_doa_from_covariance(const CovarianceMatrix &cov, int num_sources,
                                                const std::optional<MeasurementMatrix> &phi,
                                                const ArrayGeometry &geometry) {
    const EigenDecomposition eig = eigendecompose_hermitian(cov);
    const SubspaceSplit split = split_subspaces(eig, num_sources);
    const ComplexMatrix gamma_n = noise_projector(split);
    const RootingPolynomial poly = build_polynomial(gamma_n, phi, geometry.num_sensors);
    const std::vector<Complex> roots = find_roots(poly);
    return select_doa_roots(roots, num_sources, geometry.spacing_ratio);
}

// Minimum-total-squared-error assignment between estimated and true angles
// over all permutations (M <= 5 in practice). Returns per-source squared
// errors in true-angle order.
inline std::vector<double> matched_squared_errors(const std::vector<double> &estimated,
                                                  const std::vector<double> &truth) {
    if (estimated.size() != truth.size())
        throw std::invalid_argument("matched_squared_errors: size mismatch");
    std::vector<int> perm(truth.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);

    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            const double d = estimated[perm[i]] - truth[i];
            cost += d * d;
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<double> errors(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = estimated[best[i]] - truth[i];
        errors[i] = d * d;
    }
    return errors;
}

} // namespace csdoa
