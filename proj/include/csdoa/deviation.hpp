// SPDX-License-Identifier: Apache-2.0
//
// csdoa - CS beamformer root-MUSIC library
//
// Finite-snapshot subspace deviation: the empirical leakage metric, its
// quadratic-form (first-order) expansion, the closed-form expectation, and
// Monte Carlo checks of the supporting covariance-fluctuation identities.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <stdexcept>

#include "csdoa/rootmusic.hpp"
#include "csdoa/spectral.hpp"

namespace csdoa {

struct DeviationInputs {
    CovarianceMatrix r_true;  // exact compressed covariance
    CovarianceMatrix r_hat;   // sample estimate
    double sigma2 = 1.0;      // noise variance
    int num_sources = 0;
    int num_snapshots = 0;

    void validate() const {
        if (r_true.dimension() != r_hat.dimension())
            throw std::invalid_argument("DeviationInputs: covariance dimension mismatch");
        if (num_snapshots < 1) throw std::invalid_argument("DeviationInputs: T must be positive");
        if (sigma2 <= 0.0) throw std::invalid_argument("DeviationInputs: sigma2 must be positive");
        if (num_sources < 1 || num_sources >= r_true.dimension())
            throw std::invalid_argument("DeviationInputs: invalid source count");
    }
};

struct DeviationReport {
    double xi_empirical = 0.0;  // projector-energy definition
    double xi_quadratic = 0.0;  // first-order trace form
    double xi_expected = 0.0;   // closed-form expectation
    double snr_db = 0.0;
    int num_snapshots = 0;
    int failures = 0;
};

// xi = (1/M) sum_j ||Gamma_N vhat_sj||^2, with Gamma_N from the TRUE
// covariance. Lies in [0, 1] because the columns are unit-norm.
inline double empirical_deviation(const ComplexMatrix &signal_basis_est,
                                  const ComplexMatrix &gamma_n_true, int num_sources) {
    if (signal_basis_est.rows() != gamma_n_true.rows())
        throw std::invalid_argument("empirical_deviation: dimension mismatch");
    if (signal_basis_est.cols() != num_sources)
        throw std::invalid_argument("empirical_deviation: basis column count mismatch");
    double acc = 0.0;
    for (int j = 0; j < num_sources; ++j)
        acc += (gamma_n_true * signal_basis_est.col(j)).squaredNorm();
    return acc / num_sources;
}

// Moore-Penrose pseudo-inverse of a Hermitian matrix with a relative
// singular-value cutoff. V is exactly rank-M for an exact covariance; the
// cutoff removes the noise-floor direction without touching the signal ones.
inline ComplexMatrix hermitian_pseudo_inverse(const ComplexMatrix &v, double rel_cutoff = 1e-10) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(v);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_pseudo_inverse: eigensolver failed");
    const Eigen::VectorXd vals = solver.eigenvalues();
    const double cutoff = rel_cutoff * vals.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(vals.size());
    for (int i = 0; i < vals.size(); ++i)
        if (std::abs(vals(i)) > cutoff) inv(i) = 1.0 / vals(i);
    return solver.eigenvectors() * inv.asDiagonal() * solver.eigenvectors().adjoint();
}

// xi = (1/M) Tr{V+ dR Gamma_N dR V+} with V = R_true - sigma2 I and
// dR = R_true - R_hat.
inline double quadratic_form_deviation(const DeviationInputs &inputs,
                                       const ComplexMatrix &gamma_n_true) {
    inputs.validate();
    const int k = inputs.r_true.dimension();
    const ComplexMatrix v =
        inputs.r_true.data - inputs.sigma2 * ComplexMatrix::Identity(k, k);
    if (v.norm() < 1e-12)
        throw DegeneracyError("quadratic_form_deviation: V is numerically zero (no sources)");
    const ComplexMatrix v_pinv = hermitian_pseudo_inverse(v);
    const ComplexMatrix delta = inputs.r_true.data - inputs.r_hat.data;
    const Complex trace = (v_pinv * delta * gamma_n_true * delta * v_pinv).trace();
    return trace.real() / inputs.num_sources;
}

// E[xi] = (sigma2 / (T M)) sum over the M largest eigenvalues lambda of
// lambda / (lambda - sigma2)^2. Eigenvalues ascending; with m = M+1 the
// signal eigenvalues are exactly the entries after the single noise one.
inline double expected_deviation(const Eigen::VectorXd &eigenvalues_ascending, double sigma2,
                                 int num_snapshots, int num_sources) {
    if (num_snapshots < 1) throw std::invalid_argument("expected_deviation: T must be positive");
    const int k = static_cast<int>(eigenvalues_ascending.size());
    if (num_sources < 1 || num_sources > k)
        throw std::invalid_argument("expected_deviation: invalid source count");
    if (sigma2 == 0.0) return 0.0;
    double sum = 0.0;
    for (int j = k - num_sources; j < k; ++j) {
        const double lambda = eigenvalues_ascending(j);
        if (lambda <= sigma2)
            throw std::invalid_argument(
                "expected_deviation: signal eigenvalue at or below the noise floor");
        const double gap = lambda - sigma2;
        sum += lambda / (gap * gap);
    }
    return sigma2 / (static_cast<double>(num_snapshots) * num_sources) * sum;
}

// Draw T snapshots with covariance R (via its Hermitian square root).
inline ComplexMatrix draw_snapshots_with_covariance(const ComplexMatrix &r_sqrt, int t,
                                                    Xoshiro256 &rng) {
    const int k = static_cast<int>(r_sqrt.rows());
    ComplexMatrix white(k, t);
    for (int col = 0; col < t; ++col)
        for (int row = 0; row < k; ++row)
            white(row, col) = rng.next_complex_gaussian();
    return r_sqrt * white;
}

inline ComplexMatrix hermitian_sqrt(const ComplexMatrix &r) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(r);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_sqrt: eigensolver failed");
    Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * vals.asDiagonal() * solver.eigenvectors().adjoint();
}

// Monte Carlo check of E[dR C1 dR] = (1/T) Tr{R C1} R. Returns the
// Frobenius relative error of the trial average against the closed form.
inline double fluctuation_product_check(const CovarianceMatrix &r, const ComplexMatrix &c1, int t,
                            int trials, std::uint64_t seed) {
    const int k = r.dimension();
    const ComplexMatrix r_sqrt = hermitian_sqrt(r.data);
    ComplexMatrix acc = ComplexMatrix::Zero(k, k);
    for (int trial = 0; trial < trials; ++trial) {
        Xoshiro256 rng(derive_seed(seed, trial));
        SnapshotMatrix x;
        x.data = draw_snapshots_with_covariance(r_sqrt, t, rng);
        const ComplexMatrix delta = r.data - sample_covariance(x).data;
        acc += delta * c1 * delta;
    }
    acc /= static_cast<double>(trials);
    const ComplexMatrix closed = (r.data * c1).trace() / static_cast<double>(t) * r.data;
    const double denom = closed.norm();
    if (denom == 0.0) return acc.norm();
    return (acc - closed).norm() / denom;
}

// Monte Carlo check of E[Tr{dR C1} Tr{dR C2}] = (1/T) Tr{R C1 R C2}.
inline double trace_product_check(const CovarianceMatrix &r, const ComplexMatrix &c1,
                            const ComplexMatrix &c2, int t, int trials, std::uint64_t seed) {
    const ComplexMatrix r_sqrt = hermitian_sqrt(r.data);
    Complex acc = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        Xoshiro256 rng(derive_seed(seed, trial));
        SnapshotMatrix x;
        x.data = draw_snapshots_with_covariance(r_sqrt, t, rng);
        const ComplexMatrix delta = r.data - sample_covariance(x).data;
        acc += (delta * c1).trace() * (delta * c2).trace();
    }
    acc /= static_cast<double>(trials);
    const Complex closed = (r.data * c1 * r.data * c2).trace() / static_cast<double>(t);
    const double denom = std::abs(closed);
    if (denom == 0.0) return std::abs(acc);
    return std::abs(acc - closed) / denom;
}

struct IdentityReport {
    double projector_trace_residual = 0.0; // Tr{Gamma_N R} vs (k-M) sigma2
    double vpinv_trace_residual = 0.0;     // Tr{V+ V+ R} vs eigenvalue sum
};

// Residuals of the two trace identities that feed the closed-form
// expectation, evaluated on an exact covariance.
inline IdentityReport identity_checks(const CovarianceMatrix &r_true, double sigma2,
                                      int num_sources) {
    const int k = r_true.dimension();
    const EigenDecomposition eig = eigendecompose_hermitian(r_true);
    const SubspaceSplit split = split_subspaces(eig, num_sources);
    const ComplexMatrix gamma_n = noise_projector(split);

    IdentityReport rep;
    const double projector_trace = (gamma_n * r_true.data).trace().real();
    const double expected_trace = (k - num_sources) * sigma2;
    rep.projector_trace_residual =
        std::abs(projector_trace - expected_trace) / std::max(std::abs(expected_trace), 1e-300);

    const ComplexMatrix v = r_true.data - sigma2 * ComplexMatrix::Identity(k, k);
    const ComplexMatrix v_pinv = hermitian_pseudo_inverse(v);
    const double lhs = (v_pinv * v_pinv * r_true.data).trace().real();
    double rhs = 0.0;
    for (int j = k - num_sources; j < k; ++j) {
        const double lambda = eig.eigenvalues(j);
        const double gap = lambda - sigma2;
        rhs += lambda / (gap * gap);
    }
    rep.vpinv_trace_residual = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
    return rep;
}

enum class NoiseFloorMode { Known, Estimated };

// One Monte Carlo trial: synthesize snapshots, form the sample and exact
// compressed covariances, and evaluate all three deviation quantities.
// Pass Phi = identity for the uncompressed (classic) reference curve.
inline DeviationReport deviation_trial(const SourceScenario &scenario,
                                       const ArrayGeometry &geometry,
                                       const MeasurementMatrix &phi, std::uint64_t seed,
                                       NoiseFloorMode floor_mode = NoiseFloorMode::Known) {
    const SnapshotMatrix x = synthesize_snapshots(scenario, geometry, seed);
    const SnapshotMatrix y = compress(phi, x);

    const ComplexMatrix a = steering_matrix(geometry, scenario.angles_deg);
    const CovarianceMatrix r_true =
        exact_compressed_covariance(phi, a, scenario.powers, scenario.noise_variance);
    const CovarianceMatrix r_hat = sample_covariance(y);

    const int num_sources = scenario.num_sources();
    const EigenDecomposition eig_true = eigendecompose_hermitian(r_true);
    const SubspaceSplit split_true = split_subspaces(eig_true, num_sources);
    const ComplexMatrix gamma_n = noise_projector(split_true);

    const EigenDecomposition eig_hat = eigendecompose_hermitian(r_hat);
    const SubspaceSplit split_hat = split_subspaces(eig_hat, num_sources);

    double sigma2 = scenario.noise_variance;
    if (floor_mode == NoiseFloorMode::Estimated) sigma2 = split_hat.noise_floor_estimate;

    DeviationInputs inputs;
    inputs.r_true = r_true;
    inputs.r_hat = r_hat;
    inputs.sigma2 = sigma2;
    inputs.num_sources = num_sources;
    inputs.num_snapshots = scenario.num_snapshots;

    DeviationReport rep;
    rep.xi_empirical = empirical_deviation(split_hat.signal_basis, gamma_n, num_sources);
    rep.xi_quadratic = quadratic_form_deviation(inputs, gamma_n);
    rep.xi_expected =
        expected_deviation(eig_true.eigenvalues, sigma2, scenario.num_snapshots, num_sources);
    rep.num_snapshots = scenario.num_snapshots;
    return rep;
}

} // namespace csdoa
