// SPDX-License-Identifier: Apache-2.0
//
// csdoa - CS beamformer root-MUSIC library
//
// Covariance estimation, Hermitian eigendecomposition with deterministic
// eigenvector normalization, noise/signal subspace splitting and the noise
// projector.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "csdoa/array_model.hpp"
#include "csdoa/compression.hpp"

namespace csdoa {

enum class CovarianceKind { Sample, Exact };

struct CovarianceMatrix {
    ComplexMatrix data;
    CovarianceKind kind = CovarianceKind::Sample;

    int dimension() const { return static_cast<int>(data.rows()); }
};

struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;  // ascending
    ComplexMatrix eigenvectors;   // unitary, column i pairs with eigenvalue i
};

// Ascending-sorted eigenpairs split into noise (Q, k-M smallest) and signal
// (P, M largest) blocks.
struct SubspaceSplit {
    Eigen::VectorXd eigenvalues;
    ComplexMatrix noise_basis;   // Q, k x (k-M)
    ComplexMatrix signal_basis;  // P, k x M
    double noise_floor_estimate = 0.0;

    int dimension() const { return static_cast<int>(noise_basis.rows()); }
    int num_sources() const { return static_cast<int>(signal_basis.cols()); }
};

// (1/T) X X^H, symmetrized against round-off.
inline CovarianceMatrix sample_covariance(const SnapshotMatrix &snapshots) {
    const double t = static_cast<double>(snapshots.snapshot_count());
    ComplexMatrix r = snapshots.data * snapshots.data.adjoint() / t;
    CovarianceMatrix cov;
    cov.data = 0.5 * (r + r.adjoint().eval());
    cov.kind = CovarianceKind::Sample;
    return cov;
}

// A diag(powers) A^H + sigma^2 I.
inline CovarianceMatrix exact_covariance(const ComplexMatrix &steering,
                                         const std::vector<double> &powers,
                                         double noise_variance) {
    if (static_cast<int>(powers.size()) != steering.cols())
        throw std::invalid_argument("exact_covariance: powers/steering size mismatch");
    if (noise_variance < 0.0)
        throw std::invalid_argument("exact_covariance: negative noise variance");
    Eigen::VectorXd p(powers.size());
    for (std::size_t i = 0; i < powers.size(); ++i) {
        if (powers[i] < 0.0) throw std::invalid_argument("exact_covariance: negative power");
        p(i) = powers[i];
    }
    CovarianceMatrix cov;
    cov.data = steering * p.asDiagonal() * steering.adjoint();
    cov.data += noise_variance *
                ComplexMatrix::Identity(steering.rows(), steering.rows());
    cov.data = (0.5 * (cov.data + cov.data.adjoint().eval())).eval();
    cov.kind = CovarianceKind::Exact;
    return cov;
}

// Compressed exact covariance Phi R Phi^H of a scenario.
inline CovarianceMatrix exact_compressed_covariance(const MeasurementMatrix &phi,
                                                    const ComplexMatrix &steering,
                                                    const std::vector<double> &powers,
                                                    double noise_variance) {
    const CovarianceMatrix rxx = exact_covariance(steering, powers, noise_variance);
    CovarianceMatrix cov;
    const ComplexMatrix p = phi.data.cast<Complex>();
    ComplexMatrix r = p * rxx.data * p.transpose();
    cov.data = 0.5 * (r + r.adjoint().eval());
    cov.kind = CovarianceKind::Exact;
    return cov;
}

// Eigenpairs sorted ascending. Each eigenvector's phase is fixed so its
// largest-magnitude component is real-positive; exact eigenvalue ties are
// ordered by descending real part of the first nonzero component after the
// phase fix, which keeps golden files stable.
inline EigenDecomposition eigendecompose_hermitian(const CovarianceMatrix &r) {
    const double scale = std::max(1.0, r.data.norm());
    if ((r.data - r.data.adjoint()).norm() > 1e-9 * scale)
        throw std::invalid_argument("eigendecompose_hermitian: matrix is not Hermitian");

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(r.data);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose_hermitian: eigensolver failed");

    EigenDecomposition d;
    d.eigenvalues = solver.eigenvalues();
    d.eigenvectors = solver.eigenvectors();

    const int k = d.eigenvectors.rows();
    for (int col = 0; col < d.eigenvectors.cols(); ++col) {
        int pivot = 0;
        double best = -1.0;
        for (int row = 0; row < k; ++row) {
            const double mag = std::abs(d.eigenvectors(row, col));
            if (mag > best + 1e-14) {
                best = mag;
                pivot = row;
            }
        }
        const Complex v = d.eigenvectors(pivot, col);
        if (std::abs(v) > 0.0)
            d.eigenvectors.col(col) *= std::conj(v) / std::abs(v);
    }

    for (int i = 0; i + 1 < d.eigenvalues.size(); ++i) {
        if (d.eigenvalues(i) == d.eigenvalues(i + 1)) {
            auto first_nonzero_real = [&](int col) {
                for (int row = 0; row < k; ++row)
                    if (std::abs(d.eigenvectors(row, col)) > 1e-12)
                        return d.eigenvectors(row, col).real();
                return 0.0;
            };
            if (first_nonzero_real(i) < first_nonzero_real(i + 1)) {
                d.eigenvectors.col(i).swap(d.eigenvectors.col(i + 1));
            }
        }
    }
    return d;
}

inline SubspaceSplit split_subspaces(const EigenDecomposition &decomposition, int num_sources) {
    const int k = static_cast<int>(decomposition.eigenvalues.size());
    if (num_sources >= k)
        throw std::invalid_argument("split_subspaces: source count must be below dimension");
    if (num_sources < 1)
        throw std::invalid_argument("split_subspaces: need at least one source");
    SubspaceSplit s;
    s.eigenvalues = decomposition.eigenvalues;
    s.noise_basis = decomposition.eigenvectors.leftCols(k - num_sources);
    s.signal_basis = decomposition.eigenvectors.rightCols(num_sources);
    s.noise_floor_estimate = decomposition.eigenvalues.head(k - num_sources).mean();
    return s;
}

// Gamma_N = Q Q^H: Hermitian idempotent projector of rank k-M.
inline ComplexMatrix noise_projector(const SubspaceSplit &split) {
    return split.noise_basis * split.noise_basis.adjoint();
}

} // namespace csdoa
