// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "csdoa/compression.hpp"
#include "csdoa/spectral.hpp"

using namespace csdoa;

TEST_CASE("sample covariance") {
    SECTION("single snapshot is the outer product") {
        SnapshotMatrix x;
        x.data = ComplexMatrix::Random(4, 1);
        const ComplexMatrix expected = x.data.col(0) * x.data.col(0).adjoint();
        REQUIRE((sample_covariance(x).data - expected).norm() < 1e-14 * expected.norm());
    }
    SECTION("zero data gives the zero matrix") {
        SnapshotMatrix x;
        x.data = ComplexMatrix::Zero(3, 5);
        REQUIRE(sample_covariance(x).data.norm() == 0.0);
    }
    SECTION("white noise converges to identity") {
        Xoshiro256 rng(77);
        SnapshotMatrix x;
        x.data.resize(3, 1000000);
        for (int t = 0; t < x.data.cols(); ++t)
            for (int n = 0; n < 3; ++n) x.data(n, t) = rng.next_complex_gaussian();
        const ComplexMatrix id = ComplexMatrix::Identity(3, 3);
        REQUIRE((sample_covariance(x).data - id).norm() / id.norm() < 0.02);
    }
}

TEST_CASE("exact covariance") {
    const ArrayGeometry g = ArrayGeometry::ula(6, 0.5);

    SECTION("no sources reduces to sigma2 I") {
        const ComplexMatrix a(6, 0);
        const CovarianceMatrix r = exact_covariance(a, {}, 1.0);
        REQUIRE((r.data - ComplexMatrix::Identity(6, 6)).norm() < 1e-14);
    }
    SECTION("rank-1 update eigenvalues: N p + sigma2 and sigma2") {
        const double p = 3.0, sigma2 = 0.5;
        const ComplexMatrix a = steering_matrix(g, {12.0});
        const CovarianceMatrix r = exact_covariance(a, {p}, sigma2);
        const EigenDecomposition eig = eigendecompose_hermitian(r);
        REQUIRE(std::abs(eig.eigenvalues(5) - (6.0 * p + sigma2)) < 1e-10);
        for (int i = 0; i < 5; ++i) REQUIRE(std::abs(eig.eigenvalues(i) - sigma2) < 1e-10);
    }
    SECTION("compressed exact covariance noise eigenvalues are sigma2") {
        const MeasurementMatrix phi = draw_measurement_matrix(4, 6, PhiMode::RowOrthonormal, 1);
        const ComplexMatrix a = steering_matrix(g, {20.0, -50.0});
        const CovarianceMatrix r = exact_compressed_covariance(phi, a, {1.0, 1.0}, 0.7);
        const EigenDecomposition eig = eigendecompose_hermitian(r);
        REQUIRE(std::abs(eig.eigenvalues(0) - 0.7) < 1e-9);
        REQUIRE(std::abs(eig.eigenvalues(1) - 0.7) < 1e-9);
        REQUIRE(eig.eigenvalues(2) > 0.7);
        REQUIRE(eig.eigenvalues(3) > 0.7);
    }
    SECTION("rejects negative power and variance") {
        const ComplexMatrix a = steering_matrix(g, {0.0});
        REQUIRE_THROWS_AS(exact_covariance(a, {-1.0}, 1.0), std::invalid_argument);
        REQUIRE_THROWS_AS(exact_covariance(a, {1.0}, -1.0), std::invalid_argument);
    }
}

TEST_CASE("hermitian eigendecomposition") {
    SECTION("identity") {
        CovarianceMatrix r;
        r.data = ComplexMatrix::Identity(4, 4);
        const EigenDecomposition eig = eigendecompose_hermitian(r);
        for (int i = 0; i < 4; ++i) REQUIRE(std::abs(eig.eigenvalues(i) - 1.0) < 1e-14);
    }
    SECTION("diagonal matrix sorts ascending with permuted basis vectors") {
        CovarianceMatrix r;
        r.data = ComplexMatrix::Zero(3, 3);
        r.data(0, 0) = 3.0;
        r.data(1, 1) = 1.0;
        r.data(2, 2) = 2.0;
        const EigenDecomposition eig = eigendecompose_hermitian(r);
        REQUIRE(std::abs(eig.eigenvalues(0) - 1.0) < 1e-12);
        REQUIRE(std::abs(eig.eigenvalues(1) - 2.0) < 1e-12);
        REQUIRE(std::abs(eig.eigenvalues(2) - 3.0) < 1e-12);
        REQUIRE(std::abs(eig.eigenvectors(1, 0)) > 1.0 - 1e-12);
        REQUIRE(std::abs(eig.eigenvectors(2, 1)) > 1.0 - 1e-12);
        REQUIRE(std::abs(eig.eigenvectors(0, 2)) > 1.0 - 1e-12);
    }
    SECTION("residuals and orthonormality on a random Hermitian matrix") {
        ComplexMatrix g = ComplexMatrix::Random(5, 5);
        CovarianceMatrix r;
        r.data = g * g.adjoint();
        const EigenDecomposition eig = eigendecompose_hermitian(r);
        for (int i = 0; i < 5; ++i) {
            const ComplexVector v = eig.eigenvectors.col(i);
            REQUIRE((r.data * v - eig.eigenvalues(i) * v).norm() < 1e-9 * r.data.norm());
        }
        const ComplexMatrix gram = eig.eigenvectors.adjoint() * eig.eigenvectors;
        REQUIRE((gram - ComplexMatrix::Identity(5, 5)).norm() < 1e-10);
    }
    SECTION("reconstruction") {
        ComplexMatrix g = ComplexMatrix::Random(6, 6);
        CovarianceMatrix r;
        r.data = g * g.adjoint();
        const EigenDecomposition eig = eigendecompose_hermitian(r);
        const ComplexMatrix rebuilt = eig.eigenvectors *
                                      eig.eigenvalues.cast<Complex>().asDiagonal() *
                                      eig.eigenvectors.adjoint();
        REQUIRE((rebuilt - r.data).norm() < 1e-9 * r.data.norm());
    }
    SECTION("rejects non-Hermitian input") {
        CovarianceMatrix r;
        r.data = ComplexMatrix::Random(3, 3);
        r.data(0, 1) = r.data(1, 0) + Complex(1.0, 1.0);
        REQUIRE_THROWS_AS(eigendecompose_hermitian(r), std::invalid_argument);
    }
    SECTION("eigenvector phase fix is deterministic") {
        ComplexMatrix g = ComplexMatrix::Random(4, 4);
        CovarianceMatrix r;
        r.data = g * g.adjoint();
        const EigenDecomposition a = eigendecompose_hermitian(r);
        const EigenDecomposition b = eigendecompose_hermitian(r);
        REQUIRE(a.eigenvectors == b.eigenvectors);
        // largest-magnitude component of each column is real positive
        for (int col = 0; col < 4; ++col) {
            int pivot = 0;
            for (int row = 1; row < 4; ++row)
                if (std::abs(a.eigenvectors(row, col)) >
                    std::abs(a.eigenvectors(pivot, col)) + 1e-14)
                    pivot = row;
            REQUIRE(a.eigenvectors(pivot, col).real() > 0.0);
            REQUIRE(std::abs(a.eigenvectors(pivot, col).imag()) < 1e-12);
        }
    }
}

TEST_CASE("subspace split") {
    const ArrayGeometry g = ArrayGeometry::ula(7, 0.5);
    const MeasurementMatrix phi = draw_measurement_matrix(3, 7, PhiMode::RowOrthonormal, 2);
    const ComplexMatrix a = steering_matrix(g, {20.0, -50.0});
    const CovarianceMatrix r = exact_compressed_covariance(phi, a, {1.0, 1.0}, 1.0);
    const EigenDecomposition eig = eigendecompose_hermitian(r);

    SECTION("m = M+1 gives one noise column and M signal columns") {
        const SubspaceSplit split = split_subspaces(eig, 2);
        REQUIRE(split.noise_basis.cols() == 1);
        REQUIRE(split.signal_basis.cols() == 2);
        REQUIRE(split.noise_basis.rows() == 3);
    }
    SECTION("noise subspace is orthogonal to the compressed steering vectors") {
        const SubspaceSplit split = split_subspaces(eig, 2);
        const ComplexMatrix b = phi.data.cast<Complex>() * a;
        REQUIRE((split.noise_basis.adjoint() * b).norm() < 1e-8);
    }
    SECTION("[Q | P] is unitary") {
        const SubspaceSplit split = split_subspaces(eig, 2);
        ComplexMatrix qp(3, 3);
        qp << split.noise_basis, split.signal_basis;
        REQUIRE((qp.adjoint() * qp - ComplexMatrix::Identity(3, 3)).norm() < 1e-10);
    }
    SECTION("noise-only covariance estimates the floor") {
        CovarianceMatrix noise;
        noise.data = 2.0 * ComplexMatrix::Identity(4, 4);
        const SubspaceSplit split = split_subspaces(eigendecompose_hermitian(noise), 1);
        REQUIRE(std::abs(split.noise_floor_estimate - 2.0) < 1e-12);
    }
    SECTION("M >= k rejected") {
        REQUIRE_THROWS_AS(split_subspaces(eig, 3), std::invalid_argument);
    }
}

TEST_CASE("noise projector") {
    const ArrayGeometry g = ArrayGeometry::ula(8, 0.5);
    const MeasurementMatrix phi = draw_measurement_matrix(4, 8, PhiMode::RowOrthonormal, 3);
    const ComplexMatrix a = steering_matrix(g, {10.0, -30.0});
    const double sigma2 = 0.8;
    const CovarianceMatrix r = exact_compressed_covariance(phi, a, {1.0, 1.0}, sigma2);
    const SubspaceSplit split = split_subspaces(eigendecompose_hermitian(r), 2);
    const ComplexMatrix gamma = noise_projector(split);

    SECTION("idempotent") { REQUIRE((gamma * gamma - gamma).norm() < 1e-10); }
    SECTION("Hermitian") { REQUIRE((gamma - gamma.adjoint()).norm() < 1e-12); }
    SECTION("trace equals k - M") { REQUIRE(std::abs(gamma.trace().real() - 2.0) < 1e-10); }
    SECTION("Tr{Gamma_N R} = (m - M) sigma2") {
        REQUIRE(std::abs((gamma * r.data).trace().real() - 2.0 * sigma2) < 1e-9);
    }
}
