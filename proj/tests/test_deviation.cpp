// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "csdoa/cli.hpp"
#include "csdoa/deviation.hpp"

using namespace csdoa;

namespace {

struct ExactSetup {
    ArrayGeometry geometry = ArrayGeometry::ula(10, 0.5);
    MeasurementMatrix phi;
    CovarianceMatrix r_true;
    SubspaceSplit split;
    ComplexMatrix gamma;
    SourceScenario scenario;

    ExactSetup(double snr_db, int t, int m = 3, std::uint64_t seed = 5) {
        scenario = SourceScenario::make({20.0, -50.0}, snr_db, t);
        phi = draw_measurement_matrix(m, 10, PhiMode::RowOrthonormal, seed);
        r_true = exact_compressed_covariance(phi, steering_matrix(geometry, scenario.angles_deg),
                                             scenario.powers, scenario.noise_variance);
        split = split_subspaces(eigendecompose_hermitian(r_true), 2);
        gamma = noise_projector(split);
    }
};

} // namespace

TEST_CASE("empirical deviation") {
    const ExactSetup s(10.0, 10);

    SECTION("true signal basis has zero leakage") {
        REQUIRE(empirical_deviation(s.split.signal_basis, s.gamma, 2) < 1e-12);
    }
    SECTION("basis inside the noise subspace has full leakage") {
        // noise subspace of a 3x3 split with M=2 is one-dimensional; use an
        // M=1 split so the two signal columns can live in the noise span
        const ExactSetup wide(10.0, 10, 4);
        const ComplexMatrix q = wide.split.noise_basis; // 4 x 2
        REQUIRE(std::abs(empirical_deviation(q, wide.gamma, 2) - 1.0) < 1e-12);
    }
    SECTION("matches direct projector algebra on one seeded trial") {
        const SnapshotMatrix x = synthesize_snapshots(s.scenario, s.geometry, 17);
        const SnapshotMatrix y = compress(s.phi, x);
        const SubspaceSplit est = split_subspaces(eigendecompose_hermitian(sample_covariance(y)), 2);
        const double xi = empirical_deviation(est.signal_basis, s.gamma, 2);
        REQUIRE(xi > 0.0);
        REQUIRE(xi <= 1.0);
        // independent recomputation: ||Q Q^H v||^2 summed by hand
        double direct = 0.0;
        const ComplexMatrix q = s.split.noise_basis;
        for (int j = 0; j < 2; ++j)
            direct += (q * (q.adjoint() * est.signal_basis.col(j))).squaredNorm();
        direct /= 2.0;
        REQUIRE(std::abs(xi - direct) < 1e-14);
    }
    SECTION("dimension mismatch rejected") {
        REQUIRE_THROWS_AS(empirical_deviation(ComplexMatrix::Random(4, 2), s.gamma, 2),
                          std::invalid_argument);
    }
}

TEST_CASE("quadratic-form deviation") {
    SECTION("zero perturbation gives zero") {
        const ExactSetup s(10.0, 10);
        DeviationInputs in;
        in.r_true = s.r_true;
        in.r_hat = s.r_true;
        in.sigma2 = s.scenario.noise_variance;
        in.num_sources = 2;
        in.num_snapshots = 10;
        REQUIRE(std::abs(quadratic_form_deviation(in, s.gamma)) < 1e-12);
    }
    SECTION("hand-built diagonal case matches explicit matrix products") {
        // R = diag(sigma2 + p, sigma2), one source, known perturbation
        const double sigma2 = 1.0, p = 3.0;
        CovarianceMatrix r_true;
        r_true.data = ComplexMatrix::Zero(2, 2);
        r_true.data(0, 0) = sigma2 + p;
        r_true.data(1, 1) = sigma2;
        CovarianceMatrix r_hat = r_true;
        r_hat.data(0, 1) = Complex(0.1, 0.05);
        r_hat.data(1, 0) = std::conj(r_hat.data(0, 1));

        DeviationInputs in;
        in.r_true = r_true;
        in.r_hat = r_hat;
        in.sigma2 = sigma2;
        in.num_sources = 1;
        in.num_snapshots = 10;

        // noise eigenvector is e2, signal e1
        ComplexMatrix gamma = ComplexMatrix::Zero(2, 2);
        gamma(1, 1) = 1.0;

        // V = diag(p, 0), V+ = diag(1/p, 0); dR = -offdiag
        // V+ dR gamma dR V+ = (|dR01|^2 / p^2) e1 e1^H
        const double expected = std::norm(Complex(0.1, 0.05)) / (p * p);
        REQUIRE(std::abs(quadratic_form_deviation(in, gamma) - expected) < 1e-12);
    }
    SECTION("agrees with the empirical metric to first order") {
        const ExactSetup s(20.0, 10000);
        double mean_emp = 0.0, mean_quad = 0.0;
        const int trials = 200;
        for (int trial = 0; trial < trials; ++trial) {
            const DeviationReport rep =
                deviation_trial(s.scenario, s.geometry, s.phi, derive_seed(7, trial));
            mean_emp += rep.xi_empirical;
            mean_quad += rep.xi_quadratic;
        }
        mean_emp /= trials;
        mean_quad /= trials;
        REQUIRE(std::abs(mean_quad - mean_emp) < 0.2 * mean_emp);
    }
    SECTION("degenerate when no sources are present") {
        CovarianceMatrix r;
        r.data = ComplexMatrix::Identity(3, 3);
        DeviationInputs in;
        in.r_true = r;
        in.r_hat = r;
        in.sigma2 = 1.0;
        in.num_sources = 1;
        in.num_snapshots = 5;
        REQUIRE_THROWS_AS(quadratic_form_deviation(in, ComplexMatrix::Identity(3, 3)),
                          DegeneracyError);
    }
}

TEST_CASE("closed-form expectation") {
    SECTION("single source frozen value") {
        Eigen::VectorXd eigs(2);
        eigs << 1.0, 2.0; // noise then signal
        // (sigma2 / (T M)) * lambda / (lambda - sigma2)^2 = (1/10) * 2 / 1 = 0.2
        REQUIRE(std::abs(expected_deviation(eigs, 1.0, 10, 1) - 0.2) < 1e-15);
    }
    SECTION("vanishing noise floor gives zero") {
        Eigen::VectorXd eigs(2);
        eigs << 0.0, 2.0;
        REQUIRE(expected_deviation(eigs, 0.0, 10, 1) == 0.0);
    }
    SECTION("doubling T halves the value exactly") {
        Eigen::VectorXd eigs(3);
        eigs << 0.5, 2.0, 5.0;
        const double a = expected_deviation(eigs, 0.5, 100, 2);
        const double b = expected_deviation(eigs, 0.5, 200, 2);
        REQUIRE(b == a / 2.0);
    }
    SECTION("signal eigenvalue at the noise floor is rejected") {
        Eigen::VectorXd eigs(2);
        eigs << 1.0, 1.0;
        REQUIRE_THROWS_AS(expected_deviation(eigs, 1.0, 10, 1), std::invalid_argument);
    }
    SECTION("matches the Monte Carlo mean of the quadratic form") {
        const ExactSetup s(15.0, 100);
        const double expected = expected_deviation(
            s.split.eigenvalues, s.scenario.noise_variance, 100, 2);
        double mean_quad = 0.0;
        const int trials = 4000;
        for (int trial = 0; trial < trials; ++trial) {
            const DeviationReport rep =
                deviation_trial(s.scenario, s.geometry, s.phi, derive_seed(13, trial));
            mean_quad += rep.xi_quadratic;
        }
        mean_quad /= trials;
        REQUIRE(std::abs(mean_quad - expected) < 0.1 * expected);
    }
}

TEST_CASE("covariance fluctuation identities (Monte Carlo)") {
    SECTION("identity covariance closed form") {
        CovarianceMatrix r;
        r.data = ComplexMatrix::Identity(2, 2);
        const ComplexMatrix c1 = ComplexMatrix::Identity(2, 2);
        // closed form for the product check is (2/5) I
        REQUIRE(fluctuation_product_check(r, c1, 5, 20000, 1) < 0.05);
        REQUIRE(trace_product_check(r, c1, c1, 5, 20000, 2) < 0.05);
    }
    SECTION("zero C gives zero on both sides") {
        CovarianceMatrix r;
        r.data = ComplexMatrix::Identity(2, 2);
        const ComplexMatrix zero = ComplexMatrix::Zero(2, 2);
        REQUIRE(fluctuation_product_check(r, zero, 5, 100, 3) == 0.0);
        REQUIRE(trace_product_check(r, zero, zero, 5, 100, 4) == 0.0);
    }
    SECTION("random 3x3 instance") {
        const CovarianceMatrix r = random_psd(3, 41);
        const ComplexMatrix c1 = random_complex_matrix(3, 42);
        const ComplexMatrix c2 = random_complex_matrix(3, 43);
        REQUIRE(fluctuation_product_check(r, c1, 5, 20000, 5) < 0.05);
        REQUIRE(trace_product_check(r, c1, c2, 5, 20000, 6) < 0.05);
    }
}

TEST_CASE("trace identities on exact covariances") {
    SECTION("m = M+1 form") {
        const ExactSetup s(10.0, 10, 3);
        const IdentityReport rep = identity_checks(s.r_true, 1.0, 2);
        REQUIRE(rep.projector_trace_residual < 1e-9);
        REQUIRE(rep.vpinv_trace_residual < 1e-9);
    }
    SECTION("m = M+2 generalizes to (m - M) sigma2") {
        const ExactSetup s(10.0, 10, 4);
        const ComplexMatrix gamma = s.gamma;
        const double trace = (gamma * s.r_true.data).trace().real();
        REQUIRE(std::abs(trace - 2.0 * 1.0) < 1e-9);
        const IdentityReport rep = identity_checks(s.r_true, 1.0, 2);
        REQUIRE(rep.projector_trace_residual < 1e-9);
        REQUIRE(rep.vpinv_trace_residual < 1e-9);
    }
}

TEST_CASE("deviation trial") {
    const ExactSetup s(15.0, 10);

    SECTION("produces all three quantities") {
        const DeviationReport rep = deviation_trial(s.scenario, s.geometry, s.phi, 3);
        REQUIRE(rep.xi_empirical >= 0.0);
        REQUIRE(rep.xi_empirical <= 1.0);
        REQUIRE(rep.xi_quadratic >= -1e-12);
        REQUIRE(rep.xi_expected > 0.0);
    }
    SECTION("identity Phi gives the uncompressed reference") {
        REQUIRE_NOTHROW(deviation_trial(s.scenario, s.geometry,
                                        MeasurementMatrix::identity(10), 4));
    }
    SECTION("xi is invariant under eigenvector phase rotation") {
        const SnapshotMatrix x = synthesize_snapshots(s.scenario, s.geometry, 5);
        const SnapshotMatrix y = compress(s.phi, x);
        SubspaceSplit est = split_subspaces(eigendecompose_hermitian(sample_covariance(y)), 2);
        const double base = empirical_deviation(est.signal_basis, s.gamma, 2);
        est.signal_basis.col(0) *= std::polar(1.0, 1.234);
        est.signal_basis.col(1) *= std::polar(1.0, -2.1);
        REQUIRE(std::abs(empirical_deviation(est.signal_basis, s.gamma, 2) - base) < 1e-13);
    }
}

TEST_CASE("lemma Monte Carlo error shrinks roughly as 1/sqrt(trials)") {
    const CovarianceMatrix r = random_psd(3, 51);
    const ComplexMatrix c1 = random_complex_matrix(3, 52);
    const double coarse = fluctuation_product_check(r, c1, 5, 1000, 7);
    const double fine = fluctuation_product_check(r, c1, 5, 100000, 7);
    const double ratio = coarse / fine;
    REQUIRE(ratio > 2.0); // 1/sqrt scaling predicts ~10, allow wide slack
    REQUIRE(ratio < 60.0);
}
