// SPDX-License-Identifier: Apache-2.0
//
// csdoa - CS beamformer root-MUSIC library
//
// Array geometry, steering vectors and the synthetic narrowband snapshot
// generator. Angles cross the API in degrees and are converted to radians
// exactly once, here.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "csdoa/rng.hpp"

namespace csdoa {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline double deg2rad(double deg) { return deg * M_PI / 180.0; }

// Sensor positions in units of the carrier wavelength. The steering phase
// is computed from physical positions, so non-uniform linear arrays are
// representable; on a ULA this coincides with the usual (n-1)*d/lambda form.
struct ArrayGeometry {
    int num_sensors = 0;
    std::vector<double> positions; // in wavelengths, strictly increasing
    double spacing_ratio = 0.5;    // d / lambda

    static ArrayGeometry ula(int n, double spacing_ratio = 0.5) {
        if (n < 2) throw std::invalid_argument("ArrayGeometry: need at least 2 sensors");
        if (spacing_ratio <= 0.0) throw std::invalid_argument("ArrayGeometry: spacing ratio must be positive");
        ArrayGeometry g;
        g.num_sensors = n;
        g.spacing_ratio = spacing_ratio;
        g.positions.resize(n);
        for (int i = 0; i < n; ++i) g.positions[i] = i * spacing_ratio;
        return g;
    }

    static ArrayGeometry from_positions(std::vector<double> pos, double spacing_ratio = 0.5) {
        if (pos.size() < 2) throw std::invalid_argument("ArrayGeometry: need at least 2 sensors");
        for (std::size_t i = 1; i < pos.size(); ++i)
            if (pos[i] <= pos[i - 1])
                throw std::invalid_argument("ArrayGeometry: positions must be strictly increasing");
        ArrayGeometry g;
        g.num_sensors = static_cast<int>(pos.size());
        g.positions = std::move(pos);
        g.spacing_ratio = spacing_ratio;
        return g;
    }

    bool is_uniform(double tol = 1e-9) const {
        for (int i = 0; i < num_sensors; ++i)
            if (std::abs(positions[i] - i * spacing_ratio) > tol) return false;
        return true;
    }
};

// Synthetic ensemble description: source directions, powers, noise floor
// and the snapshot count.
struct SourceScenario {
    std::vector<double> angles_deg;
    std::vector<double> powers;    // per-source power, default all 1
    double noise_variance = 1.0;   // sigma_n^2
    int num_snapshots = 1;         // T

    int num_sources() const { return static_cast<int>(angles_deg.size()); }

    void validate(const ArrayGeometry &geometry) const {
        const int m = num_sources();
        if (m < 1) throw std::invalid_argument("SourceScenario: need at least one source");
        if (m >= geometry.num_sensors)
            throw std::invalid_argument("SourceScenario: source count must be below sensor count");
        if (powers.size() != angles_deg.size())
            throw std::invalid_argument("SourceScenario: powers/angles size mismatch");
        for (double p : powers)
            if (p <= 0.0) throw std::invalid_argument("SourceScenario: powers must be positive");
        if (noise_variance < 0.0)
            throw std::invalid_argument("SourceScenario: noise variance must be non-negative");
        if (num_snapshots < 1)
            throw std::invalid_argument("SourceScenario: snapshot count must be positive");
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (angles_deg[i] == angles_deg[j])
                    throw std::invalid_argument("SourceScenario: duplicate source angles");
    }

    static SourceScenario make(std::vector<double> angles_deg, double snr_db,
                               int num_snapshots, double noise_variance = 1.0) {
        SourceScenario s;
        s.angles_deg = std::move(angles_deg);
        s.powers.assign(s.angles_deg.size(), noise_variance * std::pow(10.0, snr_db / 10.0));
        s.noise_variance = noise_variance;
        s.num_snapshots = num_snapshots;
        return s;
    }
};

// Channels x snapshots complex data block.
struct SnapshotMatrix {
    ComplexMatrix data;

    int channel_count() const { return static_cast<int>(data.rows()); }
    int snapshot_count() const { return static_cast<int>(data.cols()); }
};

// a(theta): entry n is exp(-j * 2*pi * position_n * sin(theta)).
inline ComplexVector steering_vector(const ArrayGeometry &geometry, double angle_deg) {
    if (!(angle_deg > -90.0 && angle_deg < 90.0))
        throw std::invalid_argument("steering_vector: angle must lie in (-90, 90) degrees");
    const double s = std::sin(deg2rad(angle_deg));
    ComplexVector a(geometry.num_sensors);
    for (int n = 0; n < geometry.num_sensors; ++n) {
        const double phase = -2.0 * M_PI * geometry.positions[n] * s;
        a(n) = Complex(std::cos(phase), std::sin(phase));
    }
    return a;
}

// A(theta) = [a(theta_1) ... a(theta_M)].
inline ComplexMatrix steering_matrix(const ArrayGeometry &geometry,
                                     const std::vector<double> &angles_deg) {
    for (std::size_t i = 0; i < angles_deg.size(); ++i)
        for (std::size_t j = i + 1; j < angles_deg.size(); ++j)
            if (angles_deg[i] == angles_deg[j])
                throw std::invalid_argument("steering_matrix: duplicate angles");
    ComplexMatrix a(geometry.num_sensors, angles_deg.size());
    for (std::size_t i = 0; i < angles_deg.size(); ++i)
        a.col(i) = steering_vector(geometry, angles_deg[i]);
    return a;
}

// x(t) = A s(t) + w(t): sources i.i.d. circular complex Gaussian with the
// scenario's per-source powers, noise i.i.d. circular complex Gaussian with
// variance sigma_n^2 per channel. Deterministic for a fixed seed.
inline SnapshotMatrix synthesize_snapshots(const SourceScenario &scenario,
                                           const ArrayGeometry &geometry,
                                           std::uint64_t seed) {
    scenario.validate(geometry);
    const int n = geometry.num_sensors;
    const int m = scenario.num_sources();
    const int t = scenario.num_snapshots;

    const ComplexMatrix a = steering_matrix(geometry, scenario.angles_deg);

    Xoshiro256 rng(seed);
    ComplexMatrix sources(m, t);
    for (int col = 0; col < t; ++col)
        for (int row = 0; row < m; ++row)
            sources(row, col) = std::sqrt(scenario.powers[row]) * rng.next_complex_gaussian();

    ComplexMatrix noise(n, t);
    const double sigma = std::sqrt(scenario.noise_variance);
    for (int col = 0; col < t; ++col)
        for (int row = 0; row < n; ++row)
            noise(row, col) = sigma * rng.next_complex_gaussian();

    SnapshotMatrix out;
    out.data = a * sources + noise;
    return out;
}

} // namespace csdoa
