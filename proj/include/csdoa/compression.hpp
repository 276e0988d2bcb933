// SPDX-License-Identifier: Apache-2.0
//
// csdoa - CS beamformer root-MUSIC library
//
// Measurement matrix generation, the m in (M, N) admissibility gate and the
// snapshot compression y = Phi * x.

#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "csdoa/array_model.hpp"
#include "csdoa/rng.hpp"

namespace csdoa {

enum class PhiMode { RawGaussian, RowOrthonormal };

inline std::string to_string(PhiMode mode) {
    return mode == PhiMode::RawGaussian ? "raw-gaussian" : "row-orthonormal";
}

inline PhiMode phi_mode_from_string(const std::string &s) {
    if (s == "raw-gaussian") return PhiMode::RawGaussian;
    if (s == "row-orthonormal") return PhiMode::RowOrthonormal;
    throw std::invalid_argument("unknown measurement matrix mode: " + s);
}

// Outcome of the measurement count gate. The admissible interval is
// M+1 <= m <= N-1: below it the compressed covariance has no noise
// eigenvector; at or above N there is no compression.
struct MeasurementBound {
    enum class Reason { Accepted, NoNoiseEigenvector, NoCompression };

    bool accepted = false;
    Reason reason = Reason::Accepted;
    std::string message;

    explicit operator bool() const { return accepted; }
};

inline MeasurementBound validate_m(int num_sources, int num_sensors, int m) {
    if (num_sources < 1) throw std::invalid_argument("validate_m: need at least one source");
    if (num_sensors <= num_sources)
        throw std::invalid_argument("validate_m: sensor count must exceed source count");
    MeasurementBound r;
    if (m <= num_sources) {
        r.reason = MeasurementBound::Reason::NoNoiseEigenvector;
        r.message = "m = " + std::to_string(m) + " <= M = " + std::to_string(num_sources) +
                    ": compressed covariance has no noise eigenvector";
    } else if (m >= num_sensors) {
        r.reason = MeasurementBound::Reason::NoCompression;
        r.message = "m = " + std::to_string(m) + " >= N = " + std::to_string(num_sensors) +
                    ": no compression takes place";
    } else {
        r.accepted = true;
        r.message = "accepted";
    }
    return r;
}

// Real m x N compression operator.
struct MeasurementMatrix {
    Eigen::MatrixXd data;
    PhiMode mode = PhiMode::RowOrthonormal;
    std::uint64_t seed = 0;

    int rows() const { return static_cast<int>(data.rows()); }
    int cols() const { return static_cast<int>(data.cols()); }

    static MeasurementMatrix identity(int n) {
        MeasurementMatrix phi;
        phi.data = Eigen::MatrixXd::Identity(n, n);
        phi.mode = PhiMode::RowOrthonormal;
        return phi;
    }
};

// Draw Phi. Raw mode: i.i.d. N(0,1) entries scaled by 1/sqrt(N).
// Row-orthonormal mode: orthonormalized rows of a Gaussian draw, so
// Phi * Phi^T = I_m and white noise stays white after compression.
inline MeasurementMatrix draw_measurement_matrix(int m, int num_sensors, PhiMode mode,
                                                 std::uint64_t seed) {
    if (m < 1 || num_sensors < 1 || m >= num_sensors)
        throw std::invalid_argument("draw_measurement_matrix: need 1 <= m < N");

    Xoshiro256 rng(seed);
    Eigen::MatrixXd g(m, num_sensors);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < num_sensors; ++j)
            g(i, j) = rng.next_gaussian();

    MeasurementMatrix phi;
    phi.mode = mode;
    phi.seed = seed;
    if (mode == PhiMode::RawGaussian) {
        phi.data = g / std::sqrt(static_cast<double>(num_sensors));
    } else {
        // Thin QR of G^T gives an orthonormal basis of the row space.
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g.transpose());
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(num_sensors, m);
        phi.data = q.transpose();
    }
    return phi;
}

// Draw Phi only after the admissibility gate passes.
inline MeasurementMatrix draw_validated_measurement_matrix(int num_sources, int num_sensors,
                                                           int m, PhiMode mode,
                                                           std::uint64_t seed) {
    const MeasurementBound bound = validate_m(num_sources, num_sensors, m);
    if (!bound)
        throw std::invalid_argument("draw_measurement_matrix: " + bound.message);
    return draw_measurement_matrix(m, num_sensors, mode, seed);
}

// y = Phi * x, column by column over the snapshot block.
inline SnapshotMatrix compress(const MeasurementMatrix &phi, const SnapshotMatrix &snapshots) {
    if (phi.cols() != snapshots.channel_count())
        throw std::invalid_argument("compress: Phi column count does not match channel count");
    SnapshotMatrix out;
    out.data = phi.data.cast<Complex>() * snapshots.data;
    return out;
}

// CSV round-trip so experiments can be replayed with a fixed Phi.
// Row-major, full double precision, one matrix row per line.
inline void save_measurement_matrix_csv(const MeasurementMatrix &phi, const std::string &path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "# csdoa-phi v1 mode=" << to_string(phi.mode) << " rows=" << phi.rows()
        << " cols=" << phi.cols() << "\n";
    out.precision(17);
    for (int i = 0; i < phi.rows(); ++i) {
        for (int j = 0; j < phi.cols(); ++j) {
            if (j) out << ',';
            out << phi.data(i, j);
        }
        out << '\n';
    }
}

inline MeasurementMatrix load_measurement_matrix_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string header;
    std::getline(in, header);
    MeasurementMatrix phi;
    const auto mode_pos = header.find("mode=");
    if (header.rfind("# csdoa-phi", 0) != 0 || mode_pos == std::string::npos)
        throw std::runtime_error("not a csdoa measurement matrix file: " + path);
    phi.mode = phi_mode_from_string(header.substr(mode_pos + 5, header.find(' ', mode_pos) - mode_pos - 5));

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("ragged measurement matrix file: " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("empty measurement matrix file: " + path);
    phi.data.resize(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            phi.data(i, j) = rows[i][j];
    return phi;
}

} // namespace csdoa
