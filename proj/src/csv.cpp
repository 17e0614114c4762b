#include "omls/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace omls {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

}  // namespace

void write_csv(const std::string& path, std::span<const std::string> columns,
               std::span<const std::vector<double>> series) {
    if (columns.size() != series.size()) {
        throw std::invalid_argument("csv: header/series count mismatch");
    }
    std::size_t rows = series.empty() ? 0 : series.front().size();
    for (const auto& s : series) {
        if (s.size() != rows) {
            throw std::invalid_argument("csv: ragged series");
        }
    }
    auto out = open_out(path);
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out << (c ? "," : "") << columns[c];
    }
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < series.size(); ++c) {
            out << (c ? "," : "") << fmt(series[c][r]);
        }
        out << '\n';
    }
}

void trajectory_to_csv(const Trajectory& traj, const std::string& path) {
    const std::size_t n = traj.size();
    std::vector<std::vector<double>> cols(6, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        cols[0][i] = traj.times[i];
        cols[1][i] = traj.alpha[i].real();
        cols[2][i] = traj.alpha[i].imag();
        cols[3][i] = traj.beta[i].real();
        cols[4][i] = traj.beta[i].imag();
        cols[5][i] = traj.emitted_power_at(i);
    }
    const std::vector<std::string> names{"t_us",    "alpha_re", "alpha_im",
                                         "beta_re", "beta_im",  "emitted_power"};
    write_csv(path, names, cols);
}

void beat_to_csv(const BeatRecord& rec, const std::string& path) {
    const std::vector<std::string> names{"t_us", "voltage"};
    const std::vector<std::vector<double>> cols{rec.times, rec.voltage};
    write_csv(path, names, cols);
}

void scan_to_csv(const GateScan& scan, const std::string& path) {
    const std::vector<std::string> names{"gate_start_us", "power"};
    const std::vector<std::vector<double>> cols{scan.gate_starts, scan.power};
    write_csv(path, names, cols);
}

}  // namespace omls
