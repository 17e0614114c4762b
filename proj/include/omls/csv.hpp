#pragma once

#include <span>
#include <string>
#include <vector>

#include "omls/detection.hpp"
#include "omls/dynamics.hpp"

namespace omls {

// All writers emit a header row plus %.17g-formatted values, so identical
// data produces byte-identical files.

void write_csv(const std::string& path, std::span<const std::string> columns,
               std::span<const std::vector<double>> series);

// t_us, alpha_re, alpha_im, beta_re, beta_im, emitted_power
void trajectory_to_csv(const Trajectory& traj, const std::string& path);

// t_us, voltage
void beat_to_csv(const BeatRecord& rec, const std::string& path);

// gate_start_us, power
void scan_to_csv(const GateScan& scan, const std::string& path);

}  // namespace omls
