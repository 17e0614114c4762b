#pragma once

#include <numbers>

namespace omls {

// Internal convention: every rate and frequency is angular (rad/us), every
// time is us. Configuration files and reports use linear frequency in MHz
// (nu = omega/2pi); since 1 MHz = 1 cycle/us the conversion is a bare
// factor of 2*pi, applied exactly once at ingestion or emission.

inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double rad_per_us_from_mhz(double nu_mhz) { return two_pi * nu_mhz; }
constexpr double mhz_from_rad_per_us(double omega) { return omega / two_pi; }

// Photon flux carried by 1 mW at the given wavelength, in photons/us.
double photon_flux_per_mw(double wavelength_nm);

}  // namespace omls
