#pragma once

namespace kvn::units {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kBohrInAngstrom = 0.529177210903;
inline constexpr double kAuTimeInFs = 0.02418884254;
inline constexpr double kAuTimeInSeconds = 2.418884254e-17;
inline constexpr double kBoltzmannHartreePerKelvin = 3.166811563e-6;
inline constexpr double kHartreeInWavenumber = 219474.6313632;
inline constexpr double kProtonMassAu = 1836.15267343;

/* reduced mass of H2 (two protons) */
inline constexpr double kH2ReducedMass = 0.5 * kProtonMassAu;

constexpr double angstrom_to_bohr(double a) { return a / kBohrInAngstrom; }
constexpr double bohr_to_angstrom(double b) { return b * kBohrInAngstrom; }
constexpr double kelvin_to_hartree(double t) { return t * kBoltzmannHartreePerKelvin; }
constexpr double hartree_to_kelvin(double e) { return e / kBoltzmannHartreePerKelvin; }
constexpr double fs_to_au(double t) { return t / kAuTimeInFs; }
constexpr double au_to_fs(double t) { return t * kAuTimeInFs; }

/* angular frequency (a.u.) <-> wavenumber */
constexpr double au_to_wavenumber(double omega) { return omega * kHartreeInWavenumber; }
constexpr double wavenumber_to_au(double w) { return w / kHartreeInWavenumber; }

/* rate per a.u. time -> per second */
constexpr double rate_au_to_per_second(double k) { return k / kAuTimeInSeconds; }

}  // namespace kvn::units
