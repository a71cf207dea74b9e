#pragma once

namespace geomvqe {

/// Bohr per Angstrom (CODATA-derived). Every unit conversion goes through here.
inline constexpr double kBohrPerAngstrom = 1.8897259886;
inline constexpr double kAngstromPerBohr = 1.0 / kBohrPerAngstrom;

/// 1 kcal/mol expressed in Hartree, rounded the way it is usually quoted.
inline constexpr double kChemicalAccuracy = 1.6e-3;

inline constexpr double kPi = 3.14159265358979323846;

constexpr double angstrom_to_bohr(double a) { return a * kBohrPerAngstrom; }
constexpr double bohr_to_angstrom(double b) { return b * kAngstromPerBohr; }
constexpr double rad_to_deg(double r) { return r * 180.0 / kPi; }
constexpr double deg_to_rad(double d) { return d * kPi / 180.0; }

}  // namespace geomvqe
