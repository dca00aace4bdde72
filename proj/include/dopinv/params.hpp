#ifndef DOPINV_PARAMS_HPP
#define DOPINV_PARAMS_HPP

#include <cmath>

#include "dopinv/errors.hpp"

namespace dopinv {

/// One-carrier vs two-carrier linearized stationary model.
enum class CarrierMode { unipolar, bipolar };

/// Physical constants in scaled (thermal-voltage) units. The potential is
/// measured in units of U_T, so U_T itself only matters when reporting
/// unscaled quantities.
struct ModelParams {
  double lambda = 0.1;  ///< scaled Debye length
  double n_i = 1.0;     ///< intrinsic carrier density
  double mu_n = 1.5;    ///< electron mobility
  double mu_p = 0.45;   ///< hole mobility
  double U_T = 1.0;     ///< thermal voltage (unscaled reporting only)
  double c_min = -2.0;  ///< lower doping bound C_m
  double c_max = 2.0;   ///< upper doping bound C_M

  void validate() const {
    if (!(lambda > 0.0)) throw ConfigError("model: lambda must be positive");
    if (!(n_i > 0.0)) throw ConfigError("model: n_i must be positive");
    if (!(mu_n > 0.0)) throw ConfigError("model: mu_n must be positive");
    if (!(mu_p > 0.0)) throw ConfigError("model: mu_p must be positive");
    if (!(U_T > 0.0)) throw ConfigError("model: U_T must be positive");
    if (!(c_min < c_max)) throw ConfigError("model: c_min must be < c_max");
  }
};

/// Majority-carrier density at an Ohmic contact for doping value c:
/// n_D = (c + sqrt(c^2 + 4 n_i^2)) / 2.
inline double contact_electron_density(double c, double n_i) {
  return 0.5 * (c + std::sqrt(c * c + 4.0 * n_i * n_i));
}

inline double contact_hole_density(double c, double n_i) {
  return 0.5 * (-c + std::sqrt(c * c + 4.0 * n_i * n_i));
}

/// Built-in potential ln(n_D/n_i) in scaled units; equals asinh(c/(2 n_i)),
/// which is the cancellation-free evaluation for c << 0.
inline double builtin_potential_value(double c, double n_i) {
  return std::asinh(c / (2.0 * n_i));
}

}  // namespace dopinv

#endif  // DOPINV_PARAMS_HPP
