#ifndef PHASEALIGN_COMMON_HPP
#define PHASEALIGN_COMMON_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace phasealign {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Raised when every channel amplitude is zero and normalization is undefined.
struct degenerate_channel_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when measurements are mutually inconsistent beyond rounding.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised on malformed or out-of-range experiment configuration.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Wrap an angle to [-pi, pi).
inline double wrap_angle(double x) {
    double w = std::remainder(x, two_pi);
    if (w >= pi) w -= two_pi;
    if (w < -pi) w += two_pi;
    return w;
}

} // namespace phasealign

#endif
