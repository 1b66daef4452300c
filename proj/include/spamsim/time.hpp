#ifndef SPAMSIM_TIME_HPP
#define SPAMSIM_TIME_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace spamsim {

// Virtual time is fixed-point with microsecond resolution so reports are
// bit-exact across platforms.
using Micros = std::int64_t;

inline Micros seconds_to_micros(double s) {
    return static_cast<Micros>(std::llround(s * 1e6));
}

inline double micros_to_seconds(Micros us) {
    return static_cast<double>(us) / 1e6;
}

// Renders micros as seconds with exactly six decimals, e.g. 250000000 -> "250.000000".
inline std::string format_seconds(Micros us) {
    char buf[48];
    Micros whole = us / 1000000;
    Micros frac = us % 1000000;
    if (frac < 0) {  // negative values only ever show up in deltas
        frac = -frac;
        if (whole == 0) {
            std::snprintf(buf, sizeof(buf), "-0.%06lld", static_cast<long long>(frac));
            return buf;
        }
    }
    std::snprintf(buf, sizeof(buf), "%lld.%06lld", static_cast<long long>(whole),
                  static_cast<long long>(frac));
    return buf;
}

}  // namespace spamsim

#endif  // SPAMSIM_TIME_HPP
