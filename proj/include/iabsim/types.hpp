#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace iabsim {

using NodeId = std::uint32_t;
using UeId = std::uint32_t;
using LinkId = std::uint32_t;
using PacketId = std::uint64_t;
using SlotIndex = std::uint64_t;

/// Raised for invalid configuration or scenario input. The CLI maps it to a
/// single-line error and a non-zero exit status.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for malformed input files; the message carries the file and line.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct Position {
    double x_m = 0.0;
    double y_m = 0.0;
    double z_m = 0.0;  // antenna height

    bool finite() const {
        return std::isfinite(x_m) && std::isfinite(y_m) && std::isfinite(z_m);
    }
};

inline double distance_2d(const Position& a, const Position& b) {
    return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

inline double distance_3d(const Position& a, const Position& b) {
    return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m, a.z_m - b.z_m);
}

/// Azimuth of the direction from `a` to `b`, degrees in (-180, 180].
inline double azimuth_deg(const Position& a, const Position& b) {
    return std::atan2(b.y_m - a.y_m, b.x_m - a.x_m) * 180.0 / M_PI;
}

/// Absolute angular separation between two azimuths, degrees in [0, 180].
inline double angular_offset_deg(double az_a_deg, double az_b_deg) {
    double d = std::fmod(std::fabs(az_a_deg - az_b_deg), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

enum class LinkKind { access, backhaul };
enum class Band { mmwave, subthz };
enum class SimulationMode { run, debug };
enum class SourceModel { cbr, poisson };

std::string to_string(LinkKind k);
std::string to_string(Band b);
std::string to_string(SimulationMode m);
std::string to_string(SourceModel m);

/// Two-level codebook beam pattern: `elements` sets the mainlobe gain,
/// `beams` the codebook size and hence the mainlobe width.
struct AntennaConfig {
    int elements = 1;
    int beams = 1;
    double boresight_deg = 0.0;
};

}  // namespace iabsim
