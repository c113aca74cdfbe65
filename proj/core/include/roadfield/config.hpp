#pragma once

#include <cstdint>
#include <string>

#include "roadfield/assembly.hpp"

namespace roadfield {

/// One experiment description. Sections and defaults:
///   [domain]  file (required)
///   [network] file (required)
///   [params]  a=1 b=1 mu=1 nu=1 seed=2024 band=1e-3
///   [mesh]    h=0.0625 min_angle=20
///   [eigen]   k=6 tol=1e-8
///   [evolve]  dt=0.01 T=1 snapshot_every=0 initial=bump
///   [output]  dir=. prefix=run
struct RunConfig {
    std::string domain_file;
    std::string network_file;
    Parameters params;
    std::uint64_t seed = 2024;
    double band = 1e-3;
    double h = 0.0625;
    double min_angle = 20.0;
    int k = 6;
    double tol = 1e-8;
    double dt = 0.01;
    double t_end = 1.0;
    int snapshot_every = 0;
    std::string initial = "bump";  // "bump" or "file <path>" with nodal values
    std::string output_dir = ".";
    std::string output_prefix = "run";

    bool operator==(const RunConfig&) const = default;
};

/// Strict INI-style parsing: unknown sections or keys, duplicate keys, type
/// mismatches, and out-of-range values all raise ConfigError carrying the
/// offending line number.
RunConfig parse_config(const std::string& text);

/// Canonical text form; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& config);

RunConfig load_config(const std::string& path);

} // namespace roadfield
