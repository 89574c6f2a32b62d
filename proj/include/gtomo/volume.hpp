#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "gtomo/core.hpp"

namespace gtomo {

/// Sphere centre in voxel coordinates (r1, r2, r3).
struct Point3 {
    double r1 = 0, r2 = 0, r3 = 0;
};

struct SpherePhantomSpec {
    int n = 64;
    double sphere_diameter = 12.0;
    float attenuation = 1.0f;
    std::vector<Point3> centers = default_centers();

    /// Three centres with every sphere cut by the r3 = 18 slice and every
    /// sphere inside the rotation circle for n >= 51.
    static std::vector<Point3> default_centers();

    /// Throws ConfigError naming the offending sphere or pair.
    void validate() const;
};

/// Voxel value is `attenuation` where the voxel centre lies strictly inside a
/// sphere, 0 elsewhere. No partial-volume weighting.
Volume build_phantom(const SpherePhantomSpec& spec);

/// Raw little-endian float32 volume plus `<path>.json` sidecar.
void write_volume(const Volume& vol, const std::filesystem::path& raw_path,
                  const std::string& description = {});
Volume read_volume(const std::filesystem::path& raw_path);

}  // namespace gtomo
