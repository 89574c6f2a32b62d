#include "gtomo/volume.hpp"

#include <cmath>

#include "gtomo/io.hpp"

namespace gtomo {

std::vector<Point3> SpherePhantomSpec::default_centers() {
    return {{20, 20, 18}, {42, 24, 22}, {30, 44, 16}};
}

void SpherePhantomSpec::validate() const {
    if (n < 1) throw ConfigError("phantom side n must be >= 1");
    if (!(sphere_diameter > 0)) throw ConfigError("sphere diameter must be positive");
    if (!(attenuation >= 0)) throw ConfigError("attenuation must be >= 0");
    const double radius = sphere_diameter / 2.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const auto& c = centers[i];
        // Fully inside: every voxel centre the sphere could claim is on the grid.
        for (double coord : {c.r1, c.r2, c.r3}) {
            if (coord - radius < -0.5 || coord + radius > n - 0.5)
                throw ConfigError("sphere " + std::to_string(i) + " is not fully inside the " +
                                  std::to_string(n) + "^3 grid");
        }
    }
    for (std::size_t i = 0; i < centers.size(); ++i) {
        for (std::size_t j = i + 1; j < centers.size(); ++j) {
            const double d = std::hypot(centers[i].r1 - centers[j].r1,
                                        centers[i].r2 - centers[j].r2,
                                        centers[i].r3 - centers[j].r3);
            if (!(d > sphere_diameter))
                throw ConfigError("spheres " + std::to_string(i) + " and " + std::to_string(j) +
                                  " overlap (centre distance " + std::to_string(d) +
                                  " <= diameter " + std::to_string(sphere_diameter) + ")");
        }
    }
}

Volume build_phantom(const SpherePhantomSpec& spec) {
    spec.validate();
    Volume vol(spec.n);
    const double r2max = spec.sphere_diameter * spec.sphere_diameter / 4.0;
    for (const auto& c : spec.centers) {
        for (int r3 = 0; r3 < spec.n; ++r3) {
            const double d3 = r3 - c.r3;
            for (int r2 = 0; r2 < spec.n; ++r2) {
                const double d2 = r2 - c.r2;
                for (int r1 = 0; r1 < spec.n; ++r1) {
                    const double d1 = r1 - c.r1;
                    if (d1 * d1 + d2 * d2 + d3 * d3 < r2max) vol.at(r1, r2, r3) = spec.attenuation;
                }
            }
        }
    }
    return vol;
}

void write_volume(const Volume& vol, const std::filesystem::path& raw_path,
                  const std::string& description) {
    io::write_raw_f32(raw_path, vol.span());
    io::write_json(io::sidecar_path(raw_path), {{"n", vol.n()},
                                                {"voxel_order", "r3,r2,r1"},
                                                {"dtype", "float32le"},
                                                {"description", description}});
}

Volume read_volume(const std::filesystem::path& raw_path) {
    const auto meta = io::read_json(io::sidecar_path(raw_path));
    const int n = meta.at("n").get<int>();
    if (meta.value("dtype", "float32le") != "float32le")
        throw IoError("unsupported volume dtype in sidecar");
    return Volume(n, io::read_raw_f32(raw_path));
}

}  // namespace gtomo
