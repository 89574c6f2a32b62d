#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "gtomo/rng.hpp"
#include "gtomo/volume.hpp"

using namespace gtomo;

TEST_CASE("zero attenuation gives an all-zero volume") {
    SpherePhantomSpec spec;
    spec.attenuation = 0.0f;
    const auto vol = build_phantom(spec);
    CHECK(vol.n() == 64);
    CHECK(std::all_of(vol.data().begin(), vol.data().end(), [](float v) { return v == 0.0f; }));
}

TEST_CASE("default phantom voxel sum is close to three analytic spheres") {
    const auto vol = build_phantom({});
    const double analytic = 3.0 * 4.0 / 3.0 * std::numbers::pi * 216.0;
    CHECK(analytic == doctest::Approx(2714.3).epsilon(1e-4));
    CHECK(std::abs(vol.sum() - analytic) / analytic < 0.03);
    CHECK(vol.data().size() == 64u * 64u * 64u);
    CHECK(*std::min_element(vol.data().begin(), vol.data().end()) >= 0.0f);
}

TEST_CASE("d = 2 sphere at a voxel centre claims only voxels closer than 1") {
    SpherePhantomSpec spec;
    spec.n = 9;
    spec.sphere_diameter = 2.0;
    spec.centers = {{4, 4, 4}};
    const auto vol = build_phantom(spec);
    int expected = 0;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c)
                if (a * a + b * b + c * c < 1) ++expected;
    CHECK(expected == 1);
    CHECK(vol.sum() == doctest::Approx(expected));
    CHECK(vol.at(4, 4, 4) == 1.0f);
}

TEST_CASE("overlapping or out-of-grid spheres are rejected with the culprit named") {
    SpherePhantomSpec spec;
    spec.centers = {{20, 20, 20}, {25, 20, 20}, {50, 50, 50}};
    try {
        build_phantom(spec);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("spheres 0 and 1") != std::string::npos);
    }
    spec.centers = {{20, 20, 20}, {3, 40, 40}};
    try {
        build_phantom(spec);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("sphere 1") != std::string::npos);
    }
}

TEST_CASE("sphere order does not matter") {
    SpherePhantomSpec a, b;
    std::reverse(b.centers.begin(), b.centers.end());
    CHECK(build_phantom(a).data() == build_phantom(b).data());
}

TEST_CASE("attenuation scales every voxel") {
    SpherePhantomSpec a, b;
    b.attenuation = 2.5f;
    const auto va = build_phantom(a), vb = build_phantom(b);
    for (std::size_t i = 0; i < va.size(); ++i) REQUIRE(vb.data()[i] == 2.5f * va.data()[i]);
    CHECK(vb.sum() == doctest::Approx(2.5 * va.sum()));
}

TEST_CASE("voxelized sphere volume converges as the diameter grows") {
    // Lattice-point counts oscillate with the centre's sub-voxel position, so
    // the error is averaged over random centres.
    gtomo::Rng rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point3> centres(64);
    for (auto& c : centres) c = {32 + u(rng), 32 + u(rng), 32 + u(rng)};
    double previous = 1e9;
    for (double d : {6.0, 12.0, 24.0}) {
        const double analytic = std::numbers::pi * d * d * d / 6.0;
        double err = 0;
        for (const auto& c : centres) {
            SpherePhantomSpec spec;
            spec.sphere_diameter = d;
            spec.centers = {c};
            err += std::abs(build_phantom(spec).sum() - analytic) / analytic;
        }
        err /= static_cast<double>(centres.size());
        CAPTURE(d);
        CHECK(err < previous);
        previous = err;
    }
}

TEST_CASE("volume file round trip") {
    const auto path = std::filesystem::temp_directory_path() / "gtomo_test_volume.raw";
    const auto vol = build_phantom({});
    write_volume(vol, path, "test");
    const auto back = read_volume(path);
    CHECK(back.n() == 64);
    CHECK(back.data() == vol.data());
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".json");
}
