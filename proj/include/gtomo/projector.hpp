#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gtomo/core.hpp"

namespace gtomo {

/// Azimuthal viewing angles (radians, strictly increasing in [0, pi)) plus the
/// rotation-axis offset in pixels relative to the grid centre (n - 1) / 2.
struct AngleSet {
    std::vector<double> angles;
    double axis_offset = 0.5;

    /// M angles k * pi / M, k = 0..M-1.
    static AngleSet uniform(int count, double axis_offset = 0.5);

    int size() const { return static_cast<int>(angles.size()); }
    AngleSet with_offset(double offset) const { return {angles, offset}; }
    /// Every `stride`-th angle, starting at 0.
    AngleSet subsample(int stride) const;

    void validate() const;
};

/// ceil(pi * n / 2): the angular sampling count for an n-pixel detector row.
int nyquist_angle_count(int n);

/// Angle-major stack of n x n projection images.
struct ProjectionStack {
    int n = 0;
    AngleSet angles;
    std::vector<float> data;

    ProjectionStack() = default;
    ProjectionStack(int n, AngleSet angles);

    int count() const { return angles.size(); }
    std::span<float> image(int a);
    std::span<const float> image(int a) const;
    Image image_copy(int a) const;
    void set_image(int a, const Image& img);
};

/// Parallel-beam projector for one geometry. Each horizontal slice (fixed r2)
/// is rotated by phi about the r2 axis with bilinear interpolation (zero
/// outside the grid) and summed along the beam. `back_project` is the exact
/// transpose divided by the number of angles.
///
/// The per-angle interpolation weights are precomputed once; both directions
/// then run as dense loops over r2, which is the contiguous axis of the
/// internal work layout.
class Projector {
public:
    Projector(int n, AngleSet angles);

    int n() const { return n_; }
    const AngleSet& angles() const { return angles_; }

    ProjectionStack project(const Volume& vol) const;
    Image project_one(const Volume& vol, int angle_index) const;

    /// (1/M) * P^T. Shape mismatch raises ShapeError.
    Volume back_project(const ProjectionStack& stack) const;

    /// Worker count for project/back_project; 0 means the OpenMP default.
    void set_threads(int threads) { threads_ = threads; }

private:
    struct Tap {
        std::int32_t plane;  // r3 * n + r1
        std::int32_t u;      // detector column x1
        float weight;
    };

    void project_into(const std::vector<float>& work, int angle_index, std::span<float> out) const;

    int n_;
    AngleSet angles_;
    std::vector<std::vector<Tap>> taps_;  // per angle
    int threads_ = 0;
};

Image project(const Volume& vol, double angle, double axis_offset);
Volume back_project(const ProjectionStack& stack, int n);

/// Ramp (Ram-Lak) filter along x1 of every row, applied in frequency space
/// with zero padding to 2n. Uses the band-limited spatial kernel so the
/// DC term is handled without an offset.
ProjectionStack ramp_filter(const ProjectionStack& stack);

/// Filtered back-projection with the stack's own geometry:
/// pi * back_project(ramp_filter(stack)).
Volume fbp(const ProjectionStack& stack);

/// Raw float32 angle-major stack plus `<path>.json` {n, M, angles, axis_offset}.
void write_projections(const ProjectionStack& stack, const std::filesystem::path& path);
ProjectionStack read_projections(const std::filesystem::path& path);

}  // namespace gtomo
