#include "gtomo/projector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <omp.h>

#include "gtomo/fft.hpp"
#include "gtomo/io.hpp"

namespace gtomo {

AngleSet AngleSet::uniform(int count, double axis_offset) {
    if (count < 1) throw ParameterError("angle count must be >= 1");
    AngleSet set;
    set.axis_offset = axis_offset;
    set.angles.resize(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) set.angles[static_cast<std::size_t>(k)] = k * std::numbers::pi / count;
    return set;
}

AngleSet AngleSet::subsample(int stride) const {
    if (stride < 1) throw ParameterError("subsample stride must be >= 1");
    AngleSet out;
    out.axis_offset = axis_offset;
    for (std::size_t k = 0; k < angles.size(); k += static_cast<std::size_t>(stride))
        out.angles.push_back(angles[k]);
    return out;
}

void AngleSet::validate() const {
    for (std::size_t k = 0; k < angles.size(); ++k) {
        if (!(angles[k] >= 0.0 && angles[k] < std::numbers::pi))
            throw ParameterError("angle " + std::to_string(k) + " outside [0, pi)");
        if (k > 0 && !(angles[k] > angles[k - 1]))
            throw ParameterError("angles must be strictly increasing");
    }
}

int nyquist_angle_count(int n) {
    return static_cast<int>(std::ceil(std::numbers::pi * n / 2.0));
}

ProjectionStack::ProjectionStack(int n_, AngleSet angles_)
    : n(n_), angles(std::move(angles_)),
      data(static_cast<std::size_t>(n_) * n_ * angles.angles.size(), 0.0f) {}

std::span<float> ProjectionStack::image(int a) {
    const auto nn = static_cast<std::size_t>(n) * n;
    return std::span<float>(data).subspan(static_cast<std::size_t>(a) * nn, nn);
}

std::span<const float> ProjectionStack::image(int a) const {
    const auto nn = static_cast<std::size_t>(n) * n;
    return std::span<const float>(data).subspan(static_cast<std::size_t>(a) * nn, nn);
}

Image ProjectionStack::image_copy(int a) const {
    auto s = image(a);
    return Image(n, std::vector<float>(s.begin(), s.end()));
}

void ProjectionStack::set_image(int a, const Image& img) {
    if (img.n() != n) throw ShapeError("image side does not match projection stack");
    std::copy(img.data().begin(), img.data().end(), image(a).begin());
}

Projector::Projector(int n, AngleSet angles) : n_(n), angles_(std::move(angles)) {
    if (n < 1) throw ShapeError("projector side must be >= 1");
    angles_.validate();
    const double c = (n - 1) / 2.0 + angles_.axis_offset;
    taps_.resize(angles_.angles.size());
    for (std::size_t a = 0; a < angles_.angles.size(); ++a) {
        const double cs = std::cos(angles_.angles[a]);
        const double sn = std::sin(angles_.angles[a]);
        auto& taps = taps_[a];
        taps.reserve(static_cast<std::size_t>(n) * n * 4);
        for (int u = 0; u < n; ++u) {
            const double x1 = u - c;
            for (int k = 0; k < n; ++k) {
                const double t = k - c;
                // Point on the ray through detector column u at beam depth t,
                // expressed in volume coordinates; x1 = r1 cos(phi) - r3 sin(phi).
                const double r1 = x1 * cs + t * sn + c;
                const double r3 = -x1 * sn + t * cs + c;
                const int i1 = static_cast<int>(std::floor(r1));
                const int i3 = static_cast<int>(std::floor(r3));
                const double f1 = r1 - i1;
                const double f3 = r3 - i3;
                const int ci3[4] = {i3, i3, i3 + 1, i3 + 1};
                const int ci1[4] = {i1, i1 + 1, i1, i1 + 1};
                const double w[4] = {(1 - f3) * (1 - f1), (1 - f3) * f1, f3 * (1 - f1), f3 * f1};
                for (int q = 0; q < 4; ++q) {
                    if (ci3[q] < 0 || ci3[q] >= n || ci1[q] < 0 || ci1[q] >= n) continue;
                    if (w[q] <= 1e-12) continue;
                    taps.push_back({ci3[q] * n + ci1[q], u, static_cast<float>(w[q])});
                }
            }
        }
    }
}

namespace {

// Volume (r3, r2, r1) -> work layout (r3, r1, r2) so that r2 is contiguous.
std::vector<float> to_work_layout(const Volume& vol) {
    const int n = vol.n();
    std::vector<float> work(vol.size());
    for (int r3 = 0; r3 < n; ++r3)
        for (int r2 = 0; r2 < n; ++r2)
            for (int r1 = 0; r1 < n; ++r1)
                work[(static_cast<std::size_t>(r3) * n + r1) * n + r2] = vol.at(r1, r2, r3);
    return work;
}

Volume from_work_layout(const std::vector<float>& work, int n) {
    Volume vol(n);
    for (int r3 = 0; r3 < n; ++r3)
        for (int r1 = 0; r1 < n; ++r1)
            for (int r2 = 0; r2 < n; ++r2)
                vol.at(r1, r2, r3) = work[(static_cast<std::size_t>(r3) * n + r1) * n + r2];
    return vol;
}

int resolve_threads(int requested) {
    return requested > 0 ? requested : omp_get_max_threads();
}

// Contiguous share [lo, hi) of n for worker `tid` out of `nt`.
std::pair<int, int> share(int n, int tid, int nt) {
    const int base = n / nt, extra = n % nt;
    const int lo = tid * base + std::min(tid, extra);
    return {lo, lo + base + (tid < extra ? 1 : 0)};
}

}  // namespace

void Projector::project_into(const std::vector<float>& work, int angle_index,
                             std::span<float> out_t) const {
    const int n = n_;
    const int nt = resolve_threads(threads_);
#pragma omp parallel num_threads(nt)
    {
        const auto [lo, hi] = share(n, omp_get_thread_num(), omp_get_num_threads());
        for (const Tap& tap : taps_[static_cast<std::size_t>(angle_index)]) {
            const float* src = work.data() + static_cast<std::size_t>(tap.plane) * n;
            float* dst = out_t.data() + static_cast<std::size_t>(tap.u) * n;
            const float w = tap.weight;
            for (int r2 = lo; r2 < hi; ++r2) dst[r2] += w * src[r2];
        }
    }
}

ProjectionStack Projector::project(const Volume& vol) const {
    if (vol.n() != n_) throw ShapeError("volume side does not match projector");
    const auto work = to_work_layout(vol);
    ProjectionStack stack(n_, angles_);
    std::vector<float> out_t(static_cast<std::size_t>(n_) * n_);
    for (int a = 0; a < angles_.size(); ++a) {
        std::fill(out_t.begin(), out_t.end(), 0.0f);
        project_into(work, a, out_t);
        auto img = stack.image(a);
        for (int u = 0; u < n_; ++u)
            for (int x2 = 0; x2 < n_; ++x2)
                img[static_cast<std::size_t>(x2) * n_ + u] = out_t[static_cast<std::size_t>(u) * n_ + x2];
    }
    return stack;
}

Image Projector::project_one(const Volume& vol, int angle_index) const {
    if (vol.n() != n_) throw ShapeError("volume side does not match projector");
    if (angle_index < 0 || angle_index >= angles_.size()) throw ShapeError("angle index out of range");
    const auto work = to_work_layout(vol);
    std::vector<float> out_t(static_cast<std::size_t>(n_) * n_, 0.0f);
    project_into(work, angle_index, out_t);
    Image img(n_);
    for (int u = 0; u < n_; ++u)
        for (int x2 = 0; x2 < n_; ++x2) img.at(u, x2) = out_t[static_cast<std::size_t>(u) * n_ + x2];
    return img;
}

Volume Projector::back_project(const ProjectionStack& stack) const {
    if (stack.n != n_ || stack.count() != angles_.size())
        throw ShapeError("projection stack shape does not match projector (" +
                         std::to_string(stack.count()) + " x " + std::to_string(stack.n) + "^2 vs " +
                         std::to_string(angles_.size()) + " x " + std::to_string(n_) + "^2)");
    const int n = n_;
    std::vector<float> work(static_cast<std::size_t>(n) * n * n, 0.0f);
    std::vector<float> img_t(static_cast<std::size_t>(n) * n * angles_.size());
    for (int a = 0; a < angles_.size(); ++a) {
        auto img = stack.image(a);
        float* dst = img_t.data() + static_cast<std::size_t>(a) * n * n;
        for (int x2 = 0; x2 < n; ++x2)
            for (int u = 0; u < n; ++u)
                dst[static_cast<std::size_t>(u) * n + x2] = img[static_cast<std::size_t>(x2) * n + u];
    }
    const int nt = resolve_threads(threads_);
#pragma omp parallel num_threads(nt)
    {
        const auto [lo, hi] = share(n, omp_get_thread_num(), omp_get_num_threads());
        for (int a = 0; a < angles_.size(); ++a) {
            const float* src_a = img_t.data() + static_cast<std::size_t>(a) * n * n;
            for (const Tap& tap : taps_[static_cast<std::size_t>(a)]) {
                const float* src = src_a + static_cast<std::size_t>(tap.u) * n;
                float* dst = work.data() + static_cast<std::size_t>(tap.plane) * n;
                const float w = tap.weight;
                for (int r2 = lo; r2 < hi; ++r2) dst[r2] += w * src[r2];
            }
        }
    }
    const float inv_m = 1.0f / static_cast<float>(angles_.size());
    for (float& v : work) v *= inv_m;
    return from_work_layout(work, n);
}

Image project(const Volume& vol, double angle, double axis_offset) {
    return Projector(vol.n(), AngleSet{{angle}, axis_offset}).project_one(vol, 0);
}

Volume back_project(const ProjectionStack& stack, int n) {
    if (stack.n != n) throw ShapeError("projection side " + std::to_string(stack.n) +
                                       " does not match requested volume side " + std::to_string(n));
    return Projector(n, stack.angles).back_project(stack);
}

ProjectionStack ramp_filter(const ProjectionStack& stack) {
    const int n = stack.n;
    const int len = 2 * n;
    // Band-limited ramp kernel on the padded circular grid:
    // h(0) = 1/4, h(k odd) = -1 / (pi k)^2, h(k even) = 0.
    std::vector<double> kernel(static_cast<std::size_t>(len), 0.0);
    for (int i = 0; i < len; ++i) {
        const int k = i <= n ? i : i - len;
        if (k == 0) kernel[static_cast<std::size_t>(i)] = 0.25;
        else if (k % 2 != 0) kernel[static_cast<std::size_t>(i)] = -1.0 / (std::numbers::pi * std::numbers::pi * k * k);
    }
    fft::RealFft1d fft(len);
    const auto response = fft.forward(kernel);

    ProjectionStack out(n, stack.angles);
    std::vector<double> row(static_cast<std::size_t>(len));
    for (int a = 0; a < stack.count(); ++a) {
        auto src = stack.image(a);
        auto dst = out.image(a);
        for (int x2 = 0; x2 < n; ++x2) {
            std::fill(row.begin(), row.end(), 0.0);
            for (int x1 = 0; x1 < n; ++x1)
                row[static_cast<std::size_t>(x1)] = src[static_cast<std::size_t>(x2) * n + x1];
            auto spec = fft.forward(row);
            for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= response[k].real();
            const auto filtered = fft.inverse(spec);
            for (int x1 = 0; x1 < n; ++x1)
                dst[static_cast<std::size_t>(x2) * n + x1] = static_cast<float>(filtered[static_cast<std::size_t>(x1)]);
        }
    }
    return out;
}

Volume fbp(const ProjectionStack& stack) {
    if (stack.count() < 1) throw ShapeError("fbp needs at least one projection");
    Volume vol = Projector(stack.n, stack.angles).back_project(ramp_filter(stack));
    for (float& v : vol.data()) v *= static_cast<float>(std::numbers::pi);
    return vol;
}

void write_projections(const ProjectionStack& stack, const std::filesystem::path& path) {
    io::write_raw_f32(path, stack.data);
    io::write_json(io::sidecar_path(path), {{"n", stack.n},
                                            {"M", stack.count()},
                                            {"angles", stack.angles.angles},
                                            {"axis_offset", stack.angles.axis_offset},
                                            {"dtype", "float32le"},
                                            {"order", "angle,x2,x1"}});
}

ProjectionStack read_projections(const std::filesystem::path& path) {
    const auto meta = io::read_json(io::sidecar_path(path));
    AngleSet angles{meta.at("angles").get<std::vector<double>>(), meta.at("axis_offset").get<double>()};
    ProjectionStack stack(meta.at("n").get<int>(), angles);
    auto values = io::read_raw_f32(path);
    if (values.size() != stack.data.size())
        throw IoError("projection stack '" + path.string() + "' has " + std::to_string(values.size()) +
                      " values, sidecar implies " + std::to_string(stack.data.size()));
    stack.data = std::move(values);
    return stack;
}

}  // namespace gtomo
