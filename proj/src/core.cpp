#include "gtomo/core.hpp"

#include <algorithm>
#include <numeric>

namespace gtomo {

Image::Image(int n, float fill) : n_(n) {
    if (n < 1) throw ShapeError("image side must be >= 1, got " + std::to_string(n));
    data_.assign(static_cast<std::size_t>(n) * n, fill);
}

Image::Image(int n, std::vector<float> data) : n_(n), data_(std::move(data)) {
    if (n < 1 || data_.size() != static_cast<std::size_t>(n) * n)
        throw ShapeError("image data size " + std::to_string(data_.size()) +
                         " does not match side " + std::to_string(n));
}

double Image::sum() const {
    return std::accumulate(data_.begin(), data_.end(), 0.0);
}

float Image::max() const {
    return data_.empty() ? 0.0f : *std::max_element(data_.begin(), data_.end());
}

Volume::Volume(int n, float fill) : n_(n) {
    if (n < 1) throw ShapeError("volume side must be >= 1, got " + std::to_string(n));
    data_.assign(static_cast<std::size_t>(n) * n * n, fill);
}

Volume::Volume(int n, std::vector<float> data) : n_(n), data_(std::move(data)) {
    if (n < 1 || data_.size() != static_cast<std::size_t>(n) * n * n)
        throw ShapeError("volume data size " + std::to_string(data_.size()) +
                         " does not match side " + std::to_string(n));
}

double Volume::sum() const {
    return std::accumulate(data_.begin(), data_.end(), 0.0);
}

float Volume::max() const {
    return data_.empty() ? 0.0f : *std::max_element(data_.begin(), data_.end());
}

Image Volume::slice_r3(int r3) const {
    if (r3 < 0 || r3 >= n_) throw ShapeError("r3 slice index out of range");
    Image out(n_);
    for (int r2 = 0; r2 < n_; ++r2)
        for (int r1 = 0; r1 < n_; ++r1) out.at(r1, r2) = at(r1, r2, r3);
    return out;
}

Image Volume::slice_r2(int r2) const {
    if (r2 < 0 || r2 >= n_) throw ShapeError("r2 slice index out of range");
    Image out(n_);
    for (int r3 = 0; r3 < n_; ++r3)
        for (int r1 = 0; r1 < n_; ++r1) out.at(r1, r3) = at(r1, r2, r3);
    return out;
}

double dot(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

void axpy(float a, std::span<const float> x, std::span<float> y) {
    if (x.size() != y.size()) throw ShapeError("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace gtomo
