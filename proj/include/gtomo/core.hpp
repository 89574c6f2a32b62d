#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gtomo {

// Error hierarchy. Every failure raised by the library derives from Error so
// callers (the CLI in particular) can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class ParameterError : public Error { using Error::Error; };
class CapacityError : public Error { using Error::Error; };
class EmptyDataError : public Error { using Error::Error; };
class NormalizationError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, int iteration)
        : Error(what), iteration_(iteration) {}
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, int iteration)
        : Error(what), iteration_(iteration) {}
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

class DomainError : public Error {
public:
    DomainError(const std::string& what, int angle_index, int x1, int x2)
        : Error(what), angle_index_(angle_index), x1_(x1), x2_(x2) {}
    int angle_index() const { return angle_index_; }
    int x1() const { return x1_; }
    int x2() const { return x2_; }

private:
    int angle_index_, x1_, x2_;
};

/// Square n x n scalar image, row-major with rows indexed by x2 (the
/// rotation-axis direction) and columns by x1.
class Image {
public:
    Image() = default;
    explicit Image(int n, float fill = 0.0f);
    Image(int n, std::vector<float> data);

    int n() const { return n_; }
    std::size_t size() const { return data_.size(); }

    float& at(int x1, int x2) { return data_[static_cast<std::size_t>(x2) * n_ + x1]; }
    float at(int x1, int x2) const { return data_[static_cast<std::size_t>(x2) * n_ + x1]; }

    std::span<float> span() { return data_; }
    std::span<const float> span() const { return data_; }
    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }

    double sum() const;
    float max() const;

private:
    int n_ = 0;
    std::vector<float> data_;
};

/// Cubic n^3 grid of per-voxel linear attenuation. Storage order is r3-major,
/// then r2, then r1 (r1 fastest), which is also the on-disk order.
class Volume {
public:
    Volume() = default;
    explicit Volume(int n, float fill = 0.0f);
    Volume(int n, std::vector<float> data);

    int n() const { return n_; }
    std::size_t size() const { return data_.size(); }

    static std::size_t index(int n, int r1, int r2, int r3) {
        return (static_cast<std::size_t>(r3) * n + r2) * n + r1;
    }
    float& at(int r1, int r2, int r3) { return data_[index(n_, r1, r2, r3)]; }
    float at(int r1, int r2, int r3) const { return data_[index(n_, r1, r2, r3)]; }

    std::span<float> span() { return data_; }
    std::span<const float> span() const { return data_; }
    std::vector<float>& data() { return data_; }
    const std::vector<float>& data() const { return data_; }

    double sum() const;
    float max() const;

    /// The (r1, r2) plane at fixed r3, as an image with x1 = r1, x2 = r2.
    Image slice_r3(int r3) const;
    /// The (r1, r3) plane at fixed r2, as an image with x1 = r1, x2 = r3.
    Image slice_r2(int r2) const;

private:
    int n_ = 0;
    std::vector<float> data_;
};

double dot(std::span<const float> a, std::span<const float> b);
void axpy(float a, std::span<const float> x, std::span<float> y);

}  // namespace gtomo
