#pragma once

#include <complex>
#include <vector>

namespace gtomo::fft {

using cplx = std::complex<double>;

/// Reusable real-to-complex transform of fixed length. Not thread-safe per
/// instance; plan creation is serialized internally.
class RealFft1d {
public:
    explicit RealFft1d(int length);
    ~RealFft1d();
    RealFft1d(const RealFft1d&) = delete;
    RealFft1d& operator=(const RealFft1d&) = delete;

    int length() const { return length_; }
    /// length/2 + 1 coefficients.
    std::vector<cplx> forward(const std::vector<double>& x);
    /// Inverse including the 1/length factor.
    std::vector<double> inverse(const std::vector<cplx>& spectrum);

private:
    int length_;
    double* real_;
    void* spec_;
    void* fwd_;
    void* inv_;
};

/// In-place complex DFT over a row-major array with the given dimensions
/// (slowest first). The inverse is normalized.
void transform(std::vector<cplx>& data, const std::vector<int>& dims, bool inverse);

/// Signed frequency in cycles per sample for index k of an n-point DFT.
inline double frequency(int k, int n) {
    return (k <= n / 2 ? k : k - n) / static_cast<double>(n);
}

}  // namespace gtomo::fft
