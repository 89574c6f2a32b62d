#include "gtomo/fft.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace gtomo::fft {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

RealFft1d::RealFft1d(int length) : length_(length) {
    if (length < 1) throw std::invalid_argument("fft length must be >= 1");
    real_ = fftw_alloc_real(static_cast<std::size_t>(length));
    auto* spec = fftw_alloc_complex(static_cast<std::size_t>(length / 2 + 1));
    spec_ = spec;
    std::lock_guard lock(planner_mutex());
    fwd_ = fftw_plan_dft_r2c_1d(length, real_, spec, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(length, spec, real_, FFTW_ESTIMATE);
}

RealFft1d::~RealFft1d() {
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
        fftw_destroy_plan(static_cast<fftw_plan>(inv_));
    }
    fftw_free(real_);
    fftw_free(spec_);
}

std::vector<cplx> RealFft1d::forward(const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != length_) throw std::invalid_argument("fft input length mismatch");
    std::copy(x.begin(), x.end(), real_);
    fftw_execute(static_cast<fftw_plan>(fwd_));
    const auto* spec = static_cast<const fftw_complex*>(spec_);
    std::vector<cplx> out(static_cast<std::size_t>(length_ / 2 + 1));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = {spec[k][0], spec[k][1]};
    return out;
}

std::vector<double> RealFft1d::inverse(const std::vector<cplx>& spectrum) {
    if (static_cast<int>(spectrum.size()) != length_ / 2 + 1)
        throw std::invalid_argument("fft spectrum length mismatch");
    auto* spec = static_cast<fftw_complex*>(spec_);
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        spec[k][0] = spectrum[k].real();
        spec[k][1] = spectrum[k].imag();
    }
    fftw_execute(static_cast<fftw_plan>(inv_));
    std::vector<double> out(real_, real_ + length_);
    for (double& v : out) v /= length_;
    return out;
}

void transform(std::vector<cplx>& data, const std::vector<int>& dims, bool inverse) {
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    if (total != data.size()) throw std::invalid_argument("fft dims do not match data size");
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), ptr, ptr,
                             inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(total);
        for (auto& v : data) v *= scale;
    }
}

}  // namespace gtomo::fft
