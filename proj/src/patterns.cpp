#include "gtomo/patterns.hpp"

#include <algorithm>

#include <omp.h>

#include "gtomo/rng.hpp"

namespace gtomo {

namespace {

constexpr int kLanes = 16;

float dot_u8(const std::uint8_t* p, const float* a, std::size_t len) {
    float acc[kLanes] = {};
    std::size_t i = 0;
    for (; i + kLanes <= len; i += kLanes)
        for (int l = 0; l < kLanes; ++l) acc[l] += static_cast<float>(p[i + l]) * a[i + l];
    double total = 0;
    for (; i < len; ++i) total += static_cast<double>(p[i]) * a[i];
    for (float v : acc) total += v;
    return static_cast<float>(total);
}

void axpy_u8(float w, const std::uint8_t* p, float* out, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) out[i] += w * static_cast<float>(p[i]);
}

}  // namespace

PatternSet::PatternSet(int n, int count) : n_(n), count_(count) {
    if (n < 1) throw ParameterError("pattern side must be >= 1");
    if (count < 0) throw ParameterError("pattern count must be >= 0");
    bits_.assign(static_cast<std::size_t>(count) * pixels(), 0);
}

PatternSet PatternSet::random(int n, int count, std::uint64_t seed, double mean) {
    if (!(mean > 0.0 && mean <= 1.0)) throw ParameterError("pattern mean must be in (0, 1]");
    PatternSet set(n, count);
    Rng rng(seed);
    if (mean == 0.5) {
        // Fair coins: one engine draw yields 64 pixels.
        for (std::size_t i = 0; i < set.bits_.size(); i += 64) {
            std::uint64_t word = rng();
            const std::size_t end = std::min(set.bits_.size(), i + 64);
            for (std::size_t k = i; k < end; ++k, word >>= 1) set.bits_[k] = word & 1u;
        }
    } else {
        std::bernoulli_distribution coin(mean);
        for (auto& v : set.bits_) v = coin(rng) ? 1 : 0;
    }
    set.provenance_ = {{"kind", "random"}, {"seed", seed}, {"mean", mean}, {"n", n}, {"count", count}};
    return set;
}

PatternSet PatternSet::from_ensemble(const ShiftEnsemble& ens) {
    const int n = ens.base.n;
    PatternSet set(n, static_cast<int>(ens.shifts.size()));
    for (int j = 0; j < set.count_; ++j) {
        const auto& s = ens.shifts[static_cast<std::size_t>(j)];
        auto dst = set.pattern(j);
        for (int y2 = 0; y2 < n; ++y2) {
            const int src2 = ((y2 - s.dy2) % n + n) % n;
            for (int y1 = 0; y1 < n; ++y1) {
                const int src1 = ((y1 - s.dy1) % n + n) % n;
                dst[static_cast<std::size_t>(y2) * n + y1] = ens.base.at(src1, src2);
            }
        }
    }
    set.shifts_ = ens.shifts;
    set.provenance_ = {{"kind", "shifted"},
                       {"mask_kind", to_string(ens.base.kind)},
                       {"mask_param", ens.base.seed_or_prime},
                       {"selection", ens.selection == ShiftSelection::random ? "random" : "sequential"},
                       {"seed", ens.seed},
                       {"n", n},
                       {"count", set.count_}};
    return set;
}

PatternSet PatternSet::delta_basis(int n) {
    PatternSet set(n, n * n);
    for (int j = 0; j < set.count_; ++j) set.pattern(j)[static_cast<std::size_t>(j)] = 1;
    set.provenance_ = {{"kind", "delta"}, {"n", n}};
    return set;
}

PatternSet PatternSet::exhaustive(int n) {
    const int bits = n * n;
    if (bits > 20) throw CapacityError("exhaustive pattern set limited to n^2 <= 20 pixels");
    PatternSet set(n, 1 << bits);
    for (int j = 0; j < set.count_; ++j) {
        auto p = set.pattern(j);
        for (int b = 0; b < bits; ++b) p[static_cast<std::size_t>(b)] = (j >> b) & 1;
    }
    set.provenance_ = {{"kind", "exhaustive"}, {"n", n}};
    return set;
}

Image PatternSet::image(int j) const {
    Image img(n_);
    const auto p = pattern(j);
    std::transform(p.begin(), p.end(), img.data().begin(), [](std::uint8_t v) { return float(v); });
    return img;
}

void PatternSet::measure(std::span<const float> img, std::span<float> out) const {
    if (img.size() != pixels()) throw ShapeError("pattern/image size mismatch");
    if (out.size() != static_cast<std::size_t>(count_)) throw ShapeError("bucket vector length mismatch");
    const std::size_t len = pixels();
#pragma omp parallel for schedule(static)
    for (int j = 0; j < count_; ++j)
        out[static_cast<std::size_t>(j)] = dot_u8(bits_.data() + static_cast<std::size_t>(j) * len, img.data(), len);
}

void PatternSet::accumulate(std::span<const float> weights, std::span<float> out) const {
    if (weights.size() != static_cast<std::size_t>(count_)) throw ShapeError("weight vector length mismatch");
    if (out.size() != pixels()) throw ShapeError("pattern/image size mismatch");
    std::fill(out.begin(), out.end(), 0.0f);
    const std::size_t len = pixels();
#pragma omp parallel
    {
        const int tid = omp_get_thread_num(), nt = omp_get_num_threads();
        const std::size_t lo = len * tid / nt, hi = len * (tid + 1) / nt;
        for (int j = 0; j < count_; ++j) {
            const float w = weights[static_cast<std::size_t>(j)];
            if (w == 0.0f) continue;
            axpy_u8(w, bits_.data() + static_cast<std::size_t>(j) * len + lo, out.data() + lo, hi - lo);
        }
    }
}

Image PatternSet::mean_pattern() const {
    Image m(n_);
    if (count_ == 0) return m;
    std::vector<double> acc(pixels(), 0.0);
    for (int j = 0; j < count_; ++j) {
        const auto p = pattern(j);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
    }
    for (std::size_t i = 0; i < acc.size(); ++i) m.data()[i] = static_cast<float>(acc[i] / count_);
    return m;
}

double PatternSet::variance() const {
    if (count_ == 0) throw EmptyDataError("variance of an empty pattern set");
    std::vector<long> ones(pixels(), 0);
    for (int j = 0; j < count_; ++j) {
        const auto p = pattern(j);
        for (std::size_t i = 0; i < ones.size(); ++i) ones[i] += p[i];
    }
    double total = 0;
    for (long c : ones) {
        const double m = static_cast<double>(c) / count_;
        total += m - m * m;  // binary pixels: E[I^2] = E[I]
    }
    return total / static_cast<double>(ones.size());
}

}  // namespace gtomo
