#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "gtomo/core.hpp"
#include "gtomo/masks.hpp"

namespace gtomo {

/// An ordered set of N binary n x n illumination patterns I_j (I_j = M_j, no
/// propagation). Stored one byte per pixel, pattern-major, pixel order as in
/// Image (x2 * n + x1).
class PatternSet {
public:
    PatternSet() = default;
    PatternSet(int n, int count);

    /// i.i.d. Bernoulli(mean) pixels; a fresh mask per pattern.
    static PatternSet random(int n, int count, std::uint64_t seed, double mean = 0.5);
    /// One pattern per shift of the ensemble's base mask.
    static PatternSet from_ensemble(const ShiftEnsemble& ensemble);
    /// Kronecker deltas, one per pixel, in pixel order.
    static PatternSet delta_basis(int n);
    /// All 2^(n^2) binary patterns (n^2 <= 20). Pairwise pixel statistics of
    /// this set are exactly those of fair coin flips.
    static PatternSet exhaustive(int n);

    int n() const { return n_; }
    int count() const { return count_; }
    std::size_t pixels() const { return static_cast<std::size_t>(n_) * n_; }

    std::span<const std::uint8_t> pattern(int j) const {
        return {bits_.data() + static_cast<std::size_t>(j) * pixels(), pixels()};
    }
    std::span<std::uint8_t> pattern(int j) {
        return {bits_.data() + static_cast<std::size_t>(j) * pixels(), pixels()};
    }
    Image image(int j) const;

    /// out[j] = <I_j, img>.
    void measure(std::span<const float> img, std::span<float> out) const;
    /// out[x] = sum_j w[j] I_j(x) (out is overwritten).
    void accumulate(std::span<const float> weights, std::span<float> out) const;

    /// Per-pixel variance across patterns, averaged over pixels.
    double variance() const;
    /// Per-pixel mean across patterns.
    Image mean_pattern() const;

    /// Shift of each pattern when built from an ensemble (empty otherwise).
    const std::vector<Shift>& shifts() const { return shifts_; }
    /// Generation record: kind, seed, mean or base mask parameters.
    const nlohmann::json& provenance() const { return provenance_; }
    void set_provenance(nlohmann::json p) { provenance_ = std::move(p); }

private:
    int n_ = 0;
    int count_ = 0;
    std::vector<std::uint8_t> bits_;
    std::vector<Shift> shifts_;
    nlohmann::json provenance_ = nlohmann::json::object();
};

}  // namespace gtomo
