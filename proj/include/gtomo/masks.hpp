#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gtomo/core.hpp"

namespace gtomo {

enum class MaskKind { random, mura, frt };

std::string to_string(MaskKind kind);
MaskKind mask_kind_from_string(const std::string& s);

/// Binary n x n aperture, stored row-major as data[y2 * n + y1].
struct Mask {
    int n = 0;
    std::vector<std::uint8_t> data;
    MaskKind kind = MaskKind::random;
    std::uint64_t seed_or_prime = 0;

    std::uint8_t at(int y1, int y2) const { return data[static_cast<std::size_t>(y2) * n + y1]; }
    long ones() const;
    double mean() const;
    Image to_image() const;
};

bool is_prime(long p);
/// Legendre symbol (a / p) by Euler's criterion: +1, -1, or 0 when p | a.
int quadratic_character(long a, long p);

/// i.i.d. Bernoulli(mean) pixels. mean must lie in (0, 1].
Mask random_mask(int n, std::uint64_t seed, double mean = 0.5);

/// Gottesman-Fenimore MURA: A(0, j) = 0; A(i, 0) = 1 for i != 0; otherwise
/// 1 where C(i) C(j) = +1, with C the quadratic character mod p.
Mask mura_mask(int p);

/// Perfect binary array built in finite Radon space. Every projection is set
/// to a constant plus a delta at t = 0, the directions split between the two
/// admissible (constant, delta) pairs by the character of m^2 - d (d the
/// least non-residue). Inverting gives the binary array chi(x^2 - d y^2) = 1,
/// whose off-origin periodic autocorrelation takes two adjacent values.
Mask frt_mask(int p);

/// Finite Radon transform of a p x p array (index [y * p + x]). Row m < p sums
/// the line x = t + m y (mod p); row p sums the line y = t. Result has
/// (p + 1) rows of p bins.
std::vector<long> frt_forward(const std::vector<long>& f, int p);
/// Exact inverse: f(x, y) = (sum_m R_m(t_m(x, y)) - total) / p.
std::vector<long> frt_inverse(const std::vector<long>& r, int p);

/// Periodic translation: out(y1, y2) = m(y1 - dy1, y2 - dy2).
Mask cyclic_shift(const Mask& m, int dy1, int dy2);

struct Shift {
    int dy1 = 0;
    int dy2 = 0;
    bool operator==(const Shift&) const = default;
};

enum class ShiftSelection { sequential, random };

struct ShiftEnsemble {
    Mask base;
    std::vector<Shift> shifts;
    ShiftSelection selection = ShiftSelection::sequential;
    std::uint64_t seed = 0;
};

/// `sequential` is row-major (dy2 fastest); `random` draws distinct shifts
/// without replacement. More than n^2 shifts raises CapacityError.
ShiftEnsemble shift_ensemble(const Mask& base, int count, ShiftSelection selection,
                             std::uint64_t seed = 0);

struct AutocorrReport {
    double raw_peak = 0;
    double offpeak_min = 0;
    double offpeak_max = 0;
    double offpeak_range = 0;
    double mean = 0;      // mask mean
    double variance = 0;  // mask variance
};

/// Raw (not mean-subtracted) periodic autocorrelation, lag (t1, t2) at
/// [t2 * n + t1]. Computed by FFT and rounded, which is exact for binary input.
std::vector<long> cyclic_autocorrelation(const Mask& m);
AutocorrReport autocorrelate(const Mask& m);

/// Binary P5 PGM (maxval 1) plus `<path>.json` {kind, n, seed_or_prime}.
void write_mask(const Mask& m, const std::filesystem::path& path);
Mask read_mask(const std::filesystem::path& path);

}  // namespace gtomo
