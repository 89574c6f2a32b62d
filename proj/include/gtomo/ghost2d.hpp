#pragma once

#include <span>
#include <string>
#include <vector>

#include "gtomo/core.hpp"
#include "gtomo/patterns.hpp"

namespace gtomo {

/// Sparsity priors applied between correlation updates, in the order
/// image -> gradient -> Fourier. Defaults were tuned on the three-sphere
/// phantom at J = 1000, alpha = 0.01, 1000 iterations.
struct PriorConfig {
    bool image = false;
    double lambda_rel = 1.5e-3; // soft threshold as a fraction of the current max
    bool image_nonneg = true;  // clamp negatives after thresholding

    bool gradient = false;
    double tv_weight = 3e-2;   // step along -grad TV
    int tv_steps = 1;
    double tv_eps = 1e-3;      // smoothing in |grad u|

    bool fourier = false;
    double kappa = 0.35;       // cut-off as a fraction of Nyquist (1 = no cut)

    bool any() const { return image || gradient || fourier; }
    /// Parses a comma list drawn from {image, grad, fourier, all, none}.
    static PriorConfig parse(const std::string& list);
    std::string describe() const;
};

struct SolverConfig {
    double alpha = 0.25;
    int iterations = 10;
    PriorConfig priors;
    /// zero: start from 0. xc: start from the XC image divided by sigma^2.
    std::string init = "zero";
    /// Residual RMS increasing this many iterations in a row aborts with
    /// DivergenceError; 0 disables the check.
    int divergence_window = 5;

    void validate() const;
};

struct GhostImage {
    Image image;
    std::string method;
    int iterations = 0;
    /// Per iteration: centred bucket-residual RMS before the update (IXC/CS),
    /// or the normal-equation residual norm (CG).
    std::vector<double> residual_log;
};

/// (1/N) sum_j (B_j - mean B) I_j.
GhostImage xc(std::span<const float> buckets, const PatternSet& patterns);

/// Landweber iteration T <- T + (alpha / sigma^2) C[B - C*(T)].
GhostImage ixc(std::span<const float> buckets, const PatternSet& patterns, const SolverConfig& cfg,
               const Image* init = nullptr);

/// Conjugate residuals on I^T I x = I^T B (residual norm is monotone).
/// Breakdown raises SolverError with the iteration.
GhostImage cg_xc(std::span<const float> buckets, const PatternSet& patterns, int iterations);

/// IXC with the configured priors after every update. Needs >= 1 prior.
GhostImage cs_ixc(std::span<const float> buckets, const PatternSet& patterns, const SolverConfig& cfg,
                  const Image* init = nullptr);

/// Dispatch by name: xc, ixc, cg, cs.
GhostImage reconstruct_ghost(const std::string& method, std::span<const float> buckets,
                             const PatternSet& patterns, const SolverConfig& cfg);

/// Centred bucket residual r = (B - C*(T)) - mean, and its RMS.
double bucket_residual(std::span<const float> buckets, const PatternSet& patterns, const Image& estimate,
                       std::vector<float>& residual);

// Prior operators, exposed for testing and for the 3D solver.
void soft_threshold(std::span<float> v, float lambda);
/// `steps` explicit steps of size `weight` down the smoothed isotropic TV
/// gradient. dims are (slowest first) 2 or 3 extents of a row-major array.
void tv_step(std::span<float> v, const std::vector<int>& dims, double weight, double eps, int steps = 1);
/// Zeroes every DFT coefficient whose largest per-axis |frequency| exceeds
/// kappa * 0.5 cycles/sample. Idempotent; kappa = 1 is the identity.
void fourier_cutoff(std::span<float> v, const std::vector<int>& dims, double kappa);
void apply_priors(std::span<float> v, const std::vector<int>& dims, const PriorConfig& priors);

}  // namespace gtomo
