#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gtomo/buckets.hpp"
#include "gtomo/ghost2d.hpp"
#include "gtomo/metrics.hpp"
#include "gtomo/projector.hpp"

namespace gtomo {

using PatternList = std::vector<std::shared_ptr<const PatternSet>>;
using BucketsByAngle = std::vector<std::vector<float>>;

struct TomogramResult {
    Volume volume;
    std::string method;
    std::vector<int> iterations;       // per stage of the chain
    double rmse = 0;                   // bucket RMSE of the final volume
    double rmse_centered = 0;          // same with per-angle mean removed
    std::vector<double> residual_log;  // one entry per (final-stage) iteration
};

struct SirtConfig {
    int iterations = 32;
    double relaxation = 1.5;
    bool nonneg = true;
    PriorConfig priors;  // volume-domain priors after each update (3D)
    /// Without priors: abort after this many consecutive residual increases.
    /// With priors: abort only if the residual passes 10x its first value.
    int divergence_window = 5;
};

/// Classic SIRT: mu += lambda C P^T R (p - P mu), R and C the inverse row and
/// column sums. residual_log holds the projection-residual RMS.
TomogramResult sirt(const Projector& geometry, const ProjectionStack& target, const SirtConfig& cfg,
                    const Volume* init = nullptr);

struct TwoStepConfig {
    std::string gi_method = "ixc";  // xc | ixc | cg | cs
    SolverConfig gi;
    std::string tomo = "fbp";       // fbp | fbp_then_sirt | sirt_cs
    SirtConfig sirt;
    double normalizer = kDefaultBucketNormalizer;
};

/// Ghost projection per angle, then the tomographic step. XC images are
/// divided by the pattern variance so every method yields attenuation units.
TomogramResult two_step(const BucketsByAngle& buckets, const PatternList& patterns, const AngleSet& geometry,
                        const TwoStepConfig& cfg);

/// The tomographic half of two_step, from any projection stack.
TomogramResult tomography_from_projections(const ProjectionStack& projs, const AngleSet& geometry,
                                           const TwoStepConfig& cfg);

/// Per-angle ghost images only (first half of two_step).
ProjectionStack ghost_projections(const BucketsByAngle& buckets, const PatternList& patterns,
                                  const AngleSet& geometry, const std::string& method, const SolverConfig& cfg);

struct DirectConfig {
    int iterations = 10;
    double alpha = 0.025;         // gamma = alpha / sigma^2 per angle
    double beta = 0;              // 0 selects 1/J
    int inner_xc_iterations = 1;
    bool nonneg = true;
    int divergence_window = 5;
    double normalizer = kDefaultBucketNormalizer;
    BucketModel model = BucketModel::attenuation;
};

/// One-step XC-SIRT:
///   mu += beta sum_phi P_phi^T sum_j (r_j - mean r) gamma I_j,  r = B - C*(P mu)
/// (sums unnormalized, so beta = 1/J averages over all buckets). With
/// inner_xc_iterations > 1 each angle's residual image is refined by that many
/// IXC steps before back-projection. residual_log holds the centred bucket
/// RMSE (normalized) before each update.
TomogramResult direct_xc_sirt(const BucketsByAngle& buckets, const PatternList& patterns,
                              const AngleSet& geometry, const DirectConfig& cfg, const Volume* init = nullptr);

/// Attenuation residual per angle without the weak-absorption expansion:
///   log C C*[exp(-P mu)] - log C B
/// (C the mean-subtracted correlation), which approximates A - P mu.
/// A non-positive correlation raises DomainError with the angle and pixel.
std::vector<Image> direct_residual_nonweak(const BucketsByAngle& transmission_buckets, const PatternList& patterns,
                                           const Projector& geometry, const Volume& current);

/// Weak-absorption counterpart: C[B - C*(P mu)] / sigma^2.
std::vector<Image> direct_residual_weak(const BucketsByAngle& attenuation_buckets, const PatternList& patterns,
                                        const Projector& geometry, const Volume& current);

/// Buckets predicted from a volume (attenuation model).
BucketsByAngle predict_buckets(const Volume& vol, const PatternList& patterns, const Projector& geometry);

}  // namespace gtomo
