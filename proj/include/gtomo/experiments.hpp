#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gtomo/ghost3d.hpp"
#include "gtomo/masks.hpp"
#include "gtomo/metrics.hpp"
#include "gtomo/volume.hpp"

namespace gtomo {

/// Reconstruction chain used by the tomographic studies.
struct ChainConfig {
    std::string method = "direct";  // direct | two_step
    // direct XC-SIRT
    DirectConfig direct;
    // two-step
    TwoStepConfig two_step;

    nlohmann::json to_json() const;
    static ChainConfig from_json(const nlohmann::json& j);
};

/// Declarative description of one study. Everything a run depends on is in
/// here, so the digest of to_json() names the output directory.
struct ExperimentSpec {
    std::string name = "experiment";
    // dose_fractionation | ring_artifact | mask_comparison | ghost2d_methods | tomography_comparison
    std::string kind = "dose_fractionation";
    SpherePhantomSpec phantom;
    int angles = 90;
    int per_angle = 1000;
    long budget = 0;                         // J; each split spends 90% to 100% of it
    std::vector<std::pair<int, int>> splits; // (M, N)
    MaskKind mask_kind = MaskKind::random;
    std::uint64_t mask_param = 0;            // prime, or seed of a random base mask
    std::vector<MaskKind> mask_kinds{MaskKind::random, MaskKind::mura, MaskKind::frt};
    std::vector<int> bucket_counts{3481, 2610, 1740, 870};
    std::vector<std::string> policies{"same", "different"};
    std::string policy = "different";
    std::vector<std::uint64_t> seeds{0};
    double axis_offset = 0.5;       // simulation
    double recon_axis_offset = 0.0; // reconstruction (nominal geometry)
    int slice_r3 = 18;
    ChainConfig chain;

    nlohmann::json to_json() const;
    static ExperimentSpec from_json(const nlohmann::json& j);
    std::string digest() const;
    void validate() const;
};

/// Default specs mirroring the studies in the accompanying write-up.
ExperimentSpec default_spec(const std::string& kind);

// Simulation helpers shared by the studies.
struct SimulatedData {
    Volume truth;
    AngleSet sim_angles;
    Campaign campaign;
    BucketsByAngle buckets;
};
SimulatedData simulate(const Volume& truth, const AngleSet& sim_angles, const PatternSource& source);

/// Energy of the azimuthally averaged residual (recon - truth) in the plane
/// r2 = slice, using 1-pixel radial bins about `center` (in r1/r3 pixels) and
/// only pixels inside the inscribed circle. Rings survive azimuthal averaging;
/// streaks and noise mostly cancel.
double ring_metric(const Volume& recon, const Volume& truth, int slice_r2, double center);

TomogramResult run_chain(const ChainConfig& chain, const BucketsByAngle& buckets, const PatternList& patterns,
                         const AngleSet& geometry);

struct DoseRow {
    int m = 0, n = 0;
    std::uint64_t seed = 0;
    double slice_mad = 0;
    double volume_mad = 0;
    MetricReport report;
    Volume volume;
};
std::vector<DoseRow> run_dose_fractionation(const ExperimentSpec& spec, std::uint64_t seed);

struct RingRow {
    std::string policy;
    std::string chain;
    double ring = 0;
    double slice_mad = 0;
    Volume volume;
};
/// Two reconstructions per chain that differ only in the shift policy.
/// Chains: the spec's chain, plus FBP when the spec's chain is not FBP.
std::vector<RingRow> run_ring_artifact_study(const ExperimentSpec& spec, std::uint64_t seed);

struct MaskRow {
    MaskKind kind = MaskKind::random;
    int count = 0;
    double mad = 0;  // of the sigma^2-normalized XC image
    AutocorrReport autocorr;
    Image image;
};
std::vector<MaskRow> run_mask_comparison(const ExperimentSpec& spec, std::uint64_t seed);

struct MethodRow {
    std::string method;
    int buckets = 0;
    double mad = 0;
    Image image;
};
std::vector<MethodRow> run_ghost2d_methods(const ExperimentSpec& spec, std::uint64_t seed);

struct ChainRow {
    std::string chain;
    int n = 0;
    TomogramResult result;
    double slice_mad = 0;
};
std::vector<ChainRow> run_tomography_comparison(const ExperimentSpec& spec, std::uint64_t seed);

/// Runs the spec for every seed and writes PNG slices, CSV tables, JSON
/// reports and summary.md into <out_root>/<name>-<digest>/. Returns that path.
std::filesystem::path run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_root);

}  // namespace gtomo
