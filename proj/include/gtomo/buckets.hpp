#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "gtomo/core.hpp"
#include "gtomo/masks.hpp"
#include "gtomo/patterns.hpp"
#include "gtomo/projector.hpp"

namespace gtomo {

enum class BucketModel { attenuation, transmission };

std::string to_string(BucketModel model);
BucketModel bucket_model_from_string(const std::string& s);

/// B^A = <I, A>.
double bucket_attenuation(const Image& pattern, const Image& proj);
/// B = <I, exp(-A)>.
double bucket_transmission(const Image& pattern, const Image& proj);

struct BucketRecord {
    double value = 0;
    int angle_index = 0;
    int ensemble_id = 0;   // which pattern set (aliased sets share an id)
    int pattern_index = 0; // index within that set
    Shift shift;           // (0, 0) for i.i.d. patterns
    BucketModel model = BucketModel::attenuation;
    // Reserved for a detector noise model; always 0 (noise-free simulation).
    double noise = 0;
};

/// How per-angle patterns are generated. Enough to regenerate them exactly.
struct PatternSource {
    std::string type = "random";     // random | shifted
    std::string policy = "different"; // same | different patterns per angle
    int n = 64;
    int per_angle = 1000;
    std::uint64_t seed = 0;
    double mean = 0.5;               // random patterns / random base mask
    MaskKind mask_kind = MaskKind::random;
    std::uint64_t mask_param = 0;    // prime for coded masks, seed for a random base

    nlohmann::json to_json() const;
    static PatternSource from_json(const nlohmann::json& j);
};

struct Campaign {
    AngleSet angles;
    std::vector<std::shared_ptr<const PatternSet>> patterns;  // one per angle, may alias
    BucketModel model = BucketModel::attenuation;
    PatternSource source;

    int per_angle() const;
    void validate(int n) const;
    /// Digest of geometry, source and model.
    std::string digest() const;
};

/// Builds the per-angle pattern sets described by `source`. With policy
/// `same` every angle aliases one set; with `different` angle a uses the
/// stream derive_seed(seed, a).
Campaign make_campaign(const AngleSet& angles, const PatternSource& source,
                       BucketModel model = BucketModel::attenuation);

/// Projects once per angle and evaluates every bucket of that angle. Records
/// come out angle-major, pattern index fastest.
std::vector<BucketRecord> run_campaign(const Volume& vol, const Campaign& campaign);

/// Same measurement from an existing projection stack.
std::vector<BucketRecord> measure_campaign(const ProjectionStack& projs, const Campaign& campaign);

/// Bucket values grouped by angle, in record order.
std::vector<std::vector<float>> values_by_angle(const std::vector<BucketRecord>& records, int angle_count);

struct BucketDataset {
    std::vector<BucketRecord> records;
    nlohmann::json header;
};

/// CSV (j, angle_index, shift_dy1, shift_dy2, value) plus `<path>.json` header
/// {model, seeds, campaign digest, geometry, pattern source}.
void write_buckets(const std::filesystem::path& path, const std::vector<BucketRecord>& records,
                   const Campaign& campaign);
BucketDataset read_buckets(const std::filesystem::path& path);
/// Rebuilds the campaign (patterns included) from a dataset header.
Campaign campaign_from_header(const nlohmann::json& header);

}  // namespace gtomo
