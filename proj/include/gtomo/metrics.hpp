#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gtomo/core.hpp"

namespace gtomo {

/// Expected bucket for the default phantom under mean-0.5 patterns:
/// 0.5 * 3 * (4/3) pi 6^3.
inline constexpr double kDefaultBucketNormalizer = 1357.1680263507906;

/// Mean |e - t| after scaling both by 1 / max(t). All-zero (or non-positive)
/// truth raises NormalizationError.
double mad(std::span<const float> estimate, std::span<const float> truth);
inline double mad(const Image& e, const Image& t) {
    if (e.n() != t.n()) throw ShapeError("mad: image sizes differ");
    return mad(e.span(), t.span());
}

/// sqrt(mean (e - m)^2) / normalizer.
double bucket_rmse(std::span<const float> estimated, std::span<const float> measured, double normalizer);

/// Bucket RMSE with the per-angle mean residual removed before squaring.
/// Correlation updates only see mean-subtracted residuals, so this is the
/// part of the misfit they can reduce.
double centered_bucket_rmse(const std::vector<std::vector<float>>& estimated,
                            const std::vector<std::vector<float>>& measured, double normalizer);
/// Plain RMSE over the concatenation of all angles.
double bucket_rmse(const std::vector<std::vector<float>>& estimated,
                   const std::vector<std::vector<float>>& measured, double normalizer);

struct MetricReport {
    double mad = 0;
    double rmse_buckets = 0;
    double rmse_buckets_centered = 0;
    double max_value_used_for_normalization = 0;
    std::vector<double> residual_curve;

    nlohmann::json to_json() const;
};

inline constexpr int kMetricSchemaVersion = 1;

void write_metrics_json(const std::filesystem::path& path, const MetricReport& report,
                        const nlohmann::json& extra = nlohmann::json::object());
/// Two columns: iteration, value.
void write_curve_csv(const std::filesystem::path& path, const std::vector<double>& curve,
                     const std::string& column = "residual");

}  // namespace gtomo
