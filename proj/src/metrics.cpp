#include "gtomo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "gtomo/io.hpp"

namespace gtomo {

double mad(std::span<const float> estimate, std::span<const float> truth) {
    if (estimate.size() != truth.size())
        throw ShapeError("mad: estimate has " + std::to_string(estimate.size()) + " values, truth " +
                         std::to_string(truth.size()));
    if (truth.empty()) throw EmptyDataError("mad of empty arrays");
    const float tmax = *std::max_element(truth.begin(), truth.end());
    if (!(tmax > 0.0f)) throw NormalizationError("mad: truth has no positive maximum to scale by");
    double s = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) s += std::abs(static_cast<double>(estimate[i]) - truth[i]);
    return s / tmax / static_cast<double>(truth.size());
}

double bucket_rmse(std::span<const float> estimated, std::span<const float> measured, double normalizer) {
    if (estimated.size() != measured.size())
        throw ShapeError("bucket_rmse: " + std::to_string(estimated.size()) + " estimated vs " +
                         std::to_string(measured.size()) + " measured");
    if (!(normalizer > 0)) throw ParameterError("bucket_rmse: normalizer must be positive");
    if (measured.empty()) throw EmptyDataError("bucket_rmse of empty vectors");
    double s = 0;
    for (std::size_t i = 0; i < measured.size(); ++i) {
        const double d = static_cast<double>(estimated[i]) - measured[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(measured.size())) / normalizer;
}

namespace {
void check_groups(const std::vector<std::vector<float>>& e, const std::vector<std::vector<float>>& m,
                  double normalizer) {
    if (e.size() != m.size()) throw ShapeError("bucket_rmse: angle counts differ");
    for (std::size_t a = 0; a < e.size(); ++a)
        if (e[a].size() != m[a].size()) throw ShapeError("bucket_rmse: lengths differ at angle " + std::to_string(a));
    if (!(normalizer > 0)) throw ParameterError("bucket_rmse: normalizer must be positive");
}
}  // namespace

double bucket_rmse(const std::vector<std::vector<float>>& estimated,
                   const std::vector<std::vector<float>>& measured, double normalizer) {
    check_groups(estimated, measured, normalizer);
    double s = 0;
    std::size_t count = 0;
    for (std::size_t a = 0; a < measured.size(); ++a) {
        for (std::size_t j = 0; j < measured[a].size(); ++j) {
            const double d = static_cast<double>(estimated[a][j]) - measured[a][j];
            s += d * d;
        }
        count += measured[a].size();
    }
    if (count == 0) throw EmptyDataError("bucket_rmse of empty vectors");
    return std::sqrt(s / static_cast<double>(count)) / normalizer;
}

double centered_bucket_rmse(const std::vector<std::vector<float>>& estimated,
                            const std::vector<std::vector<float>>& measured, double normalizer) {
    check_groups(estimated, measured, normalizer);
    double s = 0;
    std::size_t count = 0;
    for (std::size_t a = 0; a < measured.size(); ++a) {
        const std::size_t len = measured[a].size();
        if (len == 0) continue;
        double mean = 0;
        for (std::size_t j = 0; j < len; ++j) mean += static_cast<double>(estimated[a][j]) - measured[a][j];
        mean /= static_cast<double>(len);
        for (std::size_t j = 0; j < len; ++j) {
            const double d = static_cast<double>(estimated[a][j]) - measured[a][j] - mean;
            s += d * d;
        }
        count += len;
    }
    if (count == 0) throw EmptyDataError("bucket_rmse of empty vectors");
    return std::sqrt(s / static_cast<double>(count)) / normalizer;
}

nlohmann::json MetricReport::to_json() const {
    return {{"schema_version", kMetricSchemaVersion},
            {"mad", mad},
            {"rmse_buckets", rmse_buckets},
            {"rmse_buckets_centered", rmse_buckets_centered},
            {"max_value_used_for_normalization", max_value_used_for_normalization},
            {"residual_curve", residual_curve}};
}

void write_metrics_json(const std::filesystem::path& path, const MetricReport& report,
                        const nlohmann::json& extra) {
    auto j = report.to_json();
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    io::write_json(path, j);
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<double>& curve,
                     const std::string& column) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "iteration," << column << '\n';
    char buf[32];
    for (std::size_t k = 0; k < curve.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.9g", curve[k]);
        out << k + 1 << ',' << buf << '\n';
    }
}

}  // namespace gtomo
