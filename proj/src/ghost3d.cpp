#include "gtomo/ghost3d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gtomo {

namespace {

// Increases smaller than this fraction are treated as stalls, not growth;
// priors make the residual wobble around its floor.
constexpr double kGrowthTolerance = 1e-3;

void check_angles(const BucketsByAngle& buckets, const PatternList& patterns, const AngleSet& geometry) {
    if (static_cast<int>(buckets.size()) != geometry.size() || patterns.size() != buckets.size())
        throw ShapeError("need one bucket vector and one pattern set per angle (" +
                         std::to_string(geometry.size()) + " angles, " + std::to_string(buckets.size()) +
                         " bucket groups, " + std::to_string(patterns.size()) + " pattern sets)");
    for (std::size_t a = 0; a < buckets.size(); ++a) {
        if (!patterns[a]) throw ConfigError("missing pattern set for angle " + std::to_string(a));
        if (buckets[a].empty()) throw EmptyDataError("no buckets for angle " + std::to_string(a));
        if (static_cast<int>(buckets[a].size()) != patterns[a]->count())
            throw ShapeError("angle " + std::to_string(a) + ": bucket and pattern counts differ");
    }
}

int side_of(const PatternList& patterns) {
    const int n = patterns.front()->n();
    for (const auto& p : patterns)
        if (p->n() != n) throw ShapeError("pattern sets differ in size");
    return n;
}

void clamp_nonneg(Volume& v) {
    for (float& x : v.data()) x = std::max(x, 0.0f);
}

struct RisingWatch {
    int window;
    int rising = 0;
    double last = INFINITY;
    void update(double v, int k, const char* knob) {
        if (window <= 0) return;
        rising = v > last * (1.0 + kGrowthTolerance) ? rising + 1 : 0;
        last = v;
        if (rising >= window)
            throw DivergenceError("residual grew for " + std::to_string(window) + " consecutive iterations; reduce " +
                                      knob,
                                  k);
    }
};

// With volume priors the data residual is expected to rise from an
// unregularized start and then plateau, so only a runaway counts.
constexpr double kBlowUpFactor = 10.0;

// out = (1/N) sum_j (r_j - mean r) I_j
void correlate(std::span<const float> r, const PatternSet& patterns, std::span<float> out) {
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    const double inv_n = 1.0 / static_cast<double>(r.size());
    std::vector<float> w(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) w[j] = static_cast<float>((r[j] - mean) * inv_n);
    patterns.accumulate(w, out);
}

void fill_rmse(TomogramResult& res, const BucketsByAngle& buckets, const PatternList& patterns,
               const Projector& geom, double normalizer, BucketModel model = BucketModel::attenuation) {
    const auto projs = geom.project(res.volume);
    BucketsByAngle est(buckets.size());
    std::vector<float> t;
    for (std::size_t a = 0; a < buckets.size(); ++a) {
        est[a].resize(buckets[a].size());
        auto img = projs.image(static_cast<int>(a));
        if (model == BucketModel::transmission) {
            t.assign(img.begin(), img.end());
            for (float& v : t) v = std::exp(-v);
            patterns[a]->measure(t, est[a]);
        } else {
            patterns[a]->measure(img, est[a]);
        }
    }
    res.rmse = bucket_rmse(est, buckets, normalizer);
    res.rmse_centered = centered_bucket_rmse(est, buckets, normalizer);
}

}  // namespace

TomogramResult sirt(const Projector& geom, const ProjectionStack& target, const SirtConfig& cfg, const Volume* init) {
    if (cfg.iterations < 0) throw ConfigError("SIRT iterations must be >= 0");
    if (target.n != geom.n() || target.count() != geom.angles().size())
        throw ShapeError("projection stack does not match the reconstruction geometry");
    const int n = geom.n();
    TomogramResult res{init ? *init : Volume(n), "sirt", {cfg.iterations}, 0, 0, {}};
    if (res.volume.n() != n) throw ShapeError("initial volume size does not match geometry");

    // Inverse ray lengths and inverse (normalized) column sums.
    auto rw = geom.project(Volume(n, 1.0f));
    for (float& v : rw.data) v = v > 1e-6f ? 1.0f / v : 0.0f;
    ProjectionStack ones(n, geom.angles());
    std::fill(ones.data.begin(), ones.data.end(), 1.0f);
    auto cw = geom.back_project(ones);
    for (float& v : cw.data()) v = v > 1e-6f ? 1.0f / v : 0.0f;

    RisingWatch watch{cfg.divergence_window};
    const float lambda = static_cast<float>(cfg.relaxation);
    for (int k = 0; k < cfg.iterations; ++k) {
        auto resid = geom.project(res.volume);
        double ss = 0;
        for (std::size_t i = 0; i < resid.data.size(); ++i) {
            const float d = target.data[i] - resid.data[i];
            ss += static_cast<double>(d) * d;
            resid.data[i] = d * rw.data[i];
        }
        const double rms = std::sqrt(ss / static_cast<double>(resid.data.size()));
        res.residual_log.push_back(rms);
        if (!cfg.priors.any()) {
            watch.update(rms, k, "the relaxation");
        } else if (cfg.divergence_window > 0 && rms > kBlowUpFactor * res.residual_log.front()) {
            throw DivergenceError("SIRT residual exceeded " + std::to_string(static_cast<int>(kBlowUpFactor)) +
                                      "x its starting value; reduce the relaxation or the prior strength",
                                  k);
        }
        const auto upd = geom.back_project(resid);
        auto& v = res.volume.data();
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += lambda * cw.data()[i] * upd.data()[i];
        if (cfg.priors.any()) apply_priors(res.volume.span(), {n, n, n}, cfg.priors);
        if (cfg.nonneg) clamp_nonneg(res.volume);
    }
    return res;
}

ProjectionStack ghost_projections(const BucketsByAngle& buckets, const PatternList& patterns,
                                  const AngleSet& geometry, const std::string& method, const SolverConfig& cfg) {
    check_angles(buckets, patterns, geometry);
    const int n = side_of(patterns);
    ProjectionStack stack(n, geometry);
    for (int a = 0; a < geometry.size(); ++a) {
        const auto& set = *patterns[static_cast<std::size_t>(a)];
        auto g = reconstruct_ghost(method, buckets[static_cast<std::size_t>(a)], set, cfg);
        if (method == "xc") {
            const double s2 = set.variance();
            if (!(s2 > 0)) throw NormalizationError("patterns at angle " + std::to_string(a) + " have zero variance");
            for (float& v : g.image.data()) v = static_cast<float>(v / s2);
        }
        stack.set_image(a, g.image);
    }
    return stack;
}

TomogramResult tomography_from_projections(const ProjectionStack& projs, const AngleSet& geometry,
                                           const TwoStepConfig& cfg) {
    if (geometry.size() < 2) throw ConfigError("tomography needs at least 2 angles (degenerate geometry)");
    ProjectionStack stack = projs;
    stack.angles = geometry;
    Projector geom(projs.n, geometry);
    TomogramResult res;
    res.volume = fbp(stack);
    res.method = "fbp";
    if (cfg.tomo == "fbp") return res;
    SirtConfig sc = cfg.sirt;
    if (cfg.tomo == "fbp_then_sirt") {
        sc.priors = {};
    } else if (cfg.tomo == "sirt_cs") {
        if (!sc.priors.any()) sc.priors = PriorConfig::parse("all");
    } else {
        throw ParameterError("unknown tomography method '" + cfg.tomo + "' (expected fbp, fbp_then_sirt, sirt_cs)");
    }
    auto out = sirt(geom, stack, sc, &res.volume);
    out.method = "fbp+" + std::string(cfg.tomo == "sirt_cs" ? "sirt_cs[" + sc.priors.describe() + "]" : "sirt");
    return out;
}

TomogramResult two_step(const BucketsByAngle& buckets, const PatternList& patterns, const AngleSet& geometry,
                        const TwoStepConfig& cfg) {
    if (geometry.size() < 2) throw ConfigError("two-step tomography needs at least 2 angles (degenerate geometry)");
    const auto ghosts = ghost_projections(buckets, patterns, geometry, cfg.gi_method, cfg.gi);
    auto res = tomography_from_projections(ghosts, geometry, cfg);
    const int gi_iters = cfg.gi_method == "xc" ? 0 : cfg.gi.iterations;
    res.iterations.insert(res.iterations.begin(), gi_iters);
    res.method = cfg.gi_method + "+" + res.method;
    fill_rmse(res, buckets, patterns, Projector(side_of(patterns), geometry), cfg.normalizer);
    return res;
}

BucketsByAngle predict_buckets(const Volume& vol, const PatternList& patterns, const Projector& geom) {
    const auto projs = geom.project(vol);
    BucketsByAngle out(patterns.size());
    for (std::size_t a = 0; a < patterns.size(); ++a) {
        out[a].resize(static_cast<std::size_t>(patterns[a]->count()));
        patterns[a]->measure(projs.image(static_cast<int>(a)), out[a]);
    }
    return out;
}

std::vector<Image> direct_residual_weak(const BucketsByAngle& buckets, const PatternList& patterns,
                                        const Projector& geom, const Volume& current) {
    check_angles(buckets, patterns, geom.angles());
    const auto est = predict_buckets(current, patterns, geom);
    std::vector<Image> out;
    for (std::size_t a = 0; a < buckets.size(); ++a) {
        std::vector<float> r(buckets[a].size());
        for (std::size_t j = 0; j < r.size(); ++j) r[j] = buckets[a][j] - est[a][j];
        Image img(geom.n());
        correlate(r, *patterns[a], img.span());
        const double s2 = patterns[a]->variance();
        for (float& v : img.data()) v = static_cast<float>(v / s2);
        out.push_back(std::move(img));
    }
    return out;
}

std::vector<Image> direct_residual_nonweak(const BucketsByAngle& buckets, const PatternList& patterns,
                                           const Projector& geom, const Volume& current) {
    check_angles(buckets, patterns, geom.angles());
    const int n = geom.n();
    const auto projs = geom.project(current);
    std::vector<Image> out;
    std::vector<float> t(static_cast<std::size_t>(n) * n), est;
    Image c_meas(n), c_est(n);
    for (std::size_t a = 0; a < buckets.size(); ++a) {
        const auto& set = *patterns[a];
        auto img = projs.image(static_cast<int>(a));
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::exp(-img[i]);
        est.resize(buckets[a].size());
        set.measure(t, est);
        correlate(buckets[a], set, c_meas.span());
        correlate(est, set, c_est.span());
        Image r(n);
        for (int x2 = 0; x2 < n; ++x2) {
            for (int x1 = 0; x1 < n; ++x1) {
                const float m = c_meas.at(x1, x2), e = c_est.at(x1, x2);
                if (!(m > 0) || !(e > 0))
                    throw DomainError("non-positive correlation at angle " + std::to_string(a) + ", pixel (" +
                                          std::to_string(x1) + ", " + std::to_string(x2) +
                                          "); too few buckets or too strong absorption for the log residual",
                                      static_cast<int>(a), x1, x2);
                r.at(x1, x2) = static_cast<float>(std::log(static_cast<double>(e)) - std::log(static_cast<double>(m)));
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

TomogramResult direct_xc_sirt(const BucketsByAngle& buckets, const PatternList& patterns, const AngleSet& geometry,
                              const DirectConfig& cfg, const Volume* init) {
    check_angles(buckets, patterns, geometry);
    if (cfg.iterations < 1) throw ConfigError("iterations must be >= 1");
    if (cfg.inner_xc_iterations < 1) throw ConfigError("inner XC iterations must be >= 1");
    if (!(cfg.alpha > 0)) throw ConfigError("alpha must be > 0");
    if (cfg.beta < 0) throw ConfigError("beta must be >= 0 (0 selects 1/J)");
    const int n = side_of(patterns);
    const int m = geometry.size();
    Projector geom(n, geometry);
    std::size_t total = 0;
    for (const auto& b : buckets) total += b.size();
    const double beta = cfg.beta > 0 ? cfg.beta : 1.0 / static_cast<double>(total);

    std::vector<double> gamma(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) {
        const double s2 = patterns[static_cast<std::size_t>(a)]->variance();
        if (!(s2 > 0)) throw NormalizationError("patterns at angle " + std::to_string(a) + " have zero variance");
        gamma[static_cast<std::size_t>(a)] = cfg.alpha / s2;
    }

    TomogramResult res{init ? *init : Volume(n), "direct_xc_sirt", {cfg.iterations}, 0, 0, {}};
    if (res.volume.n() != n) throw ShapeError("initial volume size does not match patterns");
    RisingWatch watch{cfg.divergence_window};
    std::vector<float> est, r, inner_est;
    std::vector<float> t(static_cast<std::size_t>(n) * n);
    Image delta(n), step(n);
    for (int k = 0; k < cfg.iterations; ++k) {
        auto stack = geom.project(res.volume);
        double ss = 0;
        std::size_t count = 0;
        std::vector<Image> nonweak;
        if (cfg.model == BucketModel::transmission)
            nonweak = direct_residual_nonweak(buckets, patterns, geom, res.volume);
        for (int a = 0; a < m; ++a) {
            const auto& set = *patterns[static_cast<std::size_t>(a)];
            const auto& b = buckets[static_cast<std::size_t>(a)];
            auto img = stack.image(a);
            est.resize(b.size());
            if (cfg.model == BucketModel::transmission) {
                for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::exp(-img[i]);
                set.measure(t, est);
            } else {
                set.measure(img, est);
            }
            r.resize(b.size());
            double mean = 0;
            for (std::size_t j = 0; j < b.size(); ++j) {
                r[j] = b[j] - est[j];
                mean += r[j];
            }
            mean /= static_cast<double>(b.size());
            for (float v : r) ss += (v - mean) * (v - mean);
            count += b.size();

            const float g = static_cast<float>(gamma[static_cast<std::size_t>(a)]);
            if (cfg.model == BucketModel::transmission) {
                delta = nonweak[static_cast<std::size_t>(a)];
                for (float& v : delta.data()) v *= static_cast<float>(cfg.alpha);
            } else {
                correlate(r, set, step.span());
                std::fill(delta.data().begin(), delta.data().end(), 0.0f);
                axpy(g, step.span(), delta.span());
                for (int i = 1; i < cfg.inner_xc_iterations; ++i) {
                    inner_est.resize(b.size());
                    set.measure(delta.span(), inner_est);
                    for (std::size_t j = 0; j < b.size(); ++j) inner_est[j] = r[j] - inner_est[j];
                    correlate(inner_est, set, step.span());
                    axpy(g, step.span(), delta.span());
                }
            }
            // beta * sum_phi P^T (N_a delta_a) with a normalized back-projector (1/M).
            const float w = static_cast<float>(beta * m * static_cast<double>(b.size()));
            auto dst = stack.image(a);
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = w * delta.data()[i];
        }
        const double rmse = std::sqrt(ss / static_cast<double>(count)) / cfg.normalizer;
        res.residual_log.push_back(rmse);
        watch.update(rmse, k, "beta");
        const auto upd = geom.back_project(stack);
        axpy(1.0f, upd.span(), res.volume.span());
        if (cfg.nonneg) clamp_nonneg(res.volume);
    }
    fill_rmse(res, buckets, patterns, geom, cfg.normalizer, cfg.model);
    return res;
}

}  // namespace gtomo
