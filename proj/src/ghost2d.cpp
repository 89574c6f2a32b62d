#include "gtomo/ghost2d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gtomo/fft.hpp"

namespace gtomo {

PriorConfig PriorConfig::parse(const std::string& list) {
    PriorConfig p;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "image") p.image = true;
        else if (item == "grad" || item == "gradient" || item == "tv") p.gradient = true;
        else if (item == "fourier") p.fourier = true;
        else if (item == "all") p.image = p.gradient = p.fourier = true;
        else if (item == "none" || item.empty()) {}
        else throw ParameterError("unknown prior '" + item + "' (expected image, grad, fourier, all, none)");
    }
    return p;
}

std::string PriorConfig::describe() const {
    std::string s;
    auto add = [&](const char* name) { s += s.empty() ? name : std::string("+") + name; };
    if (image) add("image");
    if (gradient) add("grad");
    if (fourier) add("fourier");
    return s.empty() ? "none" : s;
}

void SolverConfig::validate() const {
    if (!(alpha > 0)) throw ConfigError("alpha must be > 0");
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (priors.fourier && !(priors.kappa > 0 && priors.kappa <= 1))
        throw ConfigError("kappa must lie in (0, 1] (fraction of Nyquist)");
    if (priors.image && !(priors.lambda_rel >= 0)) throw ConfigError("lambda must be >= 0");
    if (priors.gradient && (!(priors.tv_weight >= 0) || priors.tv_steps < 0))
        throw ConfigError("tv weight and step count must be >= 0");
    if (init != "zero" && init != "xc") throw ConfigError("init must be 'zero' or 'xc'");
    if (divergence_window < 0) throw ConfigError("divergence window must be >= 0");
}

namespace {

// Increases smaller than this fraction are treated as stalls, not growth;
// priors make the residual wobble around its floor.
constexpr double kGrowthTolerance = 1e-3;

void check_inputs(std::span<const float> buckets, const PatternSet& patterns) {
    if (buckets.empty()) throw EmptyDataError("no bucket values for this angle");
    if (static_cast<int>(buckets.size()) != patterns.count())
        throw ShapeError(std::to_string(buckets.size()) + " buckets but " + std::to_string(patterns.count()) +
                         " patterns");
}

// out = (1/N) sum_j (r_j - mean r) I_j
void correlate(std::span<const float> r, const PatternSet& patterns, std::span<float> out) {
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    const double inv_n = 1.0 / static_cast<double>(r.size());
    std::vector<float> w(r.size());
    for (std::size_t j = 0; j < r.size(); ++j) w[j] = static_cast<float>((r[j] - mean) * inv_n);
    patterns.accumulate(w, out);
}

struct DivergenceWatch {
    int window;
    int rising = 0;
    double last = INFINITY;

    void update(double rms, int iteration, const char* knob) {
        if (window <= 0) return;
        rising = rms > last * (1.0 + kGrowthTolerance) ? rising + 1 : 0;
        last = rms;
        if (rising >= window)
            throw DivergenceError("residual grew for " + std::to_string(window) +
                                  " consecutive iterations; reduce " + knob,
                                  iteration);
    }
};

GhostImage iterate(std::span<const float> buckets, const PatternSet& patterns, const SolverConfig& cfg,
                   const Image* init, bool with_priors, const char* method) {
    check_inputs(buckets, patterns);
    cfg.validate();
    const int n = patterns.n();
    const double sigma2 = patterns.variance();
    if (!(sigma2 > 0)) throw NormalizationError("patterns have zero variance; correlation step is undefined");
    const float gamma = static_cast<float>(cfg.alpha / sigma2);

    GhostImage out{Image(n), method, cfg.iterations, {}};
    if (init) {
        if (init->n() != n) throw ShapeError("initial image size does not match patterns");
        out.image = *init;
    } else if (cfg.init == "xc") {
        out.image = xc(buckets, patterns).image;
        for (float& v : out.image.data()) v = static_cast<float>(v / sigma2);
    }
    std::vector<float> residual;
    std::vector<float> update(patterns.pixels());
    DivergenceWatch watch{cfg.divergence_window};
    const std::vector<int> dims{n, n};
    for (int k = 0; k < cfg.iterations; ++k) {
        const double rms = bucket_residual(buckets, patterns, out.image, residual);
        out.residual_log.push_back(rms);
        watch.update(rms, k, "alpha");
        correlate(residual, patterns, update);
        axpy(gamma, update, out.image.span());
        if (with_priors) apply_priors(out.image.span(), dims, cfg.priors);
    }
    return out;
}

}  // namespace

double bucket_residual(std::span<const float> buckets, const PatternSet& patterns, const Image& estimate,
                       std::vector<float>& residual) {
    residual.resize(buckets.size());
    patterns.measure(estimate.span(), residual);
    double mean = 0;
    for (std::size_t j = 0; j < residual.size(); ++j) {
        residual[j] = buckets[j] - residual[j];
        mean += residual[j];
    }
    mean /= static_cast<double>(residual.size());
    double ss = 0;
    for (float v : residual) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(residual.size()));
}

GhostImage xc(std::span<const float> buckets, const PatternSet& patterns) {
    check_inputs(buckets, patterns);
    GhostImage out{Image(patterns.n()), "xc", 0, {}};
    correlate(buckets, patterns, out.image.span());
    return out;
}

GhostImage ixc(std::span<const float> buckets, const PatternSet& patterns, const SolverConfig& cfg,
               const Image* init) {
    return iterate(buckets, patterns, cfg, init, false, "ixc");
}

GhostImage cs_ixc(std::span<const float> buckets, const PatternSet& patterns, const SolverConfig& cfg,
                  const Image* init) {
    if (!cfg.priors.any()) throw ConfigError("cs_ixc needs at least one prior enabled");
    auto out = iterate(buckets, patterns, cfg, init, true, "cs");
    out.method = "cs[" + cfg.priors.describe() + "]";
    return out;
}

GhostImage cg_xc(std::span<const float> buckets, const PatternSet& patterns, int iterations) {
    check_inputs(buckets, patterns);
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    const std::size_t npx = patterns.pixels();
    const float inv_n = 1.0f / static_cast<float>(patterns.count());
    std::vector<float> tmp(static_cast<std::size_t>(patterns.count()));
    // normal operator (1/N) I^T I
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        std::vector<float> xf(x.begin(), x.end()), yf(npx);
        patterns.measure(xf, tmp);
        for (float& v : tmp) v *= inv_n;
        patterns.accumulate(tmp, yf);
        y.assign(yf.begin(), yf.end());
    };
    auto dotd = [](const std::vector<double>& a, const std::vector<double>& b) {
        return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    };

    GhostImage out{Image(patterns.n()), "cg", 0, {}};
    std::vector<double> x(npx, 0.0), r(npx), ar(npx), p, ap;
    {
        std::vector<float> w(buckets.begin(), buckets.end()), bf(npx);
        for (float& v : w) v *= inv_n;
        patterns.accumulate(w, bf);
        r.assign(bf.begin(), bf.end());
    }
    const double b_norm = std::sqrt(dotd(r, r));
    if (b_norm == 0.0) return out;
    apply(r, ar);
    p = r;
    ap = ar;
    double rar = dotd(r, ar);
    for (int k = 0; k < iterations; ++k) {
        const double r_norm = std::sqrt(dotd(r, r));
        out.residual_log.push_back(r_norm);
        out.iterations = k + 1;
        if (r_norm <= 1e-12 * b_norm) break;
        const double apap = dotd(ap, ap);
        if (!(apap > 0) || !(rar > 0))
            throw SolverError("conjugate residual breakdown (zero curvature direction)", k);
        const double step = rar / apap;
        for (std::size_t i = 0; i < npx; ++i) {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        apply(r, ar);
        const double rar_new = dotd(r, ar);
        const double beta = rar_new / rar;
        rar = rar_new;
        for (std::size_t i = 0; i < npx; ++i) {
            p[i] = r[i] + beta * p[i];
            ap[i] = ar[i] + beta * ap[i];
        }
    }
    std::copy(x.begin(), x.end(), out.image.data().begin());
    return out;
}

GhostImage reconstruct_ghost(const std::string& method, std::span<const float> buckets,
                             const PatternSet& patterns, const SolverConfig& cfg) {
    if (method == "xc") return xc(buckets, patterns);
    if (method == "ixc") return ixc(buckets, patterns, cfg);
    if (method == "cg") return cg_xc(buckets, patterns, cfg.iterations);
    if (method == "cs") return cs_ixc(buckets, patterns, cfg);
    throw ParameterError("unknown ghost-imaging method '" + method + "' (expected xc, ixc, cg or cs)");
}

void soft_threshold(std::span<float> v, float lambda) {
    for (float& x : v) {
        const float a = std::abs(x) - lambda;
        x = a > 0 ? std::copysign(a, x) : 0.0f;
    }
}

void tv_step(std::span<float> v, const std::vector<int>& dims, double weight, double eps, int steps) {
    if (dims.size() != 2 && dims.size() != 3) throw ShapeError("tv_step supports 2D and 3D arrays");
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    if (total != v.size()) throw ShapeError("tv_step: dims do not match data");
    const int nd = static_cast<int>(dims.size());
    std::vector<std::size_t> stride(static_cast<std::size_t>(nd), 1);
    for (int a = nd - 2; a >= 0; --a) stride[a] = stride[a + 1] * static_cast<std::size_t>(dims[a + 1]);

    std::vector<std::vector<float>> g(static_cast<std::size_t>(nd), std::vector<float>(total));
    std::vector<int> coord(static_cast<std::size_t>(nd));
    const float eps2 = static_cast<float>(eps * eps);
    for (int s = 0; s < steps; ++s) {
        // Forward differences (zero on the far face), normalized.
        for (std::size_t i = 0; i < total; ++i) {
            std::size_t rem = i;
            for (int a = 0; a < nd; ++a) {
                coord[a] = static_cast<int>(rem / stride[a]);
                rem %= stride[a];
            }
            float m2 = eps2;
            for (int a = 0; a < nd; ++a) {
                const float d = coord[a] + 1 < dims[a] ? v[i + stride[a]] - v[i] : 0.0f;
                g[a][i] = d;
                m2 += d * d;
            }
            const float inv = 1.0f / std::sqrt(m2);
            for (int a = 0; a < nd; ++a) g[a][i] *= inv;
        }
        // v += w div(g), div the negative adjoint of the forward difference.
        for (std::size_t i = 0; i < total; ++i) {
            std::size_t rem = i;
            float div = 0;
            for (int a = 0; a < nd; ++a) {
                const int c = static_cast<int>(rem / stride[a]);
                rem %= stride[a];
                div += g[a][i] - (c > 0 ? g[a][i - stride[a]] : 0.0f);
            }
            v[i] += static_cast<float>(weight) * div;
        }
    }
}

void fourier_cutoff(std::span<float> v, const std::vector<int>& dims, double kappa) {
    if (!(kappa > 0)) throw ParameterError("kappa must be > 0");
    if (kappa >= 1.0) return;
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    if (total != v.size()) throw ShapeError("fourier_cutoff: dims do not match data");
    std::vector<fft::cplx> f(v.begin(), v.end());
    fft::transform(f, dims, false);
    const double limit = kappa * 0.5;
    const int nd = static_cast<int>(dims.size());
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i, span = total;
        double kmax = 0;
        for (int a = 0; a < nd; ++a) {
            span /= static_cast<std::size_t>(dims[a]);
            const int c = static_cast<int>(rem / span);
            rem %= span;
            kmax = std::max(kmax, std::abs(fft::frequency(c, dims[a])));
        }
        if (kmax > limit) f[i] = 0;
    }
    fft::transform(f, dims, true);
    for (std::size_t i = 0; i < total; ++i) v[i] = static_cast<float>(f[i].real());
}

void apply_priors(std::span<float> v, const std::vector<int>& dims, const PriorConfig& priors) {
    if (priors.image) {
        const float mx = *std::max_element(v.begin(), v.end());
        soft_threshold(v, static_cast<float>(priors.lambda_rel * std::max(mx, 0.0f)));
        if (priors.image_nonneg)
            for (float& x : v) x = std::max(x, 0.0f);
    }
    if (priors.gradient) tv_step(v, dims, priors.tv_weight, priors.tv_eps, priors.tv_steps);
    if (priors.fourier) fourier_cutoff(v, dims, priors.kappa);
}

}  // namespace gtomo
