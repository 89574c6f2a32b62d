// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "gtomo/experiments.hpp"
#include "gtomo/ghost2d.hpp"
#include "gtomo/ghost3d.hpp"
#include "gtomo/masks.hpp"
#include "gtomo/metrics.hpp"
#include "gtomo/rng.hpp"
#include "gtomo/volume.hpp"

using namespace gtomo;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string list(const std::vector<double>& v, const char* f = "%.4f") {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(f, v[i]);
    return s + "]";
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

const Volume& phantom() {
    static const Volume v = build_phantom({});
    return v;
}

const Image& projection0() {
    static const Image p = project(phantom(), 0.0, 0.5);
    return p;
}

struct Bench {
    PatternSet set;
    std::vector<float> buckets;
};

Bench bench(int count, std::uint64_t seed) {
    Bench b{PatternSet::random(64, count, derive_seed(seed, static_cast<std::uint64_t>(count))), {}};
    b.buckets.resize(static_cast<std::size_t>(count));
    b.set.measure(projection0().span(), b.buckets);
    return b;
}

constexpr int kSeeds = 5;

Outcome criterion1() {
    Outcome o;
    for (auto [count, target, tol] : {std::tuple{1000, 0.118, 0.02}, std::tuple{4000, 0.0899, 0.015}}) {
        std::vector<double> m;
        for (int s = 0; s < kSeeds; ++s) {
            const auto b = bench(count, static_cast<std::uint64_t>(s));
            m.push_back(mad(xc(b.buckets, b.set).image, projection0()));
            o.require(within(m.back(), target, tol), "XC J=" + std::to_string(count) + " seed " + std::to_string(s));
        }
        o.note("XC J=" + std::to_string(count) + " MAD " + list(m));
    }
    return o;
}

Outcome criterion2() {
    Outcome o;
    for (auto [count, alpha, target, tol] : {std::tuple{1000, 0.025, 0.101, 0.02}, std::tuple{4000, 0.25, 0.0682, 0.015}}) {
        std::vector<double> m;
        for (int s = 0; s < kSeeds; ++s) {
            const auto b = bench(count, static_cast<std::uint64_t>(s));
            SolverConfig cfg;
            cfg.alpha = alpha;
            cfg.iterations = 10;
            m.push_back(mad(ixc(b.buckets, b.set, cfg).image, projection0()));
            const double m_xc = mad(xc(b.buckets, b.set).image, projection0());
            o.require(within(m.back(), target, tol), "IXC J=" + std::to_string(count) + " seed " + std::to_string(s));
            o.require(m.back() < m_xc, "IXC < XC at J=" + std::to_string(count) + " seed " + std::to_string(s));
        }
        o.note("IXC J=" + std::to_string(count) + " MAD " + list(m));
    }
    return o;
}

Outcome criterion3() {
    Outcome o;
    std::vector<double> none, image, grad, fourier;
    for (int s = 0; s < kSeeds; ++s) {
        const auto b = bench(1000, static_cast<std::uint64_t>(s));
        SolverConfig cfg;
        cfg.alpha = 0.01;
        cfg.iterations = 1000;
        none.push_back(mad(ixc(b.buckets, b.set, cfg).image, projection0()));
        cfg.priors = PriorConfig::parse("image");
        image.push_back(mad(cs_ixc(b.buckets, b.set, cfg).image, projection0()));
        cfg.priors = PriorConfig::parse("grad");
        grad.push_back(mad(cs_ixc(b.buckets, b.set, cfg).image, projection0()));
        cfg.priors = PriorConfig::parse("fourier");
        fourier.push_back(mad(cs_ixc(b.buckets, b.set, cfg).image, projection0()));
        const auto tag = " seed " + std::to_string(s);
        o.require(grad.back() < image.back(), "grad < image" + tag);
        o.require(grad.back() < fourier.back(), "grad < fourier" + tag);
        o.require(fourier.back() < none.back(), "fourier < none" + tag);
        o.require(image.back() < none.back(), "image < none" + tag);
    }
    auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
    o.require(within(mean(grad), 0.0183, 0.5 * 0.0183), "gradient target");
    o.require(within(mean(image), 0.0302, 0.5 * 0.0302), "image target");
    o.require(within(mean(fourier), 0.0343, 0.5 * 0.0343), "Fourier target");
    o.require(within(mean(none), 0.102, 0.5 * 0.102), "no-prior target");
    o.note("grad " + list(grad) + " image " + list(image) + " fourier " + list(fourier) + " none " + list(none));
    return o;
}

Outcome criterion4() {
    Outcome o;
    std::vector<double> direct, two;
    for (int s = 0; s < kSeeds; ++s) {
        PatternSource src;
        src.per_angle = 1000;
        src.seed = static_cast<std::uint64_t>(s);
        const auto sim_angles = AngleSet::uniform(90, 0.5);
        const auto d = simulate(phantom(), sim_angles, src);
        const auto geometry = sim_angles.with_offset(0.0);
        DirectConfig dc;
        dc.iterations = 10;
        dc.nonneg = false;
        direct.push_back(direct_xc_sirt(d.buckets, d.campaign.patterns, geometry, dc).rmse_centered);
        TwoStepConfig tc;
        tc.gi_method = "ixc";
        tc.gi.alpha = 0.025;
        tc.gi.iterations = 10;
        tc.gi.init = "xc";
        tc.tomo = "fbp_then_sirt";
        tc.sirt.iterations = 10;
        tc.sirt.nonneg = false;
        two.push_back(two_step(d.buckets, d.campaign.patterns, geometry, tc).rmse_centered);
        const auto tag = " seed " + std::to_string(s);
        o.require(within(direct.back(), 8.44e-3, 1.5e-3), "direct RMSE band" + tag);
        o.require(direct.back() < two.back(), "direct < two-step" + tag);
        o.require(within(two.back(), 12.6e-3, 2e-3), "two-step RMSE band" + tag);
    }
    o.note("direct " + list(direct, "%.5f") + " two-step " + list(two, "%.5f"));
    return o;
}

Outcome criterion5() {
    Outcome o;
    const auto spec = default_spec("dose_fractionation");
    int wins = 0;
    for (int s = 0; s < kSeeds; ++s) {
        const auto rows = run_dose_fractionation(spec, static_cast<std::uint64_t>(s));
        std::size_t best = 0;
        std::vector<double> m;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            m.push_back(rows[i].slice_mad);
            if (rows[i].slice_mad < rows[best].slice_mad) best = i;
        }
        wins += rows[best].m == 30 && rows[best].n == 1000;
        o.note("seed " + std::to_string(s) + " (90,333)/(30,1000)/(10,3000)/(7,4000) " + list(m));
    }
    o.require(wins >= 4, "(30,1000) best in " + std::to_string(wins) + "/5 seeds");
    return o;
}

Outcome criterion6() {
    Outcome o;
    for (const auto& m : {mura_mask(59), frt_mask(59)}) {
        const auto r = autocorrelate(m);
        const auto name = to_string(m.kind);
        o.require(std::abs(r.raw_peak - 1740.5) <= 59, name + " peak");
        o.require(r.offpeak_range <= 1, name + " off-peak range");
        o.note(name + " peak " + fmt("%.0f", r.raw_peak) + " range " + fmt("%.0f", r.offpeak_range));
    }
    const int seeds = 100;
    int wide = 0;
    double lo = 1e9, hi = 0;
    for (int s = 0; s < seeds; ++s) {
        const double range = autocorrelate(random_mask(59, static_cast<std::uint64_t>(s))).offpeak_range;
        wide += range >= 50;
        lo = std::min(lo, range);
        hi = std::max(hi, range);
    }
    o.require(wide >= 0.95 * seeds, "random range >= 50 in 95% of seeds");
    o.note("random range >= 50 in " + std::to_string(wide) + "/100 seeds, min " + fmt("%.0f", lo) + " max " + fmt("%.0f", hi));
    return o;
}

Outcome criterion7() {
    Outcome o;
    const auto spec = default_spec("ring_artifact");
    for (std::uint64_t s = 0; s < 3; ++s) {
        double same = 0, diff = 0;
        for (const auto& r : run_ring_artifact_study(spec, s)) {
            if (r.chain != "fbp") continue;
            (r.policy == "same" ? same : diff) = r.ring;
        }
        o.require(same >= 2 * diff, "ring factor >= 2 at seed " + std::to_string(s));
        o.note("seed " + std::to_string(s) + " same " + fmt("%.3g", same) + " different " + fmt("%.3g", diff) +
               " factor " + fmt("%.1f", same / diff));
    }
    return o;
}

double rel(std::span<const float> a, std::span<const float> b) {
    double d = 0, s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += (static_cast<double>(a[i]) - b[i]) * (static_cast<double>(a[i]) - b[i]);
        s += static_cast<double>(b[i]) * b[i];
    }
    return std::sqrt(d / s);
}

Outcome criterion8() {
    Outcome o;
    Rng rng(42);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    auto fill = [&](std::span<float> v) {
        for (float& x : v) x = u(rng);
    };

    {  // adjointness
        const auto angles = AngleSet::uniform(7, 0.5);
        Projector geom(16, angles);
        Volume v(16);
        fill(v.span());
        ProjectionStack p(16, angles);
        fill(p.data);
        const double lhs = dot(geom.project(v).data, p.data);
        const double rhs = dot(v.span(), geom.back_project(p).span()) * angles.size();
        const double e = std::abs(lhs - rhs) / std::abs(lhs);
        o.require(e < 1e-4, "adjointness");
        o.note("adjoint " + fmt("%.1e", e));
    }
    {  // mass conservation
        double worst = 0;
        for (double phi : {0.0, 0.5, 1.3, 2.2, 3.0})
            worst = std::max(worst, std::abs(project(phantom(), phi, 0.5).sum() - phantom().sum()) / phantom().sum());
        o.require(worst < 0.005, "mass conservation");
        o.note("mass " + fmt("%.1e", worst));
    }
    {  // XC delta basis
        const auto set = PatternSet::delta_basis(8);
        Image a(8);
        fill(a.span());
        std::vector<float> b(64);
        set.measure(a.span(), b);
        const auto g = xc(b, set).image;
        const double mean = a.sum() / 64;
        double worst = 0;
        for (std::size_t i = 0; i < 64; ++i) worst = std::max(worst, std::abs(g.data()[i] - (a.data()[i] - mean) / 64));
        o.require(worst < 1e-6, "XC delta-basis identity");
    }
    {  // fixed points
        const auto b = bench(300, 9);
        SolverConfig cfg;
        const auto g = ixc(b.buckets, b.set, cfg, &projection0());
        o.require(rel(g.image.span(), projection0().span()) < 1e-5, "IXC fixed point");
        PatternSource src;
        src.per_angle = 100;
        const auto d = simulate(phantom(), AngleSet::uniform(8, 0.5), src);
        DirectConfig dc;
        dc.iterations = 3;
        const auto r = direct_xc_sirt(d.buckets, d.campaign.patterns, d.sim_angles, dc, &phantom());
        o.require(rel(r.volume.span(), phantom().span()) < 1e-5, "direct XC-SIRT fixed point");
    }
    {  // weak vs full absorption
        auto a = project(phantom(), 0.7, 0.5);
        for (float& v : a.data()) v *= 1e-3f;
        const auto set = PatternSet::random(64, 20, 5);
        double worst = 0;
        for (int j = 0; j < 20; ++j) {
            const auto p = set.image(j);
            const double total = p.sum();
            worst = std::max(worst, std::abs(bucket_transmission(p, a) - (total - bucket_attenuation(p, a))) / total);
        }
        o.require(worst < 1e-5, "weak vs full absorption");
        o.note("weak/full " + fmt("%.1e", worst));
    }
    {  // exhaustive shifts = cyclic cross-correlation
        const int n = 8;
        const auto mask = random_mask(n, 3);
        const auto set = PatternSet::from_ensemble(shift_ensemble(mask, n * n, ShiftSelection::sequential));
        Image a(n);
        fill(a.span());
        std::vector<float> b(static_cast<std::size_t>(n * n));
        set.measure(a.span(), b);
        double worst = 0;
        for (int s = 0; s < n * n; ++s) {
            const auto sh = set.shifts()[static_cast<std::size_t>(s)];
            double brute = 0;
            for (int x2 = 0; x2 < n; ++x2)
                for (int x1 = 0; x1 < n; ++x1)
                    brute += mask.at((x1 - sh.dy1 + n) % n, (x2 - sh.dy2 + n) % n) * static_cast<double>(a.at(x1, x2));
            worst = std::max(worst, std::abs(b[static_cast<std::size_t>(s)] - brute) / brute);
        }
        o.require(worst < 1e-6, "shift buckets = cyclic cross-correlation");
    }
    {  // CG exact on the 8 x 8 delta system
        const auto set = PatternSet::delta_basis(8);
        Image a(8);
        fill(a.span());
        std::vector<float> b(64);
        set.measure(a.span(), b);
        const auto g = cg_xc(b, set, 64);
        o.require(rel(g.image.span(), a.span()) < 1e-5, "CG exact solve");
    }
    return o;
}

Outcome criterion9() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto vol = build_phantom({});
    const auto angles = AngleSet::uniform(90, 0.5);
    auto stack = Projector(64, angles).project(vol);
    const auto nominal = angles.with_offset(0.0);
    stack.angles = nominal;
    const auto rec_fbp = fbp(stack);
    const auto rec_sirt = sirt(Projector(64, nominal), stack, SirtConfig{}).volume;
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const auto truth = vol.slice_r3(18);
    for (auto [name, rec] : {std::pair{"FBP", &rec_fbp}, std::pair{"SIRT32", &rec_sirt}}) {
        const auto s = rec->slice_r3(18);
        double in = 0, bg = 0;
        int ni = 0, nb = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (truth.data()[i] > 0) {
                in += s.data()[i];
                ++ni;
            } else {
                bg += static_cast<double>(s.data()[i]) * s.data()[i];
                ++nb;
            }
        }
        in /= ni;
        bg = std::sqrt(bg / nb);
        o.require(in > 3 * bg, std::string(name) + " disc contrast");
        o.note(std::string(name) + " disc mean " + fmt("%.3f", in) + " background RMS " + fmt("%.4f", bg) +
               " slice MAD " + fmt("%.4f", mad(s, truth)));
    }
    o.require(secs < 120, "runtime");
    o.note("pipeline " + fmt("%.1f", secs) + " s");
    return o;
}

}  // namespace

int main() {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"XC 2D recovery", criterion1},
        {"IXC improvement", criterion2},
        {"CS prior ordering", criterion3},
        {"direct XC-SIRT bucket RMSE", criterion4},
        {"dose fractionation", criterion5},
        {"mask autocorrelation", criterion6},
        {"ring artifacts", criterion7},
        {"oracle/structural suite", criterion8},
        {"FBP/SIRT benchmarks", criterion9},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("CRITERION %zu %s: %s (%.0f s) %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, secs,
                    o.detail.c_str());
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
