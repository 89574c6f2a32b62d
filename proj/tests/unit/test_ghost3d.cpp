#include <doctest.h>

#include <cmath>

#include <omp.h>

#include "gtomo/experiments.hpp"
#include "gtomo/ghost3d.hpp"
#include "gtomo/volume.hpp"
#include "helpers.hpp"

using namespace gtomo;

namespace {

const Volume& phantom() {
    static const Volume v = build_phantom({});
    return v;
}

SimulatedData sim(int angles, int per_angle, std::uint64_t seed, const std::string& policy = "different") {
    PatternSource src;
    src.per_angle = per_angle;
    src.seed = seed;
    src.policy = policy;
    return simulate(phantom(), AngleSet::uniform(angles, 0.5), src);
}

// Mean inside the spheres versus RMS of the rest of the r3 = 18 slice.
std::pair<double, double> disc_contrast(const Volume& rec) {
    const auto r = rec.slice_r3(18), t = phantom().slice_r3(18);
    double in = 0, out = 0;
    int ni = 0, no = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (t.data()[i] > 0) {
            in += r.data()[i];
            ++ni;
        } else {
            out += static_cast<double>(r.data()[i]) * r.data()[i];
            ++no;
        }
    }
    return {in / ni, std::sqrt(out / no)};
}

}  // namespace

TEST_CASE("exact projections through the two-step tomography match FBP bitwise") {
    const auto angles = AngleSet::uniform(30, 0.0);
    const auto stack = Projector(64, angles).project(phantom());
    TwoStepConfig cfg;
    cfg.tomo = "fbp";
    const auto res = tomography_from_projections(stack, angles, cfg);
    CHECK(res.volume.data() == fbp(stack).data());
}

TEST_CASE("two-step tomography needs two angles") {
    const auto d = sim(1, 10, 0);
    CHECK_THROWS_AS(two_step(d.buckets, d.campaign.patterns, d.sim_angles, {}), ConfigError);
}

TEST_CASE("XC + FBP at M = 90, N = 1000 shows the three discs") {
    const auto d = sim(90, 1000, 0);
    TwoStepConfig cfg;
    cfg.gi_method = "xc";
    const auto res = two_step(d.buckets, d.campaign.patterns, d.sim_angles.with_offset(0.0), cfg);
    const auto [in, bg] = disc_contrast(res.volume);
    CHECK(in > 3 * bg);
}

TEST_CASE("two-step CS tomography: N = 1000 and N = 4000 are close") {
    TwoStepConfig cfg;
    cfg.gi_method = "xc";
    cfg.tomo = "sirt_cs";
    cfg.sirt.iterations = 100;
    cfg.sirt.priors = PriorConfig::parse("all");
    double mads[2];
    int i = 0;
    for (int n : {1000, 4000}) {
        const auto d = sim(90, n, 0);
        const auto res = two_step(d.buckets, d.campaign.patterns, d.sim_angles.with_offset(0.0), cfg);
        mads[i++] = mad(res.volume.slice_r3(18), phantom().slice_r3(18));
    }
    CHECK(std::abs(mads[0] - mads[1]) / std::min(mads[0], mads[1]) < 0.25);
}

TEST_CASE("direct XC-SIRT from the true volume is a fixed point") {
    const auto d = sim(12, 200, 1);
    DirectConfig cfg;
    cfg.iterations = 3;
    const auto res = direct_xc_sirt(d.buckets, d.campaign.patterns, d.sim_angles, cfg, &phantom());
    CHECK(testing::relative_difference(res.volume.span(), phantom().span()) < 1e-5);
    CHECK(res.rmse < 1e-5);
}

TEST_CASE("direct XC-SIRT bucket RMSE at M = 90, N = 1000") {
    const auto d = sim(90, 1000, 0);
    DirectConfig cfg;
    cfg.nonneg = false;
    const auto res = direct_xc_sirt(d.buckets, d.campaign.patterns, d.sim_angles.with_offset(0.0), cfg);
    CHECK(res.residual_log.size() == 10u);
    CHECK(std::abs(res.rmse_centered - 8.44e-3) <= 1.5e-3);
}

TEST_CASE("one direct update is the back-projection of the weak residual images") {
    const auto d = sim(9, 150, 2);
    const auto geometry = d.sim_angles.with_offset(0.0);
    DirectConfig cfg;
    cfg.iterations = 1;
    cfg.nonneg = false;
    const auto res = direct_xc_sirt(d.buckets, d.campaign.patterns, geometry, cfg);
    Projector geom(64, geometry);
    const auto weak = direct_residual_weak(d.buckets, d.campaign.patterns, geom, Volume(64));
    ProjectionStack stack(64, geometry);
    const double beta = 1.0 / (9 * 150);
    for (int a = 0; a < 9; ++a) {
        Image img = weak[static_cast<std::size_t>(a)];
        for (float& v : img.data()) v = static_cast<float>(v * beta * 9 * 150 * cfg.alpha);
        stack.set_image(a, img);
    }
    const auto expect = geom.back_project(stack);
    CHECK(testing::relative_difference(res.volume.span(), expect.span()) < 1e-6);
}

TEST_CASE("direct XC-SIRT is schedule independent") {
    const auto d = sim(10, 100, 3);
    DirectConfig cfg;
    cfg.iterations = 3;
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto a = direct_xc_sirt(d.buckets, d.campaign.patterns, d.sim_angles, cfg);
    omp_set_num_threads(4);
    const auto b = direct_xc_sirt(d.buckets, d.campaign.patterns, d.sim_angles, cfg);
    omp_set_num_threads(saved);
    CHECK(testing::relative_difference(a.volume.span(), b.volume.span()) < 1e-5);
}

TEST_CASE("a runaway beta is reported as divergence") {
    const auto d = sim(6, 100, 4);
    DirectConfig cfg;
    cfg.iterations = 30;
    cfg.beta = 5.0;
    cfg.nonneg = false;
    CHECK_THROWS_AS(direct_xc_sirt(d.buckets, d.campaign.patterns, d.sim_angles, cfg), DivergenceError);
}

TEST_CASE("two-step 10 IXC + 10 SIRT is worse than direct at N = 1000") {
    const auto d = sim(90, 1000, 0);
    const auto geometry = d.sim_angles.with_offset(0.0);
    DirectConfig dc;
    dc.nonneg = false;
    const auto direct = direct_xc_sirt(d.buckets, d.campaign.patterns, geometry, dc);
    TwoStepConfig tc;
    tc.gi_method = "ixc";
    tc.gi.alpha = 0.025;
    tc.gi.init = "xc";
    tc.tomo = "fbp_then_sirt";
    tc.sirt.iterations = 10;
    tc.sirt.nonneg = false;
    const auto two = two_step(d.buckets, d.campaign.patterns, geometry, tc);
    CHECK(direct.rmse_centered < two.rmse_centered);
}

TEST_CASE("non-weak residual with exhaustive patterns") {
    // All 2^9 patterns on a 3 x 3 detector: correlations are exact.
    const int n = 3;
    auto patterns = std::make_shared<PatternSet>(PatternSet::exhaustive(n));
    Volume truth(n);
    truth.at(1, 1, 1) = 0.8f;
    truth.at(0, 2, 1) = 0.4f;
    truth.at(2, 0, 2) = 0.3f;
    const auto angles = AngleSet::uniform(4, 0.0);
    Projector geom(n, angles);
    const auto projs = geom.project(truth);
    PatternList list(4, patterns);
    BucketsByAngle tb(4), ab(4);
    for (int a = 0; a < 4; ++a) {
        std::vector<float> t(9);
        const auto img = projs.image(a);
        for (int i = 0; i < 9; ++i) t[static_cast<std::size_t>(i)] = std::exp(-img[static_cast<std::size_t>(i)]);
        tb[static_cast<std::size_t>(a)].resize(512);
        ab[static_cast<std::size_t>(a)].resize(512);
        patterns->measure(t, tb[static_cast<std::size_t>(a)]);
        patterns->measure(img, ab[static_cast<std::size_t>(a)]);
    }
    SUBCASE("zero at the truth") {
        for (const auto& r : direct_residual_nonweak(tb, list, geom, truth))
            for (float v : r.data()) REQUIRE(std::abs(v) < 1e-5);
    }
    SUBCASE("positive where the object projects when starting from zero") {
        const auto r = direct_residual_nonweak(tb, list, geom, Volume(n));
        for (int a = 0; a < 4; ++a) {
            const auto img = projs.image(a);
            for (int i = 0; i < 9; ++i) {
                if (img[static_cast<std::size_t>(i)] > 1e-6f) REQUIRE(r[static_cast<std::size_t>(a)].data()[static_cast<std::size_t>(i)] > 0);
                REQUIRE(r[static_cast<std::size_t>(a)].data()[static_cast<std::size_t>(i)] ==
                        doctest::Approx(img[static_cast<std::size_t>(i)]).epsilon(1e-4));
            }
        }
    }
    SUBCASE("agrees with the weak residual in the weak limit") {
        Volume weak_truth = truth;
        for (float& v : weak_truth.data()) v *= 1e-3f;
        const auto wp = geom.project(weak_truth);
        BucketsByAngle wt(4), wa(4);
        for (int a = 0; a < 4; ++a) {
            std::vector<float> t(9);
            const auto img = wp.image(a);
            for (int i = 0; i < 9; ++i) t[static_cast<std::size_t>(i)] = std::exp(-img[static_cast<std::size_t>(i)]);
            wt[static_cast<std::size_t>(a)].resize(512);
            wa[static_cast<std::size_t>(a)].resize(512);
            patterns->measure(t, wt[static_cast<std::size_t>(a)]);
            patterns->measure(img, wa[static_cast<std::size_t>(a)]);
        }
        const auto nw = direct_residual_nonweak(wt, list, geom, Volume(n));
        const auto w = direct_residual_weak(wa, list, geom, Volume(n));
        for (int a = 0; a < 4; ++a) {
            const auto& wd = w[static_cast<std::size_t>(a)].data();
            CHECK(testing::relative_difference(nw[static_cast<std::size_t>(a)].span(), wd) < 0.01);
        }
    }
    SUBCASE("constant buckets give a non-positive correlation") {
        BucketsByAngle flat(4, std::vector<float>(512, 1.0f));
        try {
            direct_residual_nonweak(flat, list, geom, Volume(n));
            FAIL("expected DomainError");
        } catch (const DomainError& e) {
            CHECK(e.angle_index() == 0);
            CHECK(e.x1() == 0);
            CHECK(e.x2() == 0);
        }
    }
}

TEST_CASE("32 SIRT iterations from true projections come within 20% of FBP") {
    const auto angles = AngleSet::uniform(90, 0.5);
    auto stack = Projector(64, angles).project(phantom());
    const auto nominal = angles.with_offset(0.0);
    stack.angles = nominal;
    const double m_fbp = mad(fbp(stack).slice_r3(18), phantom().slice_r3(18));
    SirtConfig cfg;
    const auto res = sirt(Projector(64, nominal), stack, cfg);
    const double m_sirt = mad(res.volume.slice_r3(18), phantom().slice_r3(18));
    CHECK(m_sirt <= 1.2 * m_fbp);
    const auto [in, bg] = disc_contrast(res.volume);
    CHECK(in > 3 * bg);
}
