#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "gtomo/masks.hpp"
#include "gtomo/patterns.hpp"

using namespace gtomo;

namespace {

// Off-diagonal spread of the Gram matrix of mean-subtracted patterns.
double gram_offdiag_spread(const PatternSet& set) {
    const int count = set.count();
    const std::size_t px = set.pixels();
    std::vector<std::vector<double>> centred(static_cast<std::size_t>(count), std::vector<double>(px));
    for (int j = 0; j < count; ++j) {
        const auto p = set.pattern(j);
        double mean = 0;
        for (auto v : p) mean += v;
        mean /= static_cast<double>(px);
        for (std::size_t i = 0; i < px; ++i) centred[static_cast<std::size_t>(j)][i] = p[i] - mean;
    }
    double lo = 1e300, hi = -1e300;
    for (int a = 0; a < count; ++a)
        for (int b = a + 1; b < count; ++b) {
            double s = 0;
            for (std::size_t i = 0; i < px; ++i) s += centred[static_cast<std::size_t>(a)][i] * centred[static_cast<std::size_t>(b)][i];
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    return hi - lo;
}

}  // namespace

TEST_CASE("random mask with mean 1 is all ones") {
    const auto m = random_mask(16, 3, 1.0);
    CHECK(m.ones() == 256);
}

TEST_CASE("random mask mean outside (0, 1] is rejected") {
    CHECK_THROWS_AS(random_mask(8, 0, 0.0), ParameterError);
    CHECK_THROWS_AS(random_mask(8, 0, 1.5), ParameterError);
    CHECK_THROWS_AS(random_mask(8, 0, -0.2), ParameterError);
}

TEST_CASE("random 64 x 64 masks have sample mean in [0.45, 0.55]") {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const double m = random_mask(64, seed).mean();
        REQUIRE(m >= 0.45);
        REQUIRE(m <= 0.55);
    }
}

TEST_CASE("random masks are deterministic per seed") {
    CHECK(random_mask(32, 7).data == random_mask(32, 7).data);
    CHECK(random_mask(32, 7).data != random_mask(32, 8).data);
    CHECK(random_mask(32, 7, 0.3).data == random_mask(32, 7, 0.3).data);
}

TEST_CASE("quadratic character mod 59") {
    CHECK(quadratic_character(1, 59) == 1);
    CHECK(quadratic_character(2, 59) == -1);
    CHECK(quadratic_character(59, 59) == 0);
    // Brute force against the set of squares.
    std::set<long> squares;
    for (long x = 1; x < 59; ++x) squares.insert(x * x % 59);
    for (long a = 1; a < 59; ++a) REQUIRE(quadratic_character(a, 59) == (squares.count(a) ? 1 : -1));
}

TEST_CASE("MURA for p = 5 matches hand enumeration with residues {1, 4}") {
    // rows are y2 = 0..4, columns y1 = 0..4
    const std::vector<std::uint8_t> expected = {
        0, 1, 1, 1, 1,
        0, 1, 0, 0, 1,
        0, 0, 1, 1, 0,
        0, 0, 1, 1, 0,
        0, 1, 0, 0, 1,
    };
    const auto m = mura_mask(5);
    CHECK(m.data == expected);
    CHECK(m.kind == MaskKind::mura);
}

TEST_CASE("MURA(59) autocorrelation: peak near 3481/2, flat off-peak") {
    const auto m = mura_mask(59);
    CHECK(m.data.size() == 3481u);
    const auto rep = autocorrelate(m);
    CHECK(std::abs(rep.raw_peak - 3481.0 / 2) <= 59);
    CHECK(rep.offpeak_range <= 1);
    CHECK(rep.offpeak_range == rep.offpeak_max - rep.offpeak_min);
}

TEST_CASE("coded masks need a prime side") {
    CHECK_THROWS_AS(mura_mask(58), ParameterError);
    CHECK_THROWS_AS(frt_mask(58), ParameterError);
    CHECK_THROWS_AS(frt_mask(1), ParameterError);
}

TEST_CASE("FRT(59) autocorrelation: peak near 3481/2, flat off-peak") {
    const auto m = frt_mask(59);
    const auto rep = autocorrelate(m);
    CHECK(rep.offpeak_range <= 1);
    CHECK(std::abs(rep.raw_peak - 3481.0 / 2) <= 59);
}

TEST_CASE("FRT masks are perfect for several primes") {
    for (int p : {3, 5, 7, 11, 13, 31, 59, 61}) {
        CAPTURE(p);
        CHECK(autocorrelate(frt_mask(p)).offpeak_range <= 1);
    }
}

TEST_CASE("coded masks carry a constant number of ones per construction") {
    // Raw peak = ones; both constructions land on (p^2 - 1) / 2.
    for (int p : {5, 11, 59}) {
        CAPTURE(p);
        CHECK(mura_mask(p).ones() == (p * p - 1) / 2);
        CHECK(frt_mask(p).ones() == (p * p - 1) / 2);
    }
}

TEST_CASE("autocorrelation is invariant under cyclic shifts") {
    for (const auto& m : {frt_mask(59), mura_mask(31), random_mask(20, 4)}) {
        const auto a = cyclic_autocorrelation(m);
        const auto b = cyclic_autocorrelation(cyclic_shift(m, 7, 13));
        CHECK(a == b);
        const auto ra = autocorrelate(m), rb = autocorrelate(cyclic_shift(m, 3, 1));
        CHECK(ra.raw_peak == rb.raw_peak);
        CHECK(ra.offpeak_range == rb.offpeak_range);
    }
}

TEST_CASE("cyclic shift convention") {
    const auto m = random_mask(7, 1);
    const auto s = cyclic_shift(m, 2, 5);
    for (int y2 = 0; y2 < 7; ++y2)
        for (int y1 = 0; y1 < 7; ++y1) REQUIRE(s.at(y1, y2) == m.at((y1 - 2 + 7) % 7, (y2 - 5 + 7) % 7));
}

TEST_CASE("all-ones mask autocorrelates to n^2 at every lag") {
    const auto m = random_mask(9, 0, 1.0);
    const auto ac = cyclic_autocorrelation(m);
    CHECK(std::all_of(ac.begin(), ac.end(), [](long v) { return v == 81; }));
}

TEST_CASE("random(59) off-peak range is about 100") {
    int wide = 0;
    const int seeds = 40;
    for (int s = 0; s < seeds; ++s) wide += autocorrelate(random_mask(59, static_cast<std::uint64_t>(s))).offpeak_range >= 50;
    CHECK(wide >= 0.95 * seeds);
}

TEST_CASE("shift ensembles") {
    const auto base = mura_mask(59);
    SUBCASE("sequential is row-major") {
        const auto e = shift_ensemble(base, 3, ShiftSelection::sequential);
        CHECK(e.shifts == std::vector<Shift>{{0, 0}, {0, 1}, {0, 2}});
    }
    SUBCASE("a full ensemble visits every shift once") {
        for (auto sel : {ShiftSelection::sequential, ShiftSelection::random}) {
            const auto e = shift_ensemble(base, 3481, sel, 5);
            std::set<std::pair<int, int>> seen;
            for (const auto& s : e.shifts) {
                REQUIRE(s.dy1 >= 0);
                REQUIRE(s.dy1 < 59);
                REQUIRE(s.dy2 >= 0);
                REQUIRE(s.dy2 < 59);
                seen.insert({s.dy1, s.dy2});
            }
            CHECK(seen.size() == 3481u);
        }
    }
    SUBCASE("random selection depends on the seed") {
        const auto a = shift_ensemble(base, 10, ShiftSelection::random, 1);
        const auto b = shift_ensemble(base, 10, ShiftSelection::random, 2);
        const auto c = shift_ensemble(base, 10, ShiftSelection::random, 1);
        CHECK(a.shifts != b.shifts);
        CHECK(a.shifts == c.shifts);
    }
    SUBCASE("more than n^2 shifts is a capacity error citing the sizing rule") {
        try {
            shift_ensemble(base, 3482, ShiftSelection::random);
            FAIL("expected CapacityError");
        } catch (const CapacityError& e) {
            CHECK(std::string(e.what()).find("(MN)_max + N^2") != std::string::npos);
        }
    }
}

TEST_CASE("mean-subtracted Gram matrix: coded masks are flat, random ones are not") {
    const int p = 11;
    const auto coded = PatternSet::from_ensemble(shift_ensemble(mura_mask(p), p * p, ShiftSelection::sequential));
    const auto frt = PatternSet::from_ensemble(shift_ensemble(frt_mask(p), p * p, ShiftSelection::sequential));
    const auto rnd = PatternSet::from_ensemble(shift_ensemble(random_mask(p, 3), p * p, ShiftSelection::sequential));
    const double sc = gram_offdiag_spread(coded), sf = gram_offdiag_spread(frt), sr = gram_offdiag_spread(rnd);
    CHECK(sc <= 1.0 + 1e-9);
    CHECK(sf <= 1.0 + 1e-9);
    CHECK(sc < sr);
    CHECK(sf < sr);
}

TEST_CASE("finite Radon transform round trip") {
    const int p = 7;
    std::vector<long> f(p * p);
    for (int i = 0; i < p * p; ++i) f[static_cast<std::size_t>(i)] = (i * 37 + 5) % 11;
    const auto r = frt_forward(f, p);
    CHECK(r.size() == static_cast<std::size_t>((p + 1) * p));
    CHECK(frt_inverse(r, p) == f);
}

TEST_CASE("mask PGM round trip") {
    const auto path = std::filesystem::temp_directory_path() / "gtomo_test_mask.pgm";
    const auto m = frt_mask(13);
    write_mask(m, path);
    const auto back = read_mask(path);
    CHECK(back.n == 13);
    CHECK(back.data == m.data);
    CHECK(back.kind == MaskKind::frt);
    CHECK(back.seed_or_prime == 13);
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".json");
}

TEST_CASE("mask kind names") {
    CHECK(mask_kind_from_string("mura") == MaskKind::mura);
    CHECK(to_string(MaskKind::frt) == "frt");
    CHECK_THROWS_AS(mask_kind_from_string("ura"), ParameterError);
}
