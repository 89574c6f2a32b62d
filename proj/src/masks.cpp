#include "gtomo/masks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "gtomo/fft.hpp"
#include "gtomo/io.hpp"
#include "gtomo/rng.hpp"

namespace gtomo {

std::string to_string(MaskKind kind) {
    switch (kind) {
        case MaskKind::random: return "random";
        case MaskKind::mura: return "mura";
        case MaskKind::frt: return "frt";
    }
    return "?";
}

MaskKind mask_kind_from_string(const std::string& s) {
    if (s == "random") return MaskKind::random;
    if (s == "mura") return MaskKind::mura;
    if (s == "frt") return MaskKind::frt;
    throw ParameterError("unknown mask kind '" + s + "' (expected random, mura or frt)");
}

long Mask::ones() const {
    return std::accumulate(data.begin(), data.end(), 0L);
}

double Mask::mean() const {
    return data.empty() ? 0.0 : static_cast<double>(ones()) / static_cast<double>(data.size());
}

Image Mask::to_image() const {
    Image img(n);
    std::transform(data.begin(), data.end(), img.data().begin(), [](std::uint8_t v) { return float(v); });
    return img;
}

bool is_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

namespace {

long pow_mod(long base, long exp, long mod) {
    long result = 1 % mod;
    base %= mod;
    if (base < 0) base += mod;
    while (exp > 0) {
        if (exp & 1) result = result * base % mod;
        base = base * base % mod;
        exp >>= 1;
    }
    return result;
}

void require_prime(int p, const char* who) {
    if (!is_prime(p)) throw ParameterError(std::string(who) + ": " + std::to_string(p) + " is not prime");
}

long mod(long a, long p) {
    const long r = a % p;
    return r < 0 ? r + p : r;
}

}  // namespace

int quadratic_character(long a, long p) {
    if (!is_prime(p)) throw ParameterError("quadratic character needs a prime modulus");
    a = mod(a, p);
    if (a == 0) return 0;
    if (p == 2) return 1;
    return pow_mod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

Mask random_mask(int n, std::uint64_t seed, double mean) {
    if (n < 1) throw ParameterError("mask side must be >= 1");
    if (!(mean > 0.0 && mean <= 1.0)) throw ParameterError("random mask mean must be in (0, 1]");
    Mask m{n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n), MaskKind::random, seed};
    Rng rng(seed);
    std::bernoulli_distribution coin(mean);
    for (auto& v : m.data) v = coin(rng) ? 1 : 0;
    return m;
}

Mask mura_mask(int p) {
    require_prime(p, "mura_mask");
    std::vector<int> c(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) c[static_cast<std::size_t>(i)] = quadratic_character(i, p);
    Mask m{p, std::vector<std::uint8_t>(static_cast<std::size_t>(p) * p), MaskKind::mura,
           static_cast<std::uint64_t>(p)};
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < p; ++i) {
            std::uint8_t v;
            if (i == 0) v = 0;
            else if (j == 0) v = 1;
            else v = c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)] == 1 ? 1 : 0;
            m.data[static_cast<std::size_t>(j) * p + i] = v;
        }
    }
    return m;
}

std::vector<long> frt_forward(const std::vector<long>& f, int p) {
    if (f.size() != static_cast<std::size_t>(p) * p) throw ShapeError("frt_forward: array is not p x p");
    std::vector<long> r(static_cast<std::size_t>(p + 1) * p, 0);
    for (int y = 0; y < p; ++y) {
        for (int x = 0; x < p; ++x) {
            const long v = f[static_cast<std::size_t>(y) * p + x];
            for (int m = 0; m < p; ++m) r[static_cast<std::size_t>(m) * p + mod(x - long(m) * y, p)] += v;
            r[static_cast<std::size_t>(p) * p + y] += v;
        }
    }
    return r;
}

std::vector<long> frt_inverse(const std::vector<long>& r, int p) {
    if (r.size() != static_cast<std::size_t>(p + 1) * p) throw ShapeError("frt_inverse: expected p + 1 projections");
    const long total = std::accumulate(r.begin(), r.begin() + p, 0L);
    std::vector<long> f(static_cast<std::size_t>(p) * p);
    for (int y = 0; y < p; ++y) {
        for (int x = 0; x < p; ++x) {
            long s = r[static_cast<std::size_t>(p) * p + y];
            for (int m = 0; m < p; ++m) s += r[static_cast<std::size_t>(m) * p + mod(x - long(m) * y, p)];
            s -= total;
            if (s % p != 0) throw ParameterError("frt_inverse: projections are not consistent");
            f[static_cast<std::size_t>(y) * p + x] = s / p;
        }
    }
    return f;
}

Mask frt_mask(int p) {
    require_prime(p, "frt_mask");
    if (p == 2) throw ParameterError("frt_mask needs an odd prime");
    int d = 2;
    while (quadratic_character(d, p) != -1) ++d;

    const long a_flat = (p - 1) / 2, a_peak = p - 1;  // constant, value at t = 0
    const long b_flat = (p + 1) / 2, b_peak = 0;
    std::vector<long> r(static_cast<std::size_t>(p + 1) * p);
    for (int m = 0; m <= p; ++m) {
        const bool type_a = m == p || quadratic_character(long(m) * m - d, p) == 1;
        for (int t = 0; t < p; ++t)
            r[static_cast<std::size_t>(m) * p + t] =
                t == 0 ? (type_a ? a_peak : b_peak) : (type_a ? a_flat : b_flat);
    }
    const auto f = frt_inverse(r, p);
    Mask mask{p, std::vector<std::uint8_t>(f.size()), MaskKind::frt, static_cast<std::uint64_t>(p)};
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] != 0 && f[i] != 1) throw Error("frt_mask: inverse is not binary");
        mask.data[i] = static_cast<std::uint8_t>(f[i]);
    }
    return mask;
}

Mask cyclic_shift(const Mask& m, int dy1, int dy2) {
    Mask out = m;
    const int n = m.n;
    for (int y2 = 0; y2 < n; ++y2)
        for (int y1 = 0; y1 < n; ++y1)
            out.data[static_cast<std::size_t>(y2) * n + y1] =
                m.at(static_cast<int>(mod(y1 - dy1, n)), static_cast<int>(mod(y2 - dy2, n)));
    return out;
}

ShiftEnsemble shift_ensemble(const Mask& base, int count, ShiftSelection selection, std::uint64_t seed) {
    const long capacity = static_cast<long>(base.n) * base.n;
    if (count < 0) throw ParameterError("shift count must be >= 0");
    if (count > capacity)
        throw CapacityError("requested " + std::to_string(count) + " distinct shifts but a " +
                            std::to_string(base.n) + "x" + std::to_string(base.n) + " mask has only " +
                            std::to_string(capacity) +
                            "; a single scanned mask must hold at least (MN)_max + N^2 elements");
    ShiftEnsemble ens{base, {}, selection, seed};
    ens.shifts.reserve(static_cast<std::size_t>(count));
    std::vector<int> order(static_cast<std::size_t>(capacity));
    std::iota(order.begin(), order.end(), 0);
    if (selection == ShiftSelection::random) {
        Rng rng(seed);
        for (int i = 0; i < count; ++i) {
            std::uniform_int_distribution<long> pick(i, capacity - 1);
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
        }
    }
    for (int i = 0; i < count; ++i) {
        const int s = order[static_cast<std::size_t>(i)];
        ens.shifts.push_back({s / base.n, s % base.n});
    }
    return ens;
}

std::vector<long> cyclic_autocorrelation(const Mask& m) {
    const int n = m.n;
    std::vector<fft::cplx> f(m.data.size());
    std::transform(m.data.begin(), m.data.end(), f.begin(), [](std::uint8_t v) { return fft::cplx(v, 0); });
    fft::transform(f, {n, n}, false);
    for (auto& v : f) v = std::norm(v);
    fft::transform(f, {n, n}, true);
    std::vector<long> out(f.size());
    std::transform(f.begin(), f.end(), out.begin(), [](const fft::cplx& v) { return std::lround(v.real()); });
    return out;
}

AutocorrReport autocorrelate(const Mask& m) {
    const auto ac = cyclic_autocorrelation(m);
    AutocorrReport rep;
    rep.raw_peak = static_cast<double>(ac[0]);
    if (ac.size() > 1) {
        const auto [lo, hi] = std::minmax_element(ac.begin() + 1, ac.end());
        rep.offpeak_min = static_cast<double>(*lo);
        rep.offpeak_max = static_cast<double>(*hi);
    } else {
        rep.offpeak_min = rep.offpeak_max = rep.raw_peak;
    }
    rep.offpeak_range = rep.offpeak_max - rep.offpeak_min;
    rep.mean = m.mean();
    rep.variance = rep.mean * (1.0 - rep.mean);  // exact for a binary array
    return rep;
}

void write_mask(const Mask& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "P5\n" << m.n << ' ' << m.n << "\n1\n";
    out.write(reinterpret_cast<const char*>(m.data.data()), static_cast<std::streamsize>(m.data.size()));
    if (!out) throw IoError("short write to '" + path.string() + "'");
    io::write_json(io::sidecar_path(path),
                   {{"kind", to_string(m.kind)}, {"n", m.n}, {"seed_or_prime", m.seed_or_prime}});
}

Mask read_mask(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    auto token = [&]() {
        std::string t;
        while (in >> std::ws && in.peek() == '#') std::getline(in, t);
        in >> t;
        return t;
    };
    if (token() != "P5") throw IoError("'" + path.string() + "' is not a binary PGM");
    const int w = std::stoi(token()), h = std::stoi(token()), maxval = std::stoi(token());
    in.get();
    if (w != h || w < 1) throw ShapeError("mask PGM must be square");
    if (maxval < 1 || maxval > 255) throw IoError("mask PGM must have 8-bit samples");
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw IoError("truncated PGM '" + path.string() + "'");
    Mask m{w, std::move(raw), MaskKind::random, 0};
    for (auto& v : m.data) v = 2 * v >= maxval ? 1 : 0;
    const auto side = io::sidecar_path(path);
    if (std::filesystem::exists(side)) {
        const auto meta = io::read_json(side);
        m.kind = mask_kind_from_string(meta.value("kind", "random"));
        m.seed_or_prime = meta.value("seed_or_prime", std::uint64_t{0});
    }
    return m;
}

}  // namespace gtomo
