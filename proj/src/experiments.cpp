#include "gtomo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gtomo/io.hpp"
#include "gtomo/rng.hpp"

namespace gtomo {

using nlohmann::json;
namespace fs = std::filesystem;

// ---- spec (de)serialization -------------------------------------------------

json ChainConfig::to_json() const {
    return {{"method", method},
            {"direct",
             {{"iterations", direct.iterations},
              {"alpha", direct.alpha},
              {"beta", direct.beta},
              {"inner_xc_iterations", direct.inner_xc_iterations},
              {"nonneg", direct.nonneg}}},
            {"two_step",
             {{"gi_method", two_step.gi_method},
              {"gi_alpha", two_step.gi.alpha},
              {"gi_iterations", two_step.gi.iterations},
              {"gi_init", two_step.gi.init},
              {"gi_priors", two_step.gi.priors.describe()},
              {"tomo", two_step.tomo},
              {"sirt_iterations", two_step.sirt.iterations},
              {"sirt_relaxation", two_step.sirt.relaxation},
              {"sirt_nonneg", two_step.sirt.nonneg},
              {"sirt_priors", two_step.sirt.priors.describe()}}}};
}

ChainConfig ChainConfig::from_json(const json& j) {
    ChainConfig c;
    c.method = j.value("method", c.method);
    if (j.contains("direct")) {
        const auto& d = j["direct"];
        c.direct.iterations = d.value("iterations", c.direct.iterations);
        c.direct.alpha = d.value("alpha", c.direct.alpha);
        c.direct.beta = d.value("beta", c.direct.beta);
        c.direct.inner_xc_iterations = d.value("inner_xc_iterations", c.direct.inner_xc_iterations);
        c.direct.nonneg = d.value("nonneg", c.direct.nonneg);
    }
    if (j.contains("two_step")) {
        const auto& t = j["two_step"];
        auto& ts = c.two_step;
        ts.gi_method = t.value("gi_method", ts.gi_method);
        ts.gi.alpha = t.value("gi_alpha", ts.gi.alpha);
        ts.gi.iterations = t.value("gi_iterations", ts.gi.iterations);
        ts.gi.init = t.value("gi_init", ts.gi.init);
        ts.gi.priors = PriorConfig::parse(t.value("gi_priors", std::string("none")));
        ts.tomo = t.value("tomo", ts.tomo);
        ts.sirt.iterations = t.value("sirt_iterations", ts.sirt.iterations);
        ts.sirt.relaxation = t.value("sirt_relaxation", ts.sirt.relaxation);
        ts.sirt.nonneg = t.value("sirt_nonneg", ts.sirt.nonneg);
        ts.sirt.priors = PriorConfig::parse(t.value("sirt_priors", std::string("none")));
    }
    if (c.method != "direct" && c.method != "two_step")
        throw ConfigError("chain method must be 'direct' or 'two_step'");
    return c;
}

namespace {

json phantom_json(const SpherePhantomSpec& p) {
    json centers = json::array();
    for (const auto& c : p.centers) centers.push_back({c.r1, c.r2, c.r3});
    return {{"n", p.n}, {"diameter", p.sphere_diameter}, {"attenuation", p.attenuation}, {"centers", centers}};
}

SpherePhantomSpec phantom_from_json(const json& j) {
    SpherePhantomSpec p;
    p.n = j.value("n", p.n);
    p.sphere_diameter = j.value("diameter", p.sphere_diameter);
    p.attenuation = j.value("attenuation", p.attenuation);
    if (j.contains("centers")) {
        p.centers.clear();
        for (const auto& c : j["centers"]) {
            if (!c.is_array() || c.size() != 3) throw ConfigError("phantom centers must be [r1, r2, r3] triples");
            p.centers.push_back({c[0].get<double>(), c[1].get<double>(), c[2].get<double>()});
        }
    }
    return p;
}

}  // namespace

json ExperimentSpec::to_json() const {
    json sp = json::array();
    for (const auto& [m, n] : splits) sp.push_back({m, n});
    json kinds = json::array();
    for (auto k : mask_kinds) kinds.push_back(to_string(k));
    return {{"name", name},
            {"kind", kind},
            {"phantom", phantom_json(phantom)},
            {"angles", angles},
            {"per_angle", per_angle},
            {"budget", budget},
            {"splits", sp},
            {"mask", {{"kind", to_string(mask_kind)}, {"param", mask_param}}},
            {"mask_kinds", kinds},
            {"bucket_counts", bucket_counts},
            {"policies", policies},
            {"policy", policy},
            {"seeds", seeds},
            {"axis_offset", axis_offset},
            {"recon_axis_offset", recon_axis_offset},
            {"slice_r3", slice_r3},
            {"chain", chain.to_json()}};
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
    ExperimentSpec s = default_spec(j.value("kind", std::string("dose_fractionation")));
    try {
        s.name = j.value("name", s.name);
        if (j.contains("phantom")) s.phantom = phantom_from_json(j["phantom"]);
        s.angles = j.value("angles", s.angles);
        s.per_angle = j.value("per_angle", s.per_angle);
        s.budget = j.value("budget", s.budget);
        if (j.contains("splits")) {
            s.splits.clear();
            for (const auto& p : j["splits"]) s.splits.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
        }
        if (j.contains("mask")) {
            s.mask_kind = mask_kind_from_string(j["mask"].value("kind", std::string("random")));
            s.mask_param = j["mask"].value("param", s.mask_param);
        }
        if (j.contains("mask_kinds")) {
            s.mask_kinds.clear();
            for (const auto& k : j["mask_kinds"]) s.mask_kinds.push_back(mask_kind_from_string(k.get<std::string>()));
        }
        s.bucket_counts = j.value("bucket_counts", s.bucket_counts);
        s.policies = j.value("policies", s.policies);
        s.policy = j.value("policy", s.policy);
        s.seeds = j.value("seeds", s.seeds);
        s.axis_offset = j.value("axis_offset", s.axis_offset);
        s.recon_axis_offset = j.value("recon_axis_offset", s.recon_axis_offset);
        s.slice_r3 = j.value("slice_r3", s.slice_r3);
        if (j.contains("chain")) s.chain = ChainConfig::from_json(j["chain"]);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("experiment spec: ") + e.what());
    }
    s.validate();
    return s;
}

std::string ExperimentSpec::digest() const {
    return io::digest_hex(to_json().dump());
}

void ExperimentSpec::validate() const {
    static const std::vector<std::string> kinds{"dose_fractionation", "ring_artifact", "mask_comparison",
                                                "ghost2d_methods", "tomography_comparison"};
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
        throw ConfigError("unknown experiment kind '" + kind + "'");
    if (name.empty() || name.find('/') != std::string::npos) throw ConfigError("experiment name must be a plain word");
    phantom.validate();
    if (seeds.empty()) throw ConfigError("need at least one seed");
    if (angles < 1 || per_angle < 1) throw ConfigError("angles and per_angle must be >= 1");
    if (slice_r3 < 0 || slice_r3 >= phantom.n) throw ConfigError("slice_r3 outside the volume");
    if (kind == "dose_fractionation") {
        if (splits.empty()) throw ConfigError("dose fractionation needs at least one (M, N) split");
        for (const auto& [m, n] : splits) {
            if (m < 1 || n < 1) throw ConfigError("split entries must be >= 1");
            // The published splits round N down ((7, 4000) spends 28000 of
            // 30000), so a split may underspend J by up to 10% but never exceed it.
            const long spent = static_cast<long>(m) * n;
            if (budget > 0 && (spent > budget || spent < 0.9 * static_cast<double>(budget)))
                throw ConfigError("split (" + std::to_string(m) + ", " + std::to_string(n) + ") spends " +
                                  std::to_string(spent) + " buckets; the budget J = " + std::to_string(budget) +
                                  " allows 90% to 100% of it");
        }
    }
    for (const auto& p : policies)
        if (p != "same" && p != "different") throw ConfigError("policies must be 'same' or 'different'");
    if (kind == "ring_artifact" || kind == "mask_comparison") {
        if (mask_kind != MaskKind::random || kind == "mask_comparison") {
            if (!is_prime(phantom.n)) throw ConfigError("coded masks need a prime side; phantom n is " + std::to_string(phantom.n));
        }
    }
}

ExperimentSpec default_spec(const std::string& kind) {
    ExperimentSpec s;
    s.kind = kind;
    s.name = kind;
    if (kind == "dose_fractionation") {
        s.budget = 30000;
        s.splits = {{90, 333}, {30, 1000}, {10, 3000}, {7, 4000}};
        s.chain.method = "direct";
        s.chain.direct.iterations = 100;
        s.chain.direct.alpha = 0.025;
        s.chain.direct.nonneg = true;
    } else if (kind == "ring_artifact") {
        s.phantom.n = 59;
        s.angles = 90;
        s.per_angle = 1740;
        s.mask_kind = MaskKind::frt;
        s.mask_param = 59;
        s.chain.method = "two_step";
        s.chain.two_step.gi_method = "xc";
        s.chain.two_step.tomo = "fbp";
    } else if (kind == "mask_comparison") {
        s.phantom.n = 59;
        s.angles = 1;
    } else if (kind == "ghost2d_methods") {
        s.angles = 1;
        s.bucket_counts = {1000, 4000};
    } else if (kind == "tomography_comparison") {
        s.bucket_counts = {1000, 4000};
        s.chain.direct.nonneg = false;
    }
    return s;
}

// ---- shared helpers ---------------------------------------------------------

SimulatedData simulate(const Volume& truth, const AngleSet& sim_angles, const PatternSource& source) {
    SimulatedData d{truth, sim_angles, make_campaign(sim_angles, source), {}};
    const auto records = run_campaign(truth, d.campaign);
    d.buckets = values_by_angle(records, sim_angles.size());
    return d;
}

double ring_metric(const Volume& recon, const Volume& truth, int slice_r2, double center) {
    if (recon.n() != truth.n()) throw ShapeError("ring_metric: volume sizes differ");
    const int n = recon.n();
    if (slice_r2 < 0 || slice_r2 >= n) throw ShapeError("ring_metric: slice outside the volume");
    const double rmax = (n - 1) / 2.0;
    const int bins = static_cast<int>(std::floor(rmax + 0.5)) + 1;
    std::vector<double> sum(static_cast<std::size_t>(bins), 0.0);
    std::vector<long> count(static_cast<std::size_t>(bins), 0);
    for (int r3 = 0; r3 < n; ++r3) {
        for (int r1 = 0; r1 < n; ++r1) {
            const double r = std::hypot(r1 - center, r3 - center);
            if (r > rmax) continue;
            const auto b = static_cast<std::size_t>(std::floor(r + 0.5));
            sum[b] += recon.at(r1, slice_r2, r3) - truth.at(r1, slice_r2, r3);
            ++count[b];
        }
    }
    double energy = 0;
    long total = 0;
    for (int b = 0; b < bins; ++b) {
        if (count[b] == 0) continue;
        const double mean = sum[b] / count[b];
        energy += mean * mean * count[b];
        total += count[b];
    }
    return total > 0 ? energy / total : 0.0;
}

TomogramResult run_chain(const ChainConfig& chain, const BucketsByAngle& buckets, const PatternList& patterns,
                         const AngleSet& geometry) {
    if (chain.method == "direct") return direct_xc_sirt(buckets, patterns, geometry, chain.direct);
    if (chain.method == "two_step") return two_step(buckets, patterns, geometry, chain.two_step);
    throw ConfigError("chain method must be 'direct' or 'two_step'");
}

namespace {

double slice_mad(const Volume& v, const Volume& truth, int r3) {
    return mad(v.slice_r3(r3), truth.slice_r3(r3));
}

PatternSource random_source(int n, int per_angle, std::uint64_t seed, const std::string& policy = "different") {
    PatternSource src;
    src.type = "random";
    src.policy = policy;
    src.n = n;
    src.per_angle = per_angle;
    src.seed = seed;
    return src;
}

Mask make_base(MaskKind kind, int n, std::uint64_t param) {
    switch (kind) {
        case MaskKind::random: return random_mask(n, param);
        case MaskKind::mura: return mura_mask(n);
        case MaskKind::frt: return frt_mask(n);
    }
    throw ParameterError("unknown mask kind");
}

}  // namespace

// ---- studies ----------------------------------------------------------------

std::vector<DoseRow> run_dose_fractionation(const ExperimentSpec& spec, std::uint64_t seed) {
    spec.validate();
    const Volume truth = build_phantom(spec.phantom);
    const int n = spec.phantom.n;
    std::vector<DoseRow> rows;
    for (const auto& [m, per] : spec.splits) {
        const auto sim_angles = AngleSet::uniform(m, spec.axis_offset);
        const auto data = simulate(truth, sim_angles, random_source(n, per, derive_seed(seed, static_cast<std::uint64_t>(m))));
        auto res = run_chain(spec.chain, data.buckets, data.campaign.patterns, sim_angles.with_offset(spec.recon_axis_offset));
        DoseRow row;
        row.m = m;
        row.n = per;
        row.seed = seed;
        row.slice_mad = slice_mad(res.volume, truth, spec.slice_r3);
        row.volume_mad = mad(res.volume.span(), truth.span());
        row.report.mad = row.slice_mad;
        row.report.rmse_buckets = res.rmse;
        row.report.rmse_buckets_centered = res.rmse_centered;
        row.report.max_value_used_for_normalization = truth.max();
        row.report.residual_curve = res.residual_log;
        row.volume = std::move(res.volume);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<RingRow> run_ring_artifact_study(const ExperimentSpec& spec, std::uint64_t seed) {
    spec.validate();
    const int n = spec.phantom.n;
    if (spec.per_angle > n * n)
        throw CapacityError("ring study needs N <= n^2 distinct shifts (" + std::to_string(spec.per_angle) + " > " +
                            std::to_string(n * n) + ")");
    const Volume truth = build_phantom(spec.phantom);
    const auto sim_angles = AngleSet::uniform(spec.angles, spec.axis_offset);
    const auto geometry = sim_angles.with_offset(spec.recon_axis_offset);
    const double center = (n - 1) / 2.0 + spec.recon_axis_offset;

    std::vector<std::pair<std::string, ChainConfig>> chains{{spec.chain.method == "direct" ? "xc_sirt" : "two_step", spec.chain}};
    const bool is_fbp = spec.chain.method == "two_step" && spec.chain.two_step.tomo == "fbp";
    if (!is_fbp) {
        ChainConfig fbp_chain;
        fbp_chain.method = "two_step";
        fbp_chain.two_step.gi_method = "xc";
        fbp_chain.two_step.tomo = "fbp";
        chains.insert(chains.begin(), {"fbp", fbp_chain});
    } else {
        chains.front().first = "fbp";
    }

    std::vector<RingRow> rows;
    for (const auto& policy : spec.policies) {
        PatternSource src;
        src.type = "shifted";
        src.policy = policy;
        src.n = n;
        src.per_angle = spec.per_angle;
        src.seed = seed;
        src.mask_kind = spec.mask_kind;
        src.mask_param = spec.mask_kind == MaskKind::random ? derive_seed(seed, 0xa5a5) : static_cast<std::uint64_t>(n);
        const auto data = simulate(truth, sim_angles, src);
        for (const auto& [label, chain] : chains) {
            auto res = run_chain(chain, data.buckets, data.campaign.patterns, geometry);
            RingRow row;
            row.policy = policy;
            row.chain = label;
            row.ring = ring_metric(res.volume, truth, n / 2, center);
            row.slice_mad = slice_mad(res.volume, truth, std::min(spec.slice_r3, n - 1));
            row.volume = std::move(res.volume);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<MaskRow> run_mask_comparison(const ExperimentSpec& spec, std::uint64_t seed) {
    spec.validate();
    const int p = spec.phantom.n;
    const Volume truth = build_phantom(spec.phantom);
    const Image proj = project(truth, 0.0, spec.axis_offset);
    std::vector<MaskRow> rows;
    for (MaskKind kind : spec.mask_kinds) {
        const Mask base = make_base(kind, p, derive_seed(seed, 0xa5a5));
        const auto ac = autocorrelate(base);
        for (int count : spec.bucket_counts) {
            const auto ens = shift_ensemble(base, count, ShiftSelection::random,
                                            derive_seed(seed, static_cast<std::uint64_t>(count)));
            const auto set = PatternSet::from_ensemble(ens);
            std::vector<float> b(static_cast<std::size_t>(set.count()));
            set.measure(proj.span(), b);
            auto g = xc(b, set).image;
            const double s2 = set.variance();
            for (float& v : g.data()) v = static_cast<float>(v / s2);
            rows.push_back({kind, count, mad(g, proj), ac, std::move(g)});
        }
    }
    return rows;
}

std::vector<MethodRow> run_ghost2d_methods(const ExperimentSpec& spec, std::uint64_t seed) {
    spec.validate();
    const Volume truth = build_phantom(spec.phantom);
    const int n = spec.phantom.n;
    const Image proj = project(truth, 0.0, spec.axis_offset);
    std::vector<MethodRow> rows;
    for (int count : spec.bucket_counts) {
        const auto set = PatternSet::random(n, count, derive_seed(seed, static_cast<std::uint64_t>(count)));
        std::vector<float> b(static_cast<std::size_t>(count));
        set.measure(proj.span(), b);
        SolverConfig cfg;
        cfg.alpha = count < n * n ? 0.025 : 0.25;  // smaller step when under-determined
        cfg.iterations = 10;
        auto add = [&](const std::string& label, GhostImage g) {
            rows.push_back({label, count, mad(g.image, proj), std::move(g.image)});
        };
        add("xc", xc(b, set));
        add("ixc", ixc(b, set, cfg));
        add("cg", cg_xc(b, set, cfg.iterations));
        SolverConfig cs;
        cs.alpha = 0.01;
        cs.iterations = 1000;
        add("ixc_1000", ixc(b, set, cs));
        for (const char* prior : {"image", "grad", "fourier"}) {
            cs.priors = PriorConfig::parse(prior);
            add(std::string("cs_") + prior, cs_ixc(b, set, cs));
        }
    }
    return rows;
}

std::vector<ChainRow> run_tomography_comparison(const ExperimentSpec& spec, std::uint64_t seed) {
    spec.validate();
    const Volume truth = build_phantom(spec.phantom);
    const int n = spec.phantom.n;
    const auto sim_angles = AngleSet::uniform(spec.angles, spec.axis_offset);
    const auto geometry = sim_angles.with_offset(spec.recon_axis_offset);
    std::vector<ChainRow> rows;
    for (int count : spec.bucket_counts) {
        const auto data = simulate(truth, sim_angles, random_source(n, count, seed));
        DirectConfig dc = spec.chain.direct;
        dc.iterations = 10;
        auto direct = direct_xc_sirt(data.buckets, data.campaign.patterns, geometry, dc);
        TwoStepConfig tc;
        tc.gi_method = "ixc";
        tc.gi.alpha = count < n * n ? 0.025 : 0.25;
        tc.gi.iterations = 10;
        tc.gi.init = "xc";
        tc.tomo = "fbp_then_sirt";
        tc.sirt.iterations = 10;
        tc.sirt.nonneg = false;
        auto two = two_step(data.buckets, data.campaign.patterns, geometry, tc);
        const double dm = slice_mad(direct.volume, truth, spec.slice_r3);
        const double tm = slice_mad(two.volume, truth, spec.slice_r3);
        rows.push_back({"direct_xc_sirt_10", count, std::move(direct), dm});
        rows.push_back({"ixc10_fbp_sirt10", count, std::move(two), tm});
    }
    return rows;
}

// ---- output -----------------------------------------------------------------

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
    out << s;
}

void slice_png(const fs::path& p, const Volume& v, int r3, float hi) {
    io::write_png(p, v.slice_r3(std::min(r3, v.n() - 1)), 0.0f, hi);
}

}  // namespace

fs::path run_experiment(const ExperimentSpec& spec, const fs::path& out_root) {
    spec.validate();
    const fs::path dir = out_root / (spec.name + "-" + spec.digest());
    fs::create_directories(dir);
    io::write_json(dir / "spec.json", spec.to_json());

    const Volume truth = build_phantom(spec.phantom);
    const float hi = std::max(truth.max(), 1e-6f);
    slice_png(dir / "truth_r3.png", truth, spec.slice_r3, hi);

    std::ostringstream csv, md;
    json reports = json::array();
    md << "# " << spec.name << "\n\nKind: `" << spec.kind << "`, spec digest `" << spec.digest() << "`.\n\n";

    if (spec.kind == "dose_fractionation") {
        csv << "seed,M,N,slice_mad,volume_mad,rmse_buckets,rmse_buckets_centered\n";
        md << "Fixed budget J = " << spec.budget << ", chain `" << spec.chain.method << "`, slice r3 = " << spec.slice_r3
           << ".\n\n| seed | M | N | slice MAD | bucket RMSE (centred) |\n|---|---|---|---|---|\n";
        for (auto seed : spec.seeds) {
            const auto rows = run_dose_fractionation(spec, seed);
            const DoseRow* best = &rows.front();
            for (const auto& r : rows) {
                csv << seed << ',' << r.m << ',' << r.n << ',' << fmt(r.slice_mad) << ',' << fmt(r.volume_mad) << ','
                    << fmt(r.report.rmse_buckets) << ',' << fmt(r.report.rmse_buckets_centered) << '\n';
                md << "| " << seed << " | " << r.m << " | " << r.n << " | " << fmt(r.slice_mad) << " | "
                   << fmt(r.report.rmse_buckets_centered) << " |\n";
                auto j = r.report.to_json();
                j["seed"] = seed;
                j["M"] = r.m;
                j["N"] = r.n;
                reports.push_back(j);
                slice_png(dir / ("slice_M" + std::to_string(r.m) + "_N" + std::to_string(r.n) + "_s" +
                                 std::to_string(seed) + ".png"),
                          r.volume, spec.slice_r3, hi);
                if (r.slice_mad < best->slice_mad) best = &r;
            }
            md << "\nSeed " << seed << ": best split (" << best->m << ", " << best->n << ").\n\n";
        }
    } else if (spec.kind == "ring_artifact") {
        csv << "seed,policy,chain,ring_metric,slice_mad\n";
        md << "Mask `" << to_string(spec.mask_kind) << "`, M = " << spec.angles << ", N = " << spec.per_angle
           << ".\n\n| seed | policy | chain | ring metric | slice MAD |\n|---|---|---|---|---|\n";
        for (auto seed : spec.seeds) {
            for (const auto& r : run_ring_artifact_study(spec, seed)) {
                csv << seed << ',' << r.policy << ',' << r.chain << ',' << fmt(r.ring) << ',' << fmt(r.slice_mad) << '\n';
                md << "| " << seed << " | " << r.policy << " | " << r.chain << " | " << fmt(r.ring) << " | "
                   << fmt(r.slice_mad) << " |\n";
                reports.push_back({{"seed", seed}, {"policy", r.policy}, {"chain", r.chain}, {"ring_metric", r.ring},
                                   {"slice_mad", r.slice_mad}});
                const int n = r.volume.n();
                io::write_png(dir / ("central_" + r.policy + "_" + r.chain + "_s" + std::to_string(seed) + ".png"),
                              r.volume.slice_r2(n / 2), 0.0f, hi);
            }
        }
    } else if (spec.kind == "mask_comparison") {
        csv << "seed,kind,count,mad,raw_peak,offpeak_min,offpeak_max,offpeak_range\n";
        md << "XC ghost images (divided by pattern variance) of the 0 degree projection, p = " << spec.phantom.n
           << ".\n\n| seed | kind | N | MAD | autocorr peak | off-peak range |\n|---|---|---|---|---|---|\n";
        for (auto seed : spec.seeds) {
            for (const auto& r : run_mask_comparison(spec, seed)) {
                csv << seed << ',' << to_string(r.kind) << ',' << r.count << ',' << fmt(r.mad) << ','
                    << fmt(r.autocorr.raw_peak) << ',' << fmt(r.autocorr.offpeak_min) << ','
                    << fmt(r.autocorr.offpeak_max) << ',' << fmt(r.autocorr.offpeak_range) << '\n';
                md << "| " << seed << " | " << to_string(r.kind) << " | " << r.count << " | " << fmt(r.mad) << " | "
                   << fmt(r.autocorr.raw_peak) << " | " << fmt(r.autocorr.offpeak_range) << " |\n";
                reports.push_back({{"seed", seed}, {"kind", to_string(r.kind)}, {"count", r.count}, {"mad", r.mad}});
                io::write_png(dir / ("ghost_" + to_string(r.kind) + "_" + std::to_string(r.count) + "_s" +
                                     std::to_string(seed) + ".png"),
                              r.image);
            }
        }
    } else if (spec.kind == "ghost2d_methods") {
        csv << "seed,method,J,mad\n";
        md << "0 degree projection.\n\n| seed | method | J | MAD |\n|---|---|---|---|\n";
        for (auto seed : spec.seeds) {
            for (const auto& r : run_ghost2d_methods(spec, seed)) {
                csv << seed << ',' << r.method << ',' << r.buckets << ',' << fmt(r.mad) << '\n';
                md << "| " << seed << " | " << r.method << " | " << r.buckets << " | " << fmt(r.mad) << " |\n";
                reports.push_back({{"seed", seed}, {"method", r.method}, {"J", r.buckets}, {"mad", r.mad}});
                io::write_png(dir / ("ghost_" + r.method + "_J" + std::to_string(r.buckets) + "_s" +
                                     std::to_string(seed) + ".png"),
                              r.image);
            }
        }
    } else if (spec.kind == "tomography_comparison") {
        csv << "seed,chain,N,rmse_buckets,rmse_buckets_centered,slice_mad\n";
        md << "M = " << spec.angles << ".\n\n| seed | chain | N | bucket RMSE (centred) | slice MAD |\n|---|---|---|---|---|\n";
        for (auto seed : spec.seeds) {
            for (const auto& r : run_tomography_comparison(spec, seed)) {
                csv << seed << ',' << r.chain << ',' << r.n << ',' << fmt(r.result.rmse) << ','
                    << fmt(r.result.rmse_centered) << ',' << fmt(r.slice_mad) << '\n';
                md << "| " << seed << " | " << r.chain << " | " << r.n << " | " << fmt(r.result.rmse_centered)
                   << " | " << fmt(r.slice_mad) << " |\n";
                MetricReport rep;
                rep.mad = r.slice_mad;
                rep.rmse_buckets = r.result.rmse;
                rep.rmse_buckets_centered = r.result.rmse_centered;
                rep.max_value_used_for_normalization = truth.max();
                rep.residual_curve = r.result.residual_log;
                auto j = rep.to_json();
                j["seed"] = seed;
                j["chain"] = r.chain;
                j["N"] = r.n;
                reports.push_back(j);
                slice_png(dir / ("slice_" + r.chain + "_N" + std::to_string(r.n) + "_s" + std::to_string(seed) + ".png"),
                          r.result.volume, spec.slice_r3, hi);
            }
        }
    }
    write_text(dir / "table.csv", csv.str());
    io::write_json(dir / "metrics.json", {{"schema_version", kMetricSchemaVersion}, {"rows", reports}});
    write_text(dir / "summary.md", md.str());
    return dir;
}

}  // namespace gtomo
