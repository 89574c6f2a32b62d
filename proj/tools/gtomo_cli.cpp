// Command-line front end: phantom, simulate {project,buckets}, masks,
// autocorr, recon2d, recon3d, experiment.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gtomo/buckets.hpp"
#include "gtomo/experiments.hpp"
#include "gtomo/ghost2d.hpp"
#include "gtomo/ghost3d.hpp"
#include "gtomo/io.hpp"
#include "gtomo/masks.hpp"
#include "gtomo/metrics.hpp"
#include "gtomo/projector.hpp"
#include "gtomo/volume.hpp"

namespace fs = std::filesystem;
using namespace gtomo;
using nlohmann::json;

namespace {

std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    return out;
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
    fs::path q = p;
    q.replace_extension();
    q += suffix;
    return q;
}

void write_image(const Image& img, const fs::path& path, const std::string& what) {
    io::write_raw_f32(path, img.span());
    io::write_json(io::sidecar_path(path), {{"n", img.n()}, {"order", "x2,x1"}, {"dtype", "float32le"}, {"description", what}});
    io::write_png(with_suffix(path, ".png"), img);
}

// Ground-truth projection at one angle for MAD reporting.
Image truth_projection(const fs::path& vol_path, double angle, double offset) {
    return project(read_volume(vol_path), angle, offset);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ghost imaging and ghost tomography: simulation and reconstruction"};
    app.require_subcommand(1);

    // phantom
    auto* ph = app.add_subcommand("phantom", "Build the three-sphere phantom");
    SpherePhantomSpec pspec;
    fs::path ph_out;
    int ph_slice = -1;
    ph->add_option("--n", pspec.n, "voxels per side")->capture_default_str();
    ph->add_option("--diameter", pspec.sphere_diameter, "sphere diameter in voxels")->capture_default_str();
    ph->add_option("--attenuation", pspec.attenuation, "per-voxel attenuation")->capture_default_str();
    ph->add_option("--out", ph_out, "output raw volume")->required();
    ph->add_option("--png-slice", ph_slice, "also write this r3 slice as PNG");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate projections or bucket signals");
    sim->require_subcommand(1);
    auto* sp = sim->add_subcommand("project", "Projection stack of a volume");
    fs::path sp_vol, sp_out;
    int sp_angles = 90;
    double sp_offset = 0.5;
    sp->add_option("--vol", sp_vol, "input volume")->required();
    sp->add_option("--angles", sp_angles, "number of angles over pi")->capture_default_str();
    sp->add_option("--axis-offset", sp_offset, "rotation axis offset in pixels")->capture_default_str();
    sp->add_option("--out", sp_out, "output projection stack")->required();

    auto* sb = sim->add_subcommand("buckets", "Bucket measurements of a volume");
    fs::path sb_vol, sb_out;
    int sb_angles = 90;
    double sb_offset = 0.5;
    PatternSource src;
    std::string sb_masks = "random", sb_model = "attenuation";
    sb->add_option("--vol", sb_vol, "input volume")->required();
    sb->add_option("--angles", sb_angles, "number of angles over pi")->capture_default_str();
    sb->add_option("--per-angle", src.per_angle, "buckets per angle")->capture_default_str();
    sb->add_option("--masks", sb_masks,
                   "random: fresh i.i.d. pattern per bucket; mura | frt | random-mask: cyclic shifts of one mask")
        ->check(CLI::IsMember({"random", "mura", "frt", "random-mask"}))
        ->capture_default_str();
    sb->add_option("--policy", src.policy, "same or different patterns per angle")
        ->check(CLI::IsMember({"same", "different"}))
        ->capture_default_str();
    sb->add_option("--seed", src.seed, "pattern seed")->capture_default_str();
    sb->add_option("--mean", src.mean, "mean of random patterns")->capture_default_str();
    sb->add_option("--mask-seed", src.mask_param, "seed of the random base mask (random-mask)");
    sb->add_option("--model", sb_model, "attenuation or transmission")
        ->check(CLI::IsMember({"attenuation", "transmission"}))
        ->capture_default_str();
    sb->add_option("--axis-offset", sb_offset, "rotation axis offset in pixels")->capture_default_str();
    sb->add_option("--out", sb_out, "output CSV")->required();

    // masks
    auto* mk = app.add_subcommand("masks", "Generate an illumination mask");
    std::string mk_kind = "random";
    int mk_p = 59;
    std::uint64_t mk_seed = 0;
    double mk_mean = 0.5;
    fs::path mk_out;
    mk->add_option("--kind", mk_kind, "random, mura or frt")->check(CLI::IsMember({"random", "mura", "frt"}))->capture_default_str();
    mk->add_option("--p,--n", mk_p, "side (prime for mura/frt)")->capture_default_str();
    mk->add_option("--seed", mk_seed, "seed for random masks")->capture_default_str();
    mk->add_option("--mean", mk_mean, "mean for random masks")->capture_default_str();
    mk->add_option("--out", mk_out, "output PGM")->required();

    // autocorr
    auto* ac = app.add_subcommand("autocorr", "Cyclic autocorrelation report of a mask");
    fs::path ac_in, ac_report;
    ac->add_option("--in", ac_in, "mask PGM")->required();
    ac->add_option("--report", ac_report, "output JSON (stdout when omitted)");

    // recon2d
    auto* r2 = app.add_subcommand("recon2d", "Ghost image of one projection from buckets");
    std::string r2_method = "xc", r2_priors = "none";
    fs::path r2_buckets, r2_out, r2_truth, r2_metrics;
    int r2_angle = 0;
    SolverConfig r2_cfg;
    r2->add_option("--method", r2_method, "xc, ixc, cg or cs")->check(CLI::IsMember({"xc", "ixc", "cg", "cs"}))->capture_default_str();
    r2->add_option("--buckets", r2_buckets, "bucket CSV")->required();
    r2->add_option("--angle-index", r2_angle, "which angle to reconstruct")->capture_default_str();
    r2->add_option("--alpha", r2_cfg.alpha, "relaxation scale")->capture_default_str();
    r2->add_option("--iters", r2_cfg.iterations, "iterations")->capture_default_str();
    r2->add_option("--priors", r2_priors, "comma list: image, grad, fourier, all, none")->capture_default_str();
    r2->add_option("--lambda", r2_cfg.priors.lambda_rel, "soft threshold / current max")->capture_default_str();
    r2->add_option("--tv-weight", r2_cfg.priors.tv_weight, "TV step size")->capture_default_str();
    r2->add_option("--kappa", r2_cfg.priors.kappa, "Fourier cut-off / Nyquist")->capture_default_str();
    r2->add_option("--init", r2_cfg.init, "zero or xc")->capture_default_str();
    r2->add_option("--truth", r2_truth, "ground-truth volume, enables MAD");
    r2->add_option("--out", r2_out, "output raw image (PNG written alongside)")->required();
    r2->add_option("--metrics", r2_metrics, "metrics JSON (default: <out>.metrics.json)");

    // recon3d
    auto* r3 = app.add_subcommand("recon3d", "Tomogram from buckets");
    std::string r3_mode = "direct", r3_tomo = "fbp", r3_slices = "18", r3_gi_priors = "none", r3_tomo_priors = "all";
    fs::path r3_buckets, r3_out, r3_truth, r3_metrics;
    TwoStepConfig r3_two;
    DirectConfig r3_direct;
    double r3_offset = 0.0;
    int r3_iters = -1;
    bool r3_no_clamp = false;
    r3->add_option("--mode", r3_mode, "two-step or direct")->check(CLI::IsMember({"two-step", "direct"}))->capture_default_str();
    r3->add_option("--gi-method", r3_two.gi_method, "two-step ghost method: xc, ixc, cg, cs")->capture_default_str();
    r3->add_option("--gi-alpha", r3_two.gi.alpha, "two-step ghost relaxation")->capture_default_str();
    r3->add_option("--gi-iters", r3_two.gi.iterations, "two-step ghost iterations")->capture_default_str();
    r3->add_option("--gi-init", r3_two.gi.init, "two-step ghost init: zero or xc")->capture_default_str();
    r3->add_option("--gi-priors", r3_gi_priors, "priors for --gi-method cs")->capture_default_str();
    r3->add_option("--tomo", r3_tomo, "fbp, sirt (FBP then SIRT) or sirt_cs")
        ->check(CLI::IsMember({"fbp", "sirt", "sirt_cs"}))
        ->capture_default_str();
    r3->add_option("--tomo-priors", r3_tomo_priors, "volume priors for sirt_cs")->capture_default_str();
    r3->add_option("--iters", r3_iters, "SIRT iterations (two-step) or XC-SIRT iterations (direct)");
    r3->add_option("--alpha", r3_direct.alpha, "direct: gamma = alpha / sigma^2")->capture_default_str();
    r3->add_option("--beta", r3_direct.beta, "direct: step, 0 for 1/J")->capture_default_str();
    r3->add_option("--inner", r3_direct.inner_xc_iterations, "direct: IXC steps per angle per update")->capture_default_str();
    r3->add_flag("--no-clamp", r3_no_clamp, "disable the non-negativity clamp");
    r3->add_option("--axis-offset", r3_offset, "reconstruction axis offset")->capture_default_str();
    r3->add_option("--buckets", r3_buckets, "bucket CSV")->required();
    r3->add_option("--truth", r3_truth, "ground-truth volume, enables slice MAD");
    r3->add_option("--slices", r3_slices, "comma list of r3 slices to export as PNG")->capture_default_str();
    r3->add_option("--out", r3_out, "output raw volume")->required();
    r3->add_option("--metrics", r3_metrics, "metrics JSON (default: <out>.metrics.json)");

    // experiment
    auto* ex = app.add_subcommand("experiment", "Run a declarative study");
    fs::path ex_spec, ex_out = "runs";
    std::string ex_kind;
    bool ex_print = false;
    ex->add_option("--spec", ex_spec, "experiment spec JSON");
    ex->add_option("--kind", ex_kind, "use the built-in spec of this kind");
    ex->add_flag("--print-spec", ex_print, "print the resolved spec and exit");
    ex->add_option("--out", ex_out, "output root directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (ph->parsed()) {
            auto vol = build_phantom(pspec);
            write_volume(vol, ph_out, "three-sphere phantom");
            if (ph_slice >= 0) io::write_png(with_suffix(ph_out, ".png"), vol.slice_r3(ph_slice));
            std::printf("phantom n=%d voxel sum %.1f\n", vol.n(), vol.sum());
        } else if (sp->parsed()) {
            auto vol = read_volume(sp_vol);
            auto stack = Projector(vol.n(), AngleSet::uniform(sp_angles, sp_offset)).project(vol);
            write_projections(stack, sp_out);
            std::printf("%d projections of %dx%d\n", stack.count(), stack.n, stack.n);
        } else if (sb->parsed()) {
            auto vol = read_volume(sb_vol);
            src.n = vol.n();
            if (sb_masks == "random") {
                src.type = "random";
            } else {
                src.type = "shifted";
                src.mask_kind = sb_masks == "random-mask" ? MaskKind::random : mask_kind_from_string(sb_masks);
            }
            auto campaign = make_campaign(AngleSet::uniform(sb_angles, sb_offset), src, bucket_model_from_string(sb_model));
            auto records = run_campaign(vol, campaign);
            write_buckets(sb_out, records, campaign);
            std::printf("%zu buckets (M=%d, N=%d), campaign %s\n", records.size(), sb_angles, src.per_angle,
                        campaign.digest().c_str());
        } else if (mk->parsed()) {
            Mask m = mk_kind == "random" ? random_mask(mk_p, mk_seed, mk_mean)
                     : mk_kind == "mura" ? mura_mask(mk_p)
                                         : frt_mask(mk_p);
            write_mask(m, mk_out);
            io::write_png(with_suffix(mk_out, ".png"), m.to_image(), 0.0f, 1.0f);
            std::printf("%s mask %dx%d, %ld ones\n", mk_kind.c_str(), m.n, m.n, m.ones());
        } else if (ac->parsed()) {
            auto rep = autocorrelate(read_mask(ac_in));
            json j = {{"raw_peak", rep.raw_peak}, {"offpeak_min", rep.offpeak_min}, {"offpeak_max", rep.offpeak_max},
                      {"offpeak_range", rep.offpeak_range}, {"mean", rep.mean}, {"variance", rep.variance}};
            if (ac_report.empty()) std::cout << j.dump(2) << '\n';
            else io::write_json(ac_report, j);
        } else if (r2->parsed()) {
            auto ds = read_buckets(r2_buckets);
            auto campaign = campaign_from_header(ds.header);
            const int m = campaign.angles.size();
            if (r2_angle < 0 || r2_angle >= m) throw ParameterError("angle index out of range");
            auto values = values_by_angle(ds.records, m);
            r2_cfg.priors = PriorConfig::parse(r2_priors);
            if (r2_method == "cs" && !r2_cfg.priors.any()) r2_cfg.priors = PriorConfig::parse("grad");
            const auto& set = *campaign.patterns[static_cast<std::size_t>(r2_angle)];
            auto g = reconstruct_ghost(r2_method, values[static_cast<std::size_t>(r2_angle)], set, r2_cfg);
            write_image(g.image, r2_out, "ghost image (" + g.method + ")");
            MetricReport rep;
            rep.residual_curve = g.residual_log;
            json extra = {{"method", g.method}, {"iterations", g.iterations}, {"angle_index", r2_angle}};
            if (!r2_truth.empty()) {
                auto truth = truth_projection(r2_truth, campaign.angles.angles[static_cast<std::size_t>(r2_angle)],
                                              campaign.angles.axis_offset);
                rep.mad = mad(g.image, truth);
                rep.max_value_used_for_normalization = truth.max();
                std::printf("MAD %.4f\n", rep.mad);
            }
            write_metrics_json(r2_metrics.empty() ? with_suffix(r2_out, ".metrics.json") : r2_metrics, rep, extra);
        } else if (r3->parsed()) {
            auto ds = read_buckets(r3_buckets);
            auto campaign = campaign_from_header(ds.header);
            const int m = campaign.angles.size();
            auto values = values_by_angle(ds.records, m);
            const auto geometry = campaign.angles.with_offset(r3_offset);
            TomogramResult res;
            if (r3_mode == "direct") {
                if (r3_iters > 0) r3_direct.iterations = r3_iters;
                r3_direct.nonneg = !r3_no_clamp;
                r3_direct.model = campaign.model;
                res = direct_xc_sirt(values, campaign.patterns, geometry, r3_direct);
            } else {
                r3_two.tomo = r3_tomo == "sirt" ? "fbp_then_sirt" : r3_tomo;
                r3_two.gi.priors = PriorConfig::parse(r3_gi_priors);
                r3_two.sirt.priors = r3_tomo == "sirt_cs" ? PriorConfig::parse(r3_tomo_priors) : PriorConfig{};
                if (r3_iters > 0) r3_two.sirt.iterations = r3_iters;
                r3_two.sirt.nonneg = !r3_no_clamp;
                res = two_step(values, campaign.patterns, geometry, r3_two);
            }
            write_volume(res.volume, r3_out, "tomogram (" + res.method + ")");
            MetricReport rep;
            rep.rmse_buckets = res.rmse;
            rep.rmse_buckets_centered = res.rmse_centered;
            rep.residual_curve = res.residual_log;
            json extra = {{"method", res.method}, {"iterations", res.iterations}};
            Volume truth;
            if (!r3_truth.empty()) truth = read_volume(r3_truth);
            json slices = json::object();
            for (int s : parse_ints(r3_slices)) {
                if (s < 0 || s >= res.volume.n()) throw ParameterError("slice " + std::to_string(s) + " outside the volume");
                const float hi = truth.n() ? truth.max() : res.volume.max();
                io::write_png(with_suffix(r3_out, "_r3_" + std::to_string(s) + ".png"), res.volume.slice_r3(s), 0.0f, hi);
                if (truth.n()) slices[std::to_string(s)] = mad(res.volume.slice_r3(s), truth.slice_r3(s));
            }
            if (truth.n()) {
                rep.mad = mad(res.volume.span(), truth.span());
                rep.max_value_used_for_normalization = truth.max();
                extra["slice_mad"] = slices;
            }
            const auto mpath = r3_metrics.empty() ? with_suffix(r3_out, ".metrics.json") : r3_metrics;
            write_metrics_json(mpath, rep, extra);
            write_curve_csv(with_suffix(r3_out, ".residual.csv"), res.residual_log);
            std::printf("%s: bucket RMSE %.5g (centred %.5g)\n", res.method.c_str(), res.rmse, res.rmse_centered);
        } else if (ex->parsed()) {
            ExperimentSpec spec;
            if (!ex_spec.empty()) spec = ExperimentSpec::from_json(io::read_json(ex_spec));
            else if (!ex_kind.empty()) spec = default_spec(ex_kind);
            else throw ConfigError("experiment needs --spec or --kind");
            spec.validate();
            if (ex_print) {
                std::cout << spec.to_json().dump(2) << '\n';
                return 0;
            }
            const auto dir = run_experiment(spec, ex_out);
            std::printf("%s\n", dir.string().c_str());
        }
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "error: %s (iteration %d)\n", e.what(), e.iteration());
        return 3;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "error: %s (iteration %d)\n", e.what(), e.iteration());
        return 3;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
