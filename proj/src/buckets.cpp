#include "gtomo/buckets.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "gtomo/io.hpp"
#include "gtomo/rng.hpp"

namespace gtomo {

using nlohmann::json;

std::string to_string(BucketModel model) {
    return model == BucketModel::attenuation ? "attenuation" : "transmission";
}

BucketModel bucket_model_from_string(const std::string& s) {
    if (s == "attenuation") return BucketModel::attenuation;
    if (s == "transmission") return BucketModel::transmission;
    throw ParameterError("unknown bucket model '" + s + "'");
}

namespace {
void check_same(const Image& a, const Image& b) {
    if (a.n() != b.n())
        throw ShapeError("pattern is " + std::to_string(a.n()) + "^2 but projection is " +
                         std::to_string(b.n()) + "^2");
}
}  // namespace

double bucket_attenuation(const Image& pattern, const Image& proj) {
    check_same(pattern, proj);
    return dot(pattern.span(), proj.span());
}

double bucket_transmission(const Image& pattern, const Image& proj) {
    check_same(pattern, proj);
    double s = 0;
    for (std::size_t i = 0; i < proj.size(); ++i)
        s += static_cast<double>(pattern.data()[i]) * std::exp(-static_cast<double>(proj.data()[i]));
    return s;
}

json PatternSource::to_json() const {
    return {{"type", type}, {"policy", policy}, {"n", n}, {"per_angle", per_angle}, {"seed", seed},
            {"mean", mean}, {"mask_kind", gtomo::to_string(mask_kind)}, {"mask_param", mask_param}};
}

PatternSource PatternSource::from_json(const json& j) {
    PatternSource s;
    s.type = j.value("type", s.type);
    s.policy = j.value("policy", s.policy);
    s.n = j.value("n", s.n);
    s.per_angle = j.value("per_angle", s.per_angle);
    s.seed = j.value("seed", s.seed);
    s.mean = j.value("mean", s.mean);
    s.mask_kind = mask_kind_from_string(j.value("mask_kind", std::string("random")));
    s.mask_param = j.value("mask_param", s.mask_param);
    return s;
}

int Campaign::per_angle() const {
    return patterns.empty() ? 0 : patterns.front()->count();
}

void Campaign::validate(int n) const {
    angles.validate();
    if (static_cast<int>(patterns.size()) != angles.size())
        throw ConfigError("campaign needs one pattern set per angle (" + std::to_string(angles.size()) +
                          "), got " + std::to_string(patterns.size()));
    for (const auto& p : patterns) {
        if (!p) throw ConfigError("campaign has a missing pattern set");
        if (p->n() != n) throw ShapeError("pattern side does not match volume side");
        if (p->count() != per_angle()) throw ConfigError("all angles must carry the same number of buckets");
    }
}

std::string Campaign::digest() const {
    const json j = {{"angles", angles.angles}, {"axis_offset", angles.axis_offset},
                    {"source", source.to_json()}, {"model", to_string(model)}};
    return io::digest_hex(j.dump());
}

namespace {

std::shared_ptr<const PatternSet> make_set(const PatternSource& src, std::uint64_t seed, const Mask* base) {
    if (src.type == "random")
        return std::make_shared<const PatternSet>(PatternSet::random(src.n, src.per_angle, seed, src.mean));
    return std::make_shared<const PatternSet>(
        PatternSet::from_ensemble(shift_ensemble(*base, src.per_angle, ShiftSelection::random, seed)));
}

Mask base_mask(const PatternSource& src) {
    switch (src.mask_kind) {
        case MaskKind::random: return random_mask(src.n, src.mask_param, src.mean);
        case MaskKind::mura: return mura_mask(src.n);
        case MaskKind::frt: return frt_mask(src.n);
    }
    throw ParameterError("unknown mask kind");
}

}  // namespace

Campaign make_campaign(const AngleSet& angles, const PatternSource& source, BucketModel model) {
    if (source.type != "random" && source.type != "shifted")
        throw ParameterError("pattern source type must be 'random' or 'shifted'");
    if (source.policy != "same" && source.policy != "different")
        throw ParameterError("pattern policy must be 'same' or 'different'");
    if (source.per_angle < 1) throw ParameterError("need at least one bucket per angle");
    angles.validate();
    Campaign c{angles, {}, model, source};
    std::optional<Mask> base;
    if (source.type == "shifted") {
        base = base_mask(source);
        if (source.per_angle > source.n * source.n)
            shift_ensemble(*base, source.per_angle, ShiftSelection::random, 0);  // raises CapacityError
    }
    const Mask* bp = base ? &*base : nullptr;
    if (source.policy == "same") {
        auto shared = make_set(source, derive_seed(source.seed, 0), bp);
        c.patterns.assign(static_cast<std::size_t>(angles.size()), shared);
    } else {
        for (int a = 0; a < angles.size(); ++a)
            c.patterns.push_back(make_set(source, derive_seed(source.seed, static_cast<std::uint64_t>(a)), bp));
    }
    return c;
}

std::vector<BucketRecord> measure_campaign(const ProjectionStack& projs, const Campaign& campaign) {
    campaign.validate(projs.n);
    if (projs.count() != campaign.angles.size()) throw ShapeError("projection count does not match campaign");
    std::map<const PatternSet*, int> ids;
    std::vector<BucketRecord> records;
    records.reserve(static_cast<std::size_t>(campaign.angles.size()) * campaign.per_angle());
    std::vector<float> values;
    std::vector<float> trans;
    for (int a = 0; a < campaign.angles.size(); ++a) {
        const auto& set = *campaign.patterns[static_cast<std::size_t>(a)];
        const int id = ids.emplace(&set, static_cast<int>(ids.size())).first->second;
        values.resize(static_cast<std::size_t>(set.count()));
        auto img = projs.image(a);
        if (campaign.model == BucketModel::attenuation) {
            set.measure(img, values);
        } else {
            trans.resize(img.size());
            for (std::size_t i = 0; i < img.size(); ++i) trans[i] = std::exp(-img[i]);
            set.measure(trans, values);
        }
        for (int j = 0; j < set.count(); ++j) {
            BucketRecord r;
            r.value = values[static_cast<std::size_t>(j)];
            r.angle_index = a;
            r.ensemble_id = id;
            r.pattern_index = j;
            if (!set.shifts().empty()) r.shift = set.shifts()[static_cast<std::size_t>(j)];
            r.model = campaign.model;
            records.push_back(r);
        }
    }
    return records;
}

std::vector<BucketRecord> run_campaign(const Volume& vol, const Campaign& campaign) {
    campaign.validate(vol.n());
    return measure_campaign(Projector(vol.n(), campaign.angles).project(vol), campaign);
}

std::vector<std::vector<float>> values_by_angle(const std::vector<BucketRecord>& records, int angle_count) {
    std::vector<std::vector<float>> out(static_cast<std::size_t>(angle_count));
    for (const auto& r : records) {
        if (r.angle_index < 0 || r.angle_index >= angle_count)
            throw ShapeError("bucket record angle index " + std::to_string(r.angle_index) + " out of range");
        out[static_cast<std::size_t>(r.angle_index)].push_back(static_cast<float>(r.value));
    }
    return out;
}

void write_buckets(const std::filesystem::path& path, const std::vector<BucketRecord>& records,
                   const Campaign& campaign) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "j,angle_index,shift_dy1,shift_dy2,value\n";
    char buf[64];
    for (std::size_t j = 0; j < records.size(); ++j) {
        const auto& r = records[j];
        std::snprintf(buf, sizeof buf, "%.17g", r.value);
        out << j << ',' << r.angle_index << ',' << r.shift.dy1 << ',' << r.shift.dy2 << ',' << buf << '\n';
    }
    if (!out) throw IoError("short write to '" + path.string() + "'");
    io::write_json(io::sidecar_path(path),
                   {{"model", to_string(campaign.model)},
                    {"seeds", {{"pattern_seed", campaign.source.seed}, {"mask_param", campaign.source.mask_param}}},
                    {"campaign_digest", campaign.digest()},
                    {"M", campaign.angles.size()},
                    {"N", campaign.per_angle()},
                    {"angles", campaign.angles.angles},
                    {"axis_offset", campaign.angles.axis_offset},
                    {"source", campaign.source.to_json()}});
}

BucketDataset read_buckets(const std::filesystem::path& path) {
    BucketDataset ds;
    ds.header = io::read_json(io::sidecar_path(path));
    const auto model = bucket_model_from_string(ds.header.value("model", std::string("attenuation")));
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    std::getline(in, line);
    std::map<int, int> next_index;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string f[5];
        for (auto& s : f)
            if (!std::getline(ss, s, ',')) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 5 fields");
        BucketRecord r;
        try {
            r.angle_index = std::stoi(f[1]);
            r.shift = {std::stoi(f[2]), std::stoi(f[3])};
            r.value = std::stod(f[4]);
        } catch (const std::exception&) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
        }
        r.pattern_index = next_index[r.angle_index]++;
        r.model = model;
        ds.records.push_back(r);
    }
    return ds;
}

Campaign campaign_from_header(const json& header) {
    AngleSet angles{header.at("angles").get<std::vector<double>>(), header.at("axis_offset").get<double>()};
    return make_campaign(angles, PatternSource::from_json(header.at("source")),
                         bucket_model_from_string(header.value("model", std::string("attenuation"))));
}

}  // namespace gtomo
