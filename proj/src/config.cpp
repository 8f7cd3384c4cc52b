#include "qmssb/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "qmssb/cosmo.hpp"
#include "qmssb/epr.hpp"
#include "qmssb/error.hpp"

namespace qmssb {

using nlohmann::json;

namespace {

// Reads typed keys from one object and rejects whatever is left over.
class Section {
   public:
    Section(const json &obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) {
            throw ConfigError(path_ + ": expected an object");
        }
    }

    bool has(const std::string &key) {
        seen_.insert(key);
        return obj_.contains(key);
    }

    double number(const std::string &key, double fallback) {
        if (!has(key)) return fallback;
        const json &v = obj_.at(key);
        if (!v.is_number()) fail(key, "a number");
        return v.get<double>();
    }

    std::optional<double> optional_number(const std::string &key) {
        if (!has(key) || obj_.at(key).is_null()) return std::nullopt;
        return number(key, 0.0);
    }

    std::uint64_t unsigned_integer(const std::string &key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json &v = obj_.at(key);
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            fail(key, "a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string &key, bool fallback) {
        if (!has(key)) return fallback;
        const json &v = obj_.at(key);
        if (!v.is_boolean()) fail(key, "a boolean");
        return v.get<bool>();
    }

    std::string string(const std::string &key, const std::string &fallback) {
        if (!has(key)) return fallback;
        const json &v = obj_.at(key);
        if (!v.is_string()) fail(key, "a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string &key, const std::vector<double> &fallback) {
        if (!has(key)) return fallback;
        const json &v = obj_.at(key);
        if (!v.is_array()) fail(key, "an array of numbers");
        std::vector<double> out;
        for (const json &x : v) {
            if (!x.is_number()) fail(key, "an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    const json &child(const std::string &key) {
        seen_.insert(key);
        return obj_.at(key);
    }

    std::string path(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (const auto &item : obj_.items()) {
            if (!seen_.count(item.key())) {
                throw ConfigError("unknown key '" + path(item.key()) + "'");
            }
        }
    }

   private:
    [[noreturn]] void fail(const std::string &key, const char *what) const {
        throw ConfigError("'" + path(key) + "' must be " + what);
    }

    const json &obj_;
    std::string path_;
    std::set<std::string> seen_;
};

ApparatusParams parse_apparatus(const json &obj, const std::string &path) {
    Section s(obj, path);
    ApparatusParams p;
    p.gamma = s.number("gamma", p.gamma);
    p.lambda = s.number("lambda", p.lambda);
    p.mu = s.number("mu", p.mu);
    p.epsilon = s.number("epsilon", p.epsilon);
    p.omega = s.number("omega", p.omega);
    p.kT = s.number("kT", p.kT);
    p.b0 = s.number("b0", p.b0);
    p.c0 = s.number("c0", p.c0);
    p.g = s.number("g", p.g);
    p.eps_eff = s.optional_number("eps_eff");
    const std::vector<double> field = s.numbers("field", {p.field.x(), p.field.y(), p.field.z()});
    if (field.size() != 3) {
        throw ConfigError("'" + s.path("field") + "' must have three components");
    }
    p.field = Vec3(field[0], field[1], field[2]);
    s.finish();
    try {
        validate(p);
    } catch (const DomainError &e) {
        throw ConfigError(path + ": " + e.what());
    }
    return p;
}

MeasureBlock parse_measure(const json &obj) {
    Section s(obj, "measure");
    MeasureBlock b;
    b.polar_angle = s.number("polar_angle", b.polar_angle);
    b.azimuth = s.number("azimuth", b.azimuth);
    b.t_end = s.number("t_end", b.t_end);
    b.dt = s.number("dt", b.dt);
    s.finish();
    return b;
}

EprBlock parse_epr(const json &obj) {
    Section s(obj, "epr");
    EprBlock b;
    b.state = s.string("state", b.state);
    b.theta1_deg = s.number("theta1_deg", b.theta1_deg);
    b.theta2_deg = s.number("theta2_deg", b.theta2_deg);
    b.field_strength1 = s.number("field_strength1", b.field_strength1);
    b.field_strength2 = s.number("field_strength2", b.field_strength2);
    b.enforce_field_constraint = s.boolean("enforce_field_constraint", b.enforce_field_constraint);
    b.t_end = s.number("t_end", b.t_end);
    b.dt = s.number("dt", b.dt);
    if (s.has("apparatus2")) {
        b.apparatus2 = parse_apparatus(s.child("apparatus2"), "epr.apparatus2");
    }
    s.finish();
    return b;
}

ChshBlock parse_chsh(const json &obj) {
    Section s(obj, "chsh");
    ChshBlock b;
    b.a_deg = s.number("a_deg", b.a_deg);
    b.a_prime_deg = s.number("a_prime_deg", b.a_prime_deg);
    b.b_deg = s.number("b_deg", b.b_deg);
    b.b_prime_deg = s.number("b_prime_deg", b.b_prime_deg);
    s.finish();
    return b;
}

CosmoBlock parse_cosmo(const json &obj) {
    Section s(obj, "cosmo");
    CosmoBlock b;
    b.H = s.number("H", b.H);
    b.eta_start = s.number("eta_start", b.eta_start);
    b.eta_end = s.number("eta_end", b.eta_end);
    b.lambda = s.number("lambda", b.lambda);
    b.phi0 = s.number("phi0", b.phi0);
    b.delta_t = s.optional_number("delta_t");
    b.steps = s.unsigned_integer("steps", b.steps);
    b.include_potential = s.boolean("include_potential", b.include_potential);
    b.include_memory = s.boolean("include_memory", b.include_memory);
    b.noise_density = s.optional_number("noise_density");
    b.k_grid = s.numbers("k_grid", b.k_grid);
    s.finish();
    return b;
}

json optional_json(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::measure:
            return "measure";
        case ExperimentKind::epr:
            return "epr";
        case ExperimentKind::chsh:
            return "chsh";
        case ExperimentKind::cosmo_spectrum:
            return "cosmo-spectrum";
        case ExperimentKind::astro_constants:
            return "astro-constants";
    }
    return "?";
}

ExperimentKind parse_kind(const std::string &text) {
    for (ExperimentKind k : {ExperimentKind::measure, ExperimentKind::epr, ExperimentKind::chsh,
                             ExperimentKind::cosmo_spectrum, ExperimentKind::astro_constants}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    throw ConfigError("unknown experiment kind '" + text + "'");
}

bool is_stochastic(ExperimentKind kind) {
    return kind != ExperimentKind::astro_constants;
}

ExperimentConfig parse_config(const json &doc) {
    Section s(doc, "");
    ExperimentConfig c;
    if (!s.has("kind")) {
        throw ConfigError("missing key 'kind'");
    }
    c.kind = parse_kind(s.string("kind", ""));
    if (s.has("master_seed")) {
        c.master_seed = s.unsigned_integer("master_seed", 0);
    }
    c.n = s.unsigned_integer("n", c.n);
    c.workers = static_cast<unsigned>(s.unsigned_integer("workers", c.workers));
    c.output_dir = s.string("output_dir", c.output_dir);
    if (s.has("apparatus")) c.apparatus = parse_apparatus(s.child("apparatus"), "apparatus");
    if (s.has("measure")) c.measure = parse_measure(s.child("measure"));
    if (s.has("epr")) c.epr = parse_epr(s.child("epr"));
    if (s.has("chsh")) c.chsh = parse_chsh(s.child("chsh"));
    if (s.has("cosmo")) c.cosmo = parse_cosmo(s.child("cosmo"));
    s.finish();
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(doc);
}

json to_json(const ApparatusParams &p) {
    return json{{"gamma", p.gamma},   {"lambda", p.lambda}, {"mu", p.mu},
                {"epsilon", p.epsilon}, {"omega", p.omega},   {"kT", p.kT},
                {"b0", p.b0},         {"c0", p.c0},         {"g", p.g},
                {"eps_eff", optional_json(p.eps_eff)},
                {"field", {p.field.x(), p.field.y(), p.field.z()}}};
}

json to_json(const ExperimentConfig &c) {
    json j;
    j["kind"] = to_string(c.kind);
    if (c.master_seed) {
        j["master_seed"] = *c.master_seed;
    }
    j["n"] = c.n;
    j["workers"] = c.workers;
    j["output_dir"] = c.output_dir;
    if (c.apparatus) {
        j["apparatus"] = to_json(*c.apparatus);
    }
    if (c.measure) {
        const MeasureBlock &b = *c.measure;
        j["measure"] = {{"polar_angle", b.polar_angle}, {"azimuth", b.azimuth}, {"t_end", b.t_end}, {"dt", b.dt}};
    }
    if (c.epr) {
        const EprBlock &b = *c.epr;
        j["epr"] = {{"state", b.state},
                    {"theta1_deg", b.theta1_deg},
                    {"theta2_deg", b.theta2_deg},
                    {"field_strength1", b.field_strength1},
                    {"field_strength2", b.field_strength2},
                    {"enforce_field_constraint", b.enforce_field_constraint},
                    {"t_end", b.t_end},
                    {"dt", b.dt}};
        if (b.apparatus2) {
            j["epr"]["apparatus2"] = to_json(*b.apparatus2);
        }
    }
    if (c.chsh) {
        const ChshBlock &b = *c.chsh;
        j["chsh"] = {{"a_deg", b.a_deg}, {"a_prime_deg", b.a_prime_deg}, {"b_deg", b.b_deg}, {"b_prime_deg", b.b_prime_deg}};
    }
    if (c.cosmo) {
        const CosmoBlock &b = *c.cosmo;
        j["cosmo"] = {{"H", b.H},
                      {"eta_start", b.eta_start},
                      {"eta_end", b.eta_end},
                      {"lambda", b.lambda},
                      {"phi0", b.phi0},
                      {"delta_t", optional_json(b.delta_t)},
                      {"steps", b.steps},
                      {"include_potential", b.include_potential},
                      {"include_memory", b.include_memory},
                      {"noise_density", optional_json(b.noise_density)},
                      {"k_grid", b.k_grid}};
    }
    return j;
}

void validate(const ExperimentConfig &c) {
    auto require = [&](bool present, const char *block) {
        if (!present) {
            throw ConfigError(to_string(c.kind) + " requires a '" + block + "' block");
        }
    };
    if (is_stochastic(c.kind)) {
        if (!c.master_seed) {
            throw ConfigError(to_string(c.kind) + " requires 'master_seed' (or --seed)");
        }
        if (c.n == 0) {
            throw ConfigError("'n' must be >= 1");
        }
    }
    try {
        switch (c.kind) {
            case ExperimentKind::measure:
                require(c.apparatus.has_value(), "apparatus");
                require(c.measure.has_value(), "measure");
                if (!(c.measure->t_end > 0.0) || !(c.measure->dt > 0.0)) {
                    throw ConfigError("measure: t_end and dt must be positive");
                }
                break;
            case ExperimentKind::chsh:
                require(c.chsh.has_value(), "chsh");
                [[fallthrough]];
            case ExperimentKind::epr: {
                require(c.apparatus.has_value(), "apparatus");
                require(c.epr.has_value(), "epr");
                const std::set<std::string> states{"singlet", "triplet0", "up_up", "up_down", "mixed"};
                if (!states.count(c.epr->state)) {
                    throw ConfigError("epr.state must be one of singlet, triplet0, up_up, up_down, mixed");
                }
                if (!(c.epr->field_strength1 > 0.0) || !(c.epr->field_strength2 > 0.0)) {
                    throw ConfigError("epr: field strengths must be positive");
                }
                if (!(c.epr->t_end > 0.0) || !(c.epr->dt > 0.0)) {
                    throw ConfigError("epr: t_end and dt must be positive");
                }
                break;
            }
            case ExperimentKind::cosmo_spectrum: {
                require(c.cosmo.has_value(), "cosmo");
                const CosmoBlock &b = *c.cosmo;
                validate(InflationParams{b.H, b.eta_start, b.eta_end});
                if (!(b.H > 0.0)) {
                    throw ConfigError("cosmo.H must be positive");
                }
                if (!b.delta_t && !(b.lambda > 0.0 && b.phi0 != 0.0)) {
                    throw ConfigError("cosmo: delta_t is required when lambda or phi0 vanishes");
                }
                ReheatingParams rp{b.lambda, b.phi0, b.delta_t.value_or(1.0), b.steps,
                                   b.include_potential, b.include_memory, b.noise_density};
                validate(rp);
                if (b.k_grid.size() < 2) {
                    throw ConfigError("cosmo.k_grid needs at least two wavenumbers");
                }
                break;
            }
            case ExperimentKind::astro_constants:
                break;
        }
    } catch (const DomainError &e) {
        throw ConfigError(e.what());
    }
}

}  // namespace qmssb
