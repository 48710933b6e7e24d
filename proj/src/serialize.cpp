#include "canontrace/serialize.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <stdexcept>
#include <utility>

#include "canontrace/random_fields.hpp"

namespace canontrace {

namespace {

using nlohmann::json;

// Wrapper that records which keys a parser consumed and rejects the rest, so
// misspelled or misplaced options fail loudly instead of being ignored.
class StrictObject {
public:
    StrictObject(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object())
            throw std::runtime_error(where_ + ": expected a JSON object");
    }

    const json* optional(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key) {
        const json* p = optional(key);
        if (!p)
            throw std::runtime_error(where_ + ": missing required key \"" + key + "\"");
        return *p;
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (seen_.count(item.key()) == 0)
                throw std::runtime_error(where_ + ": unknown key \"" + item.key() + "\"");
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

double get_number(const json& v, const std::string& where) {
    if (!v.is_number())
        throw std::runtime_error(where + ": expected a number");
    return v.get<double>();
}

int get_int(const json& v, const std::string& where) {
    if (!v.is_number_integer())
        throw std::runtime_error(where + ": expected an integer");
    return v.get<int>();
}

std::uint64_t get_u64(const json& v, const std::string& where) {
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0 &&
                                   !v.is_number_unsigned()))
        throw std::runtime_error(where + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

bool get_bool(const json& v, const std::string& where) {
    if (!v.is_boolean())
        throw std::runtime_error(where + ": expected a boolean");
    return v.get<bool>();
}

std::string get_string(const json& v, const std::string& where) {
    if (!v.is_string())
        throw std::runtime_error(where + ": expected a string");
    return v.get<std::string>();
}

FieldSpec parse_field_spec(const json& j, const std::string& where) {
    StrictObject o(j, where);
    FieldSpec fs;
    int forms = 0;

    if (const json* c = o.optional("constant")) {
        fs.kind = FieldSpec::Kind::constant;
        fs.value = get_number(*c, where + ".constant");
        ++forms;
    }
    if (const json* m = o.optional("modes")) {
        fs.kind = FieldSpec::Kind::modes;
        if (!m->is_array() || m->empty())
            throw std::runtime_error(where + ".modes: expected a non-empty array");
        int idx = 0;
        for (const json& entry : *m) {
            const std::string mw = where + ".modes[" + std::to_string(idx++) + "]";
            StrictObject mo(entry, mw);
            FieldSpec::Mode mode;
            const json& mj = mo.require("m");
            if (!mj.is_array() || mj.empty() || mj.size() > 2)
                throw std::runtime_error(mw + ".m: expected one or two integers");
            mode.m1 = get_int(mj.at(0), mw + ".m");
            if (mj.size() == 2) mode.m2 = get_int(mj.at(1), mw + ".m");
            if (mode.m1 == 0 && mode.m2 == 0)
                throw std::runtime_error(mw + ": the zero mode is a constant; use \"constant\"");
            mode.re = get_number(mo.require("re"), mw + ".re");
            if (const json* im = mo.optional("im")) mode.im = get_number(*im, mw + ".im");
            mo.finish();
            fs.modes.push_back(mode);
        }
        ++forms;
    }
    if (const json* r = o.optional("random")) {
        fs.kind = FieldSpec::Kind::random;
        StrictObject ro(*r, where + ".random");
        fs.band = get_int(ro.require("band"), where + ".random.band");
        fs.amplitude = get_number(ro.require("amplitude"), where + ".random.amplitude");
        fs.seed = get_u64(ro.require("seed"), where + ".random.seed");
        ro.finish();
        ++forms;
    }

    o.finish();
    if (forms != 1)
        throw std::runtime_error(where +
                                 ": exactly one of \"constant\", \"modes\", \"random\" is required");
    return fs;
}

GeometryConfig parse_geometry(const json& j) {
    StrictObject o(j, "geometry");
    GeometryConfig g;

    const std::string kind = get_string(o.require("kind"), "geometry.kind");
    if (kind == "circle")
        g.kind = GeometryKind::circle;
    else if (kind == "torus")
        g.kind = GeometryKind::torus;
    else
        throw std::runtime_error("geometry.kind: expected \"circle\" or \"torus\"");
    const std::size_t arity = g.kind == GeometryKind::circle ? 1 : 2;

    const json& lj = o.require("lengths");
    if (!lj.is_array() || lj.size() != arity)
        throw std::runtime_error("geometry.lengths: expected " + std::to_string(arity) +
                                 " entries for a " + kind);
    for (const json& v : lj) {
        const double len = get_number(v, "geometry.lengths");
        if (!(len > 0.0))
            throw std::runtime_error("geometry.lengths: entries must be positive");
        g.lengths.push_back(len);
    }

    const json& pj = o.require("points");
    if (!pj.is_array() || pj.size() != arity)
        throw std::runtime_error("geometry.points: expected " + std::to_string(arity) +
                                 " entries for a " + kind);
    for (const json& v : pj) g.points.push_back(get_int(v, "geometry.points"));

    if (const json* phi = o.optional("phi")) g.phi = parse_field_spec(*phi, "geometry.phi");

    o.finish();
    return g;
}

}  // namespace

CoefficientField FieldSpec::realize(const GridSpec& spec) const {
    switch (kind) {
        case Kind::constant:
            return CoefficientField::constant(value);
        case Kind::random:
            return random_band_limited(spec, band, amplitude, seed);
        case Kind::modes: {
            std::vector<double> v(static_cast<std::size_t>(spec.size()), 0.0);
            for (const Mode& m : modes) {
                if (spec.dim == 1 && m.m2 != 0)
                    throw std::runtime_error("field mode has a second index on a circle");
                if (2 * std::abs(m.m1) >= spec.n1 || (spec.dim == 2 && 2 * std::abs(m.m2) >= spec.n2))
                    throw std::runtime_error("field mode exceeds the grid Nyquist limit");
                for (int i2 = 0; i2 < spec.n2; ++i2)
                    for (int i1 = 0; i1 < spec.n1; ++i1) {
                        const double ang = two_pi * (static_cast<double>(m.m1) * i1 / spec.n1 +
                                                     static_cast<double>(m.m2) * i2 / spec.n2);
                        v[static_cast<std::size_t>(i1 + spec.n1 * i2)] +=
                            2.0 * (m.re * std::cos(ang) - m.im * std::sin(ang));
                    }
            }
            return CoefficientField::from_real(spec, v);
        }
    }
    throw std::logic_error("unhandled field kind");
}

GridSpec GeometryConfig::grid() const {
    GridSpec g;
    if (kind == GeometryKind::circle) {
        g.dim = 1;
        g.n1 = points.at(0);
        g.n2 = 1;
        g.len1 = lengths.at(0);
        g.len2 = 1.0;
    } else {
        g.dim = 2;
        g.n1 = points.at(0);
        g.n2 = points.at(1);
        g.len1 = lengths.at(0);
        g.len2 = lengths.at(1);
    }
    return g;
}

ModelGeometry GeometryConfig::realize() const {
    const GridSpec g = grid();
    CoefficientField p = phi.realize(g);
    return kind == GeometryKind::circle ? make_circle(g.n1, g.len1, std::move(p))
                                        : make_torus(g.n1, g.n2, g.len1, g.len2, std::move(p));
}

JobConfig parse_job_config(const json& j) {
    StrictObject o(j, "config");
    JobConfig c;

    c.task = get_string(o.require("task"), "task");
    static const std::set<std::string> known_tasks = {
        "residue", "cutoff", "zeta", "heat-fit", "laurent", "anomaly", "covariance"};
    if (known_tasks.count(c.task) == 0)
        throw std::runtime_error("task: unknown task \"" + c.task + "\"");

    c.geometry = parse_geometry(o.require("geometry"));

    if (const json* v = o.optional("family")) {
        c.family = get_string(*v, "family");
        if (c.family != "laplacian" && c.family != "dirac")
            throw std::runtime_error("family: expected \"laplacian\" or \"dirac\"");
    }
    if (const json* v = o.optional("twist")) {
        if (c.family != "dirac")
            throw std::runtime_error("twist: applies to the dirac family only");
        c.twist = get_number(*v, "twist");
    }
    if (const json* v = o.optional("power")) {
        if (c.family != "laplacian")
            throw std::runtime_error("power: real powers are built over the laplacian family");
        if (c.task != "residue" && c.task != "cutoff")
            throw std::runtime_error(
                "power: only the symbol-level tasks (residue, cutoff) act on real powers");
        c.power = get_number(*v, "power");
    }
    if (c.family == "dirac" && c.geometry.kind != GeometryKind::circle)
        throw std::runtime_error("family: the dirac family lives on the circle");

    const auto parse_f = [&](bool required) {
        if (const json* v = o.optional("f"))
            c.f = parse_field_spec(*v, "f");
        else if (required)
            throw std::runtime_error("f: the " + c.task + " task needs a direction field");
    };
    const auto parse_depth = [&]() {
        if (const json* v = o.optional("depth")) {
            c.depth = get_int(*v, "depth");
            if (c.depth < 0 || c.depth > 8)
                throw std::runtime_error("depth: expected a value in [0, 8]");
        }
    };
    const auto parse_t = [&]() {
        if (const json* v = o.optional("t")) {
            c.t = get_number(*v, "t");
            if (!(c.t > 0.0)) throw std::runtime_error("t: expected a positive number");
        }
    };
    const auto parse_tolerance = [&]() {
        if (const json* v = o.optional("tolerance")) {
            c.tolerance = get_number(*v, "tolerance");
            if (!(c.tolerance > 0.0))
                throw std::runtime_error("tolerance: expected a positive number");
        }
    };

    if (c.task == "residue") {
        parse_depth();
        parse_f(false);
    } else if (c.task == "cutoff") {
        parse_depth();
        if (const json* v = o.optional("r0")) c.r0 = get_number(*v, "r0");
        if (const json* v = o.optional("r1")) c.r1 = get_number(*v, "r1");
        if (!(0.0 < c.r0 && c.r0 < c.r1))
            throw std::runtime_error("cutoff profile: need 0 < r0 < r1");
        if (const json* v = o.optional("x_indices")) {
            if (!v->is_array()) throw std::runtime_error("x_indices: expected an array");
            for (const json& e : *v) c.x_indices.push_back(get_int(e, "x_indices"));
        }
        if (c.x_indices.empty()) c.x_indices.push_back(0);
    } else if (c.task == "zeta") {
        if (const json* v = o.optional("series")) {
            c.series = get_string(*v, "series");
            if (c.series != "zeta" && c.series != "eta")
                throw std::runtime_error("series: expected \"zeta\" or \"eta\"");
        }
        if (c.series == "eta" && c.family != "dirac")
            throw std::runtime_error("series: eta needs a signed spectrum (dirac family)");
        if (const json* v = o.optional("z_values")) {
            if (!v->is_array()) throw std::runtime_error("z_values: expected an array");
            for (const json& e : *v) c.z_values.push_back(get_number(e, "z_values"));
        }
        if (const json* v = o.optional("t0")) {
            c.t0 = get_number(*v, "t0");
            if (!(c.t0 > 0.0)) throw std::runtime_error("t0: expected a positive number");
        }
    } else if (c.task == "heat-fit") {
        parse_f(false);
        if (const json* v = o.optional("kernel_included")) {
            c.kernel_included = get_bool(*v, "kernel_included");
            if (!c.f)
                throw std::runtime_error("kernel_included: only the weighted fit takes this switch");
        }
        if (const json* v = o.optional("signed_trace")) {
            c.signed_trace = get_bool(*v, "signed_trace");
            if (c.signed_trace && c.family != "dirac")
                throw std::runtime_error("signed_trace: needs a signed spectrum (dirac family)");
            if (c.signed_trace && c.f)
                throw std::runtime_error("signed_trace: the signed fit is not weighted");
        }
    } else if (c.task == "laurent") {
        parse_depth();
        parse_f(false);
        if (const json* v = o.optional("factor")) c.factor = get_string(*v, "factor");
        static const std::set<std::string> factors = {"identity", "power", "weighted_power",
                                                      "signed_unit"};
        if (factors.count(c.factor) == 0)
            throw std::runtime_error("factor: unknown trace factor \"" + c.factor + "\"");
        if (const json* v = o.optional("factor_power")) {
            if (c.factor != "power" && c.factor != "weighted_power")
                throw std::runtime_error("factor_power: only power factors take an exponent");
            c.factor_power = get_number(*v, "factor_power");
        }
        if (c.factor == "weighted_power" && !c.f)
            throw std::runtime_error("factor: weighted_power needs the field \"f\"");
        if (c.factor == "signed_unit" && c.family != "dirac")
            throw std::runtime_error("factor: signed_unit needs the dirac family");
    } else if (c.task == "anomaly") {
        parse_f(true);
        parse_depth();
        parse_t();
        parse_tolerance();
        if (const json* v = o.optional("functional")) c.functional = get_string(*v, "functional");
        static const std::set<std::string> functionals = {"zeta0", "zeta_prime0", "eta0",
                                                          "res_power", "trace"};
        if (functionals.count(c.functional) == 0)
            throw std::runtime_error("functional: unknown functional \"" + c.functional + "\"");
        if (const json* v = o.optional("functional_exponent")) {
            if (c.functional != "res_power")
                throw std::runtime_error(
                    "functional_exponent: only res_power takes an exponent");
            c.functional_exponent = get_number(*v, "functional_exponent");
        }
        if (const json* v = o.optional("level")) {
            c.level = get_int(*v, "level");
            if (c.level != 1 && c.level != 2)
                throw std::runtime_error("level: expected 1 or 2");
        }
    } else if (c.task == "covariance") {
        parse_f(true);
        parse_t();
        parse_tolerance();
    }

    o.finish();
    return c;
}

JobConfig load_job_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    in >> j;
    return parse_job_config(j);
}

ModelOperator realize_operator(const JobConfig& cfg) {
    ModelGeometry geom = cfg.geometry.realize();
    const FamilyId fam =
        cfg.family == "dirac" ? FamilyId::dirac_circle : FamilyId::laplacian;
    ModelOperator op = build_operator(fam, geom, cfg.family == "dirac" ? cfg.twist : 0.0);
    if (cfg.power && *cfg.power != 1.0) return power_operator(op, *cfg.power);
    return op;
}

FunctionalSpec functional_from_config(const JobConfig& cfg) {
    FunctionalSpec spec;
    if (cfg.functional == "zeta0")
        spec.kind = FunctionalKind::zeta_zero;
    else if (cfg.functional == "zeta_prime0")
        spec.kind = FunctionalKind::zeta_prime_zero;
    else if (cfg.functional == "eta0")
        spec.kind = FunctionalKind::eta_zero;
    else if (cfg.functional == "res_power") {
        spec.kind = FunctionalKind::residue_of_power;
        spec.exponent = cfg.functional_exponent;
    } else if (cfg.functional == "trace")
        spec.kind = FunctionalKind::trace_of_operator;
    else
        throw std::runtime_error("unknown functional \"" + cfg.functional + "\"");
    return spec;
}

nlohmann::ordered_json make_report(const std::string& task) {
    nlohmann::ordered_json r;
    r["schema_version"] = 1;
    r["tool"] = "canontrace";
    r["task"] = task;
    return r;
}

nlohmann::ordered_json to_report(const HeatExpansionFit& fit) {
    nlohmann::ordered_json r;
    r["window"] = {fit.eps_lo, fit.eps_hi};
    nlohmann::ordered_json channels = nlohmann::ordered_json::array();
    for (const HeatChannel& ch : fit.power_channels) {
        nlohmann::ordered_json c;
        c["exponent"] = ch.exponent;
        c["value"] = ch.value;
        channels.push_back(std::move(c));
    }
    r["channels"] = std::move(channels);
    nlohmann::ordered_json logs = nlohmann::ordered_json::array();
    for (const HeatLogChannel& ch : fit.log_channels) {
        nlohmann::ordered_json c;
        c["power"] = ch.power;
        c["value"] = ch.value;
        logs.push_back(std::move(c));
    }
    r["log_channels"] = std::move(logs);
    r["residual_rms"] = fit.residual_rms;
    r["condition"] = fit.condition;
    return r;
}

nlohmann::ordered_json to_report(const MellinAtZero& at) {
    nlohmann::ordered_json r;
    r["residue"] = at.residue;
    r["value"] = at.value;
    r["derivative"] = at.derivative;
    return r;
}

nlohmann::ordered_json to_report(const LaurentExpansion& exp) {
    nlohmann::ordered_json r;
    r["pole_order"] = exp.pole_order;
    nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
    for (const LaurentCoefficient& c : exp.coeffs) {
        nlohmann::ordered_json e;
        e["k"] = c.k;
        e["re"] = c.value.real();
        e["im"] = c.value.imag();
        e["provenance"] = c.provenance == Provenance::symbolic ? "symbolic" : "spectral";
        coeffs.push_back(std::move(e));
    }
    r["coefficients"] = std::move(coeffs);
    return r;
}

nlohmann::ordered_json to_report(const ResidueConsistency& rc) {
    nlohmann::ordered_json r;
    r["symbolic"] = rc.symbolic;
    r["spectral"] = rc.spectral;
    r["gap"] = rc.gap;
    return r;
}

nlohmann::ordered_json to_report(const AnomalyReport& rep) {
    nlohmann::ordered_json r;
    r["functional"] = rep.functional;
    r["family"] = rep.family;
    r["bidegree"] = {rep.a, rep.b};
    r["t"] = rep.t;
    r["level"] = rep.level;
    r["lhs"] = rep.lhs;
    r["rhs"] = rep.rhs;
    r["abs_gap"] = rep.abs_gap;
    r["rel_gap"] = rep.rel_gap;
    r["truncation_estimate"] = rep.truncation_estimate;
    r["tolerance"] = rep.tolerance;
    r["pass"] = rep.pass;
    return r;
}

nlohmann::ordered_json to_report(const CovarianceCheck& chk) {
    nlohmann::ordered_json r;
    r["residual"] = chk.residual;
    r["operator_norm"] = chk.operator_norm;
    r["t"] = chk.t;
    return r;
}

nlohmann::ordered_json to_report(const PointwiseResidueCheck& chk) {
    nlohmann::ordered_json r;
    r["sup_gap"] = chk.sup_gap;
    r["sup_density"] = chk.sup_density;
    r["level"] = chk.level;
    return r;
}

std::string double_repr(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (res.ec != std::errc())
        throw std::runtime_error("double_repr: formatting failed");
    return std::string(buf.data(), res.ptr);
}

void write_json(const nlohmann::ordered_json& doc, const std::string& path) {
    const std::string text = doc.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    if (path.empty()) throw std::runtime_error("write_csv: empty path");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open csv file: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const std::vector<double>& row : rows) {
        if (row.size() != header.size())
            throw std::runtime_error("write_csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << double_repr(row[i]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("failed writing csv file: " + path);
}

}  // namespace canontrace
