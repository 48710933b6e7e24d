// Command-line driver: runs one configured task and emits a JSON report
// (optionally a CSV table).  Exit code 0 means success, 2 means a configured
// check ran and failed its tolerance, 1 means an error.

#include <complex>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "canontrace/cache.hpp"
#include "canontrace/conformal.hpp"
#include "canontrace/heat.hpp"
#include "canontrace/laurent.hpp"
#include "canontrace/mellin.hpp"
#include "canontrace/operators.hpp"
#include "canontrace/serialize.hpp"
#include "canontrace/symbol_ops.hpp"

namespace ct = canontrace;
using nlohmann::ordered_json;

namespace {

struct RunContext {
    std::string csv_path;
    std::shared_ptr<ct::EigenCache> cache;
    std::vector<std::string> log;
};

ordered_json complex_entry(std::complex<double> v) {
    ordered_json e;
    e["re"] = v.real();
    e["im"] = v.imag();
    return e;
}

void require_no_csv(const RunContext& ctx, const std::string& task) {
    if (!ctx.csv_path.empty())
        throw std::runtime_error("--csv: the " + task + " task produces no table");
}

int run_residue(const ct::JobConfig& cfg, RunContext& ctx, ordered_json& results) {
    require_no_csv(ctx, cfg.task);
    const ct::ModelOperator op = ct::realize_operator(cfg);
    ct::ClassicalSymbol s = op.total_symbol(cfg.depth);
    if (cfg.f) {
        const ct::CoefficientField fv = cfg.f->realize(op.geom.grid);
        for (auto& comp : s.comps)
            for (auto& term : comp) term.coeff = term.coeff * fv;
    }
    const std::complex<double> res = ct::wodzicki_residue(s, op.geom.grid);
    const ct::CoefficientField dens = ct::residue_density(s);

    results["order"] = s.order;
    results["differential"] = s.is_differential();
    results["weighted"] = static_cast<bool>(cfg.f);
    results["residue"] = complex_entry(res);
    results["density_sup"] = dens.inf_norm();
    results["density_mean"] = complex_entry(dens.mean());
    ctx.log.push_back("symbol depth " + std::to_string(cfg.depth));
    return 0;
}

int run_cutoff(const ct::JobConfig& cfg, RunContext& ctx, ordered_json& results) {
    const ct::ModelOperator op = ct::realize_operator(cfg);
    const ct::ClassicalSymbol s = op.total_symbol(cfg.depth);
    const ct::CutoffProfile psi{cfg.r0, cfg.r1};

    results["order"] = s.order;
    results["profile"] = {cfg.r0, cfg.r1};
    ordered_json points = ordered_json::array();
    std::vector<std::vector<double>> rows;
    for (int x : cfg.x_indices) {
        if (x < 0 || x >= op.geom.grid.size())
            throw std::runtime_error("x_indices: index " + std::to_string(x) +
                                     " outside the grid");
        const ct::CutoffResult a = ct::cutoff_integral(s, psi, x);
        ordered_json e;
        e["x"] = x;
        e["finite_part"] = complex_entry(a.finite_part);
        e["log_coefficient"] = complex_entry(a.log_coefficient);
        e["cutoff_dependent"] = a.cutoff_dependent;
        points.push_back(std::move(e));
        rows.push_back({static_cast<double>(x), a.finite_part.real(), a.finite_part.imag(),
                        a.log_coefficient.real(), a.log_coefficient.imag()});
    }
    results["points"] = std::move(points);
    if (!ctx.csv_path.empty())
        ct::write_csv(ctx.csv_path, {"x", "finite_re", "finite_im", "log_re", "log_im"}, rows);
    ctx.log.push_back("symbol depth " + std::to_string(cfg.depth));
    return 0;
}

int run_zeta(const ct::JobConfig& cfg, RunContext& ctx, ordered_json& results) {
    ct::ModelOperator op = ct::realize_operator(cfg);
    if (ctx.cache) op.attach_cache(ctx.cache);
    const ct::MellinContinuation m =
        cfg.series == "eta" ? ct::eta_mellin(op, cfg.t0) : ct::zeta_mellin(op, cfg.t0);

    results["series"] = cfg.series;
    results["t0"] = cfg.t0;
    results["trust_floor"] = op.heat_trust_floor();
    results["channel_fit"] = ct::to_report(m.channel_fit());
    results["at_zero"] = ct::to_report(m.at_zero());

    ordered_json values = ordered_json::array();
    std::vector<std::vector<double>> rows;
    for (double z : cfg.z_values) {
        const double v = ct::regular_value(m, z);
        ordered_json e;
        e["z"] = z;
        e["regular_value"] = v;
        values.push_back(std::move(e));
        rows.push_back({z, v});
    }
    results["values"] = std::move(values);
    if (!ctx.csv_path.empty()) ct::write_csv(ctx.csv_path, {"z", "regular_value"}, rows);
    ctx.log.push_back("integration window starts at t = " + ct::double_repr(m.t_lower()));
    return 0;
}

int run_heat_fit(const ct::JobConfig& cfg, RunContext& ctx, ordered_json& results) {
    ct::ModelOperator op = ct::realize_operator(cfg);
    if (ctx.cache) op.attach_cache(ctx.cache);

    ct::HeatExpansionFit fit;
    std::string mode;
    if (cfg.signed_trace) {
        fit = ct::heat_fit_signed(op);
        mode = "signed";
    } else if (cfg.f) {
        const ct::CoefficientField fv = cfg.f->realize(op.geom.grid);
        fit = ct::heat_fit_weighted(op, fv, cfg.kernel_included);
        mode = cfg.kernel_included ? "weighted_kernel_included" : "weighted";
    } else {
        fit = ct::heat_fit(op);
        mode = "plain";
    }

    results["mode"] = mode;
    results["trust_floor"] = op.heat_trust_floor();
    results["fit"] = ct::to_report(fit);
    if (!ctx.csv_path.empty()) {
        std::vector<std::vector<double>> rows;
        for (const ct::HeatChannel& ch : fit.power_channels)
            rows.push_back({ch.exponent, ch.value});
        ct::write_csv(ctx.csv_path, {"exponent", "coefficient"}, rows);
    }
    ctx.log.push_back("fit condition " + ct::double_repr(fit.condition));
    return 0;
}

int run_laurent(const ct::JobConfig& cfg, RunContext& ctx, ordered_json& results) {
    ct::ModelOperator op = ct::realize_operator(cfg);
    if (ctx.cache) op.attach_cache(ctx.cache);

    ct::TraceFactor factor = ct::TraceFactor::identity();
    if (cfg.factor == "power")
        factor = ct::TraceFactor::power(cfg.factor_power);
    else if (cfg.factor == "weighted_power")
        factor = ct::TraceFactor::weighted_power(cfg.f->realize(op.geom.grid), cfg.factor_power);
    else if (cfg.factor == "signed_unit")
        factor = ct::TraceFactor::signed_unit();

    const ct::TracePair pair = ct::make_trace_pair(op, factor, cfg.depth);
    const ct::LaurentExpansion exp = ct::laurent_expand(pair);
    const ct::ResidueConsistency rc = ct::residue_consistency(pair);

    results["factor"] = cfg.factor;
    results["q_order"] = pair.q_order;
    results["kernel_correction"] = pair.kernel_correction;
    results["expansion"] = ct::to_report(exp);
    results["residue_consistency"] = ct::to_report(rc);
    results["canonical_trace"] = exp.coefficient(0).real() + pair.kernel_correction;
    if (!ctx.csv_path.empty()) {
        std::vector<std::vector<double>> rows;
        for (const ct::LaurentCoefficient& c : exp.coeffs)
            rows.push_back({static_cast<double>(c.k), c.value.real(), c.value.imag()});
        ct::write_csv(ctx.csv_path, {"k", "re", "im"}, rows);
    }
    ctx.log.push_back("ring fit around 0");
    return 0;
}

int run_anomaly(const ct::JobConfig& cfg, RunContext& ctx, ordered_json& results) {
    require_no_csv(ctx, cfg.task);
    const ct::ModelGeometry geom = cfg.geometry.realize();
    const ct::CoefficientField fv = cfg.f->realize(geom.grid);
    const ct::FamilyId fam =
        cfg.family == "dirac" ? ct::FamilyId::dirac_circle : ct::FamilyId::laplacian;
    const ct::FunctionalSpec spec = ct::functional_from_config(cfg);

    const ct::AnomalyReport rep = ct::anomaly_check(fam, geom, cfg.twist, spec, fv, cfg.t,
                                                    cfg.level, cfg.tolerance, ctx.cache);
    results["check"] = ct::to_report(rep);
    ctx.log.push_back("difference level " + std::to_string(rep.level) + " at t = " +
                      ct::double_repr(rep.t));
    return rep.pass ? 0 : 2;
}

int run_covariance(const ct::JobConfig& cfg, RunContext& ctx, ordered_json& results) {
    require_no_csv(ctx, cfg.task);
    ct::ModelOperator op = ct::realize_operator(cfg);
    const ct::CoefficientField fv = cfg.f->realize(op.geom.grid);
    const ct::CovariantFamily& fam = ct::registry_entry(op);
    const ct::CovarianceCheck chk = ct::covariance_residual(op, fv, cfg.t);

    const bool pass = chk.residual <= cfg.tolerance;
    results["family"] = fam.name;
    results["bidegree"] = {fam.a, fam.b};
    results["check"] = ct::to_report(chk);
    results["tolerance"] = cfg.tolerance;
    results["pass"] = pass;
    return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"canonical-trace calculus on model geometries"};
    std::string task, config_path, out_path, csv_path, cache_dir;
    app.add_option("task", task,
                   "residue|cutoff|zeta|heat-fit|laurent|anomaly|covariance")
        ->required();
    app.add_option("--config", config_path, "JSON job configuration")->required();
    app.add_option("--out", out_path, "report path (default: stdout)");
    app.add_option("--csv", csv_path, "CSV table path (tasks with a table)");
    app.add_option("--cache", cache_dir, "eigendecomposition cache directory");
    CLI11_PARSE(app, argc, argv);

    try {
        const ct::JobConfig cfg = ct::load_job_config(config_path);
        if (cfg.task != task)
            throw std::runtime_error("config task \"" + cfg.task +
                                     "\" does not match the requested task \"" + task + "\"");

        RunContext ctx;
        ctx.csv_path = csv_path;
        if (!cache_dir.empty()) ctx.cache = std::make_shared<ct::EigenCache>(cache_dir);

        ordered_json report = ct::make_report(cfg.task);
        ordered_json results;
        int code = 0;
        if (cfg.task == "residue")
            code = run_residue(cfg, ctx, results);
        else if (cfg.task == "cutoff")
            code = run_cutoff(cfg, ctx, results);
        else if (cfg.task == "zeta")
            code = run_zeta(cfg, ctx, results);
        else if (cfg.task == "heat-fit")
            code = run_heat_fit(cfg, ctx, results);
        else if (cfg.task == "laurent")
            code = run_laurent(cfg, ctx, results);
        else if (cfg.task == "anomaly")
            code = run_anomaly(cfg, ctx, results);
        else if (cfg.task == "covariance")
            code = run_covariance(cfg, ctx, results);

        if (ctx.cache)
            ctx.log.push_back("cache: " + std::to_string(ctx.cache->hits()) + " hits, " +
                              std::to_string(ctx.cache->misses()) + " misses");
        report["results"] = std::move(results);
        report["log"] = ctx.log;
        ct::write_json(report, out_path);
        return code;
    } catch (const std::exception& e) {
        std::cerr << "canontrace: error: " << e.what() << "\n";
        return 1;
    }
}
