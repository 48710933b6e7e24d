#pragma once

// JSON job configurations and result reports for the command-line driver.
//
// Configurations are parsed strictly: an unrecognized key at any level is an
// error, as is a key that the selected task does not use.  Reports are
// emitted as ordered JSON with a schema_version field so downstream tooling
// can detect layout changes; numeric tables can additionally be written as
// CSV with shortest round-trip decimal formatting.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "canontrace/conformal.hpp"
#include "canontrace/geometry.hpp"
#include "canontrace/heat.hpp"
#include "canontrace/laurent.hpp"
#include "canontrace/mellin.hpp"
#include "canontrace/operators.hpp"

namespace canontrace {

// A real scalar field given either as a constant, as an explicit list of
// Fourier modes (each entry m contributes 2*(re cos - im sin) of angle
// 2 pi (m1 x1/L1 + m2 x2/L2), so the field is real by construction), or as a
// seeded random band-limited draw.
struct FieldSpec {
    enum class Kind { constant, modes, random };
    struct Mode {
        int m1 = 0;
        int m2 = 0;
        double re = 0.0;
        double im = 0.0;
    };

    Kind kind = Kind::constant;
    double value = 0.0;
    std::vector<Mode> modes;
    int band = 1;
    double amplitude = 0.1;
    std::uint64_t seed = 1;

    CoefficientField realize(const GridSpec& spec) const;
};

struct GeometryConfig {
    GeometryKind kind = GeometryKind::circle;
    std::vector<double> lengths;  // one entry (circle) or two (torus)
    std::vector<int> points;      // grid points per axis, same arity
    FieldSpec phi;                // conformal factor, default constant 0

    GridSpec grid() const;
    ModelGeometry realize() const;
};

// One task invocation.  The flat option block is validated per task at parse
// time, so a configuration cannot silently carry options the task ignores.
struct JobConfig {
    std::string task;  // residue|cutoff|zeta|heat-fit|laurent|anomaly|covariance
    GeometryConfig geometry;
    std::string family = "laplacian";  // laplacian | dirac
    double twist = 0.5;                // dirac holonomy
    std::optional<double> power;       // replace Q by Q^power

    std::optional<FieldSpec> f;  // weight / conformal direction

    // zeta
    std::string series = "zeta";  // zeta | eta
    std::vector<double> z_values;
    double t0 = 1.0;

    // heat-fit
    bool kernel_included = false;
    bool signed_trace = false;

    // laurent
    std::string factor = "identity";  // identity|power|weighted_power|signed_unit
    double factor_power = 0.0;

    // anomaly
    std::string functional = "zeta0";  // zeta0|zeta_prime0|eta0|res_power|trace
    double functional_exponent = 1.0;
    int level = 2;

    // anomaly, covariance, residue variation
    double t = 1e-3;
    double tolerance = 1e-6;

    // symbol work
    int depth = 4;
    double r0 = 0.5;
    double r1 = 1.0;
    std::vector<int> x_indices;  // cutoff probes, default {0}
};

JobConfig parse_job_config(const nlohmann::json& j);
JobConfig load_job_config(const std::string& path);

// Operator described by the configuration (geometry, family, twist, power).
ModelOperator realize_operator(const JobConfig& cfg);
FunctionalSpec functional_from_config(const JobConfig& cfg);

// Report skeleton: schema_version, tool name and task, ready for a "results"
// block.
nlohmann::ordered_json make_report(const std::string& task);

nlohmann::ordered_json to_report(const HeatExpansionFit& fit);
nlohmann::ordered_json to_report(const MellinAtZero& at);
nlohmann::ordered_json to_report(const LaurentExpansion& exp);
nlohmann::ordered_json to_report(const ResidueConsistency& rc);
nlohmann::ordered_json to_report(const AnomalyReport& rep);
nlohmann::ordered_json to_report(const CovarianceCheck& chk);
nlohmann::ordered_json to_report(const PointwiseResidueCheck& chk);

// Shortest decimal representation that parses back to the same double.
std::string double_repr(double v);

// Pretty-printed JSON to the path, or to stdout when path is empty or "-".
void write_json(const nlohmann::ordered_json& doc, const std::string& path);

// CSV with a header row; every data cell uses double_repr.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace canontrace
