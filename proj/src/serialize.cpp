#include "mlab/serialize.hpp"

#include "mlab/error.hpp"

namespace mlab {

namespace {

json finite_or_string(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

double number(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "Infinity") return kInf;
        return std::stod(s);
    }
    return j.get<double>();
}

}  // namespace

void to_json(json& j, const ModelParams& mp) {
    j = {{"h", mp.h}, {"lambda", mp.lambda}, {"rho", mp.rho}, {"m", finite_or_string(mp.m)}};
}

void from_json(const json& j, ModelParams& mp) {
    if (!j.is_object()) throw PreconditionError("model parameters must be a JSON object");
    if (j.contains("h")) mp.h = number(j.at("h"));
    if (j.contains("lambda")) mp.lambda = number(j.at("lambda"));
    if (j.contains("rho")) mp.rho = number(j.at("rho"));
    if (j.contains("m")) mp.m = number(j.at("m"));
}

void to_json(json& j, const PatternParams& pp) {
    j = {{"n", pp.n}, {"k", pp.k}, {"delta", pp.delta}, {"regime", to_string(pp.regime)}};
}

void to_json(json& j, const EnergyReport& r) {
    j = {{"membrane_tt", r.membrane_tt}, {"membrane_zz", r.membrane_zz}, {"membrane_tz", r.membrane_tz},
         {"bending", r.bending},         {"total", r.total},             {"bulk", r.bulk},
         {"excess", r.excess},           {"slope_linf", r.slope_linf},   {"admissible", r.admissible},
         {"violations", r.violations}};
}

void to_json(json& j, const ScalingPrediction& p) {
    j = {{"model", to_string(p.model)},
         {"branch", to_string(p.branch)},
         {"value", p.value},
         {"lower", p.lower},
         {"upper", p.upper},
         {"hypothesis_ok", p.hypothesis_ok},
         {"active_inequalities", p.active_inequalities}};
}

void to_json(json& j, const BlowupPrediction& b) {
    j = {{"rate", b.rate}, {"hypothesis_ok", b.hypothesis_ok}, {"h_threshold", b.threshold}};
}

void to_json(json& j, const Equivalence& e) {
    j = {{"name", e.name},           {"lhs", e.lhs},           {"rhs", e.rhs},
         {"lhs_holds", e.lhs_holds}, {"rhs_holds", e.rhs_holds}, {"agree", e.agree}};
}

void to_json(json& j, const BoundaryReport& r) { j = {{"equivalences", r.equivalences}, {"all_agree", r.all_agree}}; }

void to_json(json& j, const CertificateReport& r) {
    j = {{"name", r.name},         {"lhs", r.lhs},
         {"rhs", r.rhs},           {"slack", r.slack},
         {"passed", r.passed},     {"mode", to_string(r.mode)},
         {"ratio", finite_or_string(r.ratio)}, {"detail", r.detail}};
}

void to_json(json& j, const InterpolationReport& r) {
    j = {{"family", to_string(r.family)},   {"samples", r.samples},
         {"skipped", r.skipped},            {"violations", r.violations},
         {"min_ratio", finite_or_string(r.min_ratio)}, {"max_ratio", r.max_ratio},
         {"amplitude_error", r.amplitude_error}, {"seed", r.seed}};
}

void to_json(json& j, const IterateRecord& r) {
    j = {{"iteration", r.iteration},
         {"objective", r.objective},
         {"energy", r.energy},
         {"projected_gradient", r.projected_gradient},
         {"slope_linf", r.slope_linf}};
}

void to_json(json& j, const MinimizeResult& r) {
    j = {{"model", to_string(r.final.model)},
         {"params", r.final.params},
         {"grid", {r.final.domain().n_theta, r.final.domain().n_z}},
         {"report", r.report},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"stop_reason", r.stop_reason},
         {"constraint_violation", r.constraint_violation},
         {"slope_linf", r.slope_linf},
         {"initial_energy", r.initial_energy},
         {"final_energy", r.final_energy},
         {"axisymmetry_deviation", r.axisymmetry_deviation},
         {"spectral_tail", r.spectral_tail},
         {"history", r.history}};
}

void to_json(json& j, const SweepSpec& s) {
    j = {{"model", to_string(s.model)},
         {"varying", to_string(s.varying)},
         {"count", s.count},
         {"lo", s.lo},
         {"hi", s.hi},
         {"fixed", s.fixed},
         {"mode", to_string(s.mode)},
         {"route", to_string(s.route)},
         {"samples_per_cell", s.samples_per_cell},
         {"max_nodes", s.max_nodes},
         {"seed", s.seed}};
}

void to_json(json& j, const SweepRow& r) {
    j = {{"index", r.index},
         {"x", r.x},
         {"params", r.params},
         {"ok", r.ok},
         {"error", r.error},
         {"regime", r.regime},
         {"n", r.n},
         {"k", r.k},
         {"delta", r.delta},
         {"route", r.route},
         {"grid", {r.n_theta, r.n_z}},
         {"excess", r.excess},
         {"slope_linf", r.slope_linf},
         {"oracle_branch", r.oracle_branch},
         {"oracle_value", r.oracle_value},
         {"oracle_ok", r.oracle_ok},
         {"certificates_evaluated", r.certificates_evaluated},
         {"certificates_failed", r.certificates_failed},
         {"converged", r.converged},
         {"iterations", r.iterations}};
}

void to_json(json& j, const SweepResult& r) { j = {{"spec", r.spec}, {"rows", r.rows}}; }

void to_json(json& j, const FitResult& f) {
    j = {{"exponent", f.exponent},
         {"intercept", f.intercept},
         {"r_squared", f.r_squared},
         {"residual_max", f.residual_max},
         {"points_used", f.points_used}};
}

json with_schema(json body) {
    json out = {{"schema", kSchema}};
    if (body.is_object()) {
        out.update(body);
        return out;
    }
    out["data"] = std::move(body);
    return out;
}

}  // namespace mlab
