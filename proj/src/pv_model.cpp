#include "pvboost/pv_model.hpp"

#include <cmath>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

namespace pvboost {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

DimensionlessParams::DimensionlessParams(double t_p_, double alpha_,
                                         double beta_, double x_minus_,
                                         double q_)
    : t_p(t_p_), alpha(alpha_), beta(beta_), x_minus(x_minus_), q(q_) {
    require(std::isfinite(t_p) && t_p > 0.0, "T_p must be positive");
    require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive");
    require(std::isfinite(beta) && beta > 0.0, "beta must be positive");
    require(std::isfinite(x_minus) && x_minus > 0.0 && x_minus < 1.0,
            "X_minus must lie in (0, 1)");
    require(std::isfinite(q) && q > 0.0, "q must be positive");
    aux.a1 = (alpha + 1.0) / alpha;
    aux.a2 = (alpha + 1.0 - q) / alpha;
    aux.b1 = (beta + 1.0) / beta;
    aux.b2 = (beta + 1.0 - q) / beta;
}

double reduce_diode(double g_d, double v_t, double v_d) {
    require(g_d >= 0.0, "diode conductance must be non-negative");
    return v_d >= v_t ? g_d * (v_d - v_t) : 0.0;
}

DimensionlessParams to_dimensionless(const PhysicalCircuit& c) {
    require(c.r_p > 0.0, "R_p must be positive");
    require(c.l > 0.0, "L must be positive");
    require(c.t > 0.0, "T must be positive");
    require(c.g_d >= 0.0, "g_d must be non-negative");
    require(c.r_s >= 0.0, "R_s must be non-negative");

    const double r_a = c.r_s + c.r_p / (1.0 + c.g_d * c.r_p);
    const double r_b = c.r_s + c.r_p;
    const double i_p = c.peak_current();
    const double v_p = c.peak_voltage();
    require(i_p > 0.0, "I_p = I_s - V_T/R_p must be positive");
    require(v_p > 0.0, "V_p = (1 + R_s/R_p) V_T - R_s I_s must be positive");

    const double t_p = (v_p / (c.l * i_p)) * c.t;
    const double alpha = (i_p / v_p) * r_a;
    const double beta = (i_p / v_p) * r_b;
    const double x_minus = c.i_minus / i_p;
    const double q = c.v_o / v_p;
    return DimensionlessParams(t_p, alpha, beta, x_minus, q);
}

double pv_curve(const DimensionlessParams& p, double x) {
    require(x > 0.0, "pv_curve is defined for x > 0 only");
    if (x < 1.0) return -p.alpha * (x - 1.0) + 1.0;
    return -p.beta * (x - 1.0) + 1.0;
}

namespace {

using nlohmann::json;

double get_number(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end())
        throw ConfigError(std::string("missing field: ") + key);
    if (!it->is_number())
        throw ConfigError(std::string("field is not a number: ") + key);
    return it->get<double>();
}

void reject_unknown(const json& j, const std::set<std::string>& known) {
    if (!j.is_object()) throw ConfigError("document must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key))
            throw ConfigError("unknown field: " + key);
    }
}

const std::set<std::string> kParamKeys = {"T_p", "alpha", "beta", "X_minus",
                                          "q"};
const std::set<std::string> kCircuitKeys = {"I_s", "V_T", "g_d", "R_s", "R_p",
                                            "L",   "T",   "I_minus", "V_o"};

}  // namespace

DimensionlessParams params_from_json(const json& j) {
    reject_unknown(j, kParamKeys);
    return DimensionlessParams(get_number(j, "T_p"), get_number(j, "alpha"),
                               get_number(j, "beta"),
                               get_number(j, "X_minus"), get_number(j, "q"));
}

PhysicalCircuit circuit_from_json(const json& j) {
    reject_unknown(j, kCircuitKeys);
    PhysicalCircuit c;
    c.i_s = get_number(j, "I_s");
    c.v_t = get_number(j, "V_T");
    c.g_d = get_number(j, "g_d");
    c.r_s = get_number(j, "R_s");
    c.r_p = get_number(j, "R_p");
    c.l = get_number(j, "L");
    c.t = get_number(j, "T");
    c.i_minus = get_number(j, "I_minus");
    c.v_o = get_number(j, "V_o");
    return c;
}

DimensionlessParams params_or_circuit_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("document must be a JSON object");
    if (j.contains("T_p")) return params_from_json(j);
    if (j.contains("I_s")) return to_dimensionless(circuit_from_json(j));
    throw ConfigError(
        "document is neither a parameter set (T_p, ...) nor a circuit "
        "(I_s, ...)");
}

}  // namespace pvboost
