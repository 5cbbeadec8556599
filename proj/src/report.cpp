#include "pencil/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pencil/errors.hpp"

namespace pencil::report {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json complex_json(cd z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json to_json(const Monodromy& m) {
    return json{{"lambda", complex_json(m.lambda)},
                {"epsilon", m.epsilon},
                {"a11", complex_json(m.a11)},
                {"a12", complex_json(m.a12)},
                {"a21", complex_json(m.a21)},
                {"a22", complex_json(m.a22)},
                {"det_residual", std::abs(m.det() - 1.0)}};
}

json to_json(const PerturbationCoeffs& pc) {
    json jets = json::array();
    for (const auto& [key, v] : pc.jets) {
        auto [i, j, order] = key;
        jets.push_back(json{{"i", i}, {"j", j}, {"order", order}, {"value", complex_json(v)}});
    }
    return json{{"n", pc.n},
                {"lambda0", complex_json(pc.lambda0)},
                {"rho0", complex_json(pc.rho0)},
                {"drho0_dkappa", complex_json(pc.drho0_dkappa)},
                {"rho_hat", complex_json(pc.rho_hat)},
                {"rho12_2", complex_json(pc.rho12_2)},
                {"rho21_2", complex_json(pc.rho21_2)},
                {"alpha0", pc.alpha0},
                {"alpha1", pc.alpha1},
                {"alpha1_pp", pc.alpha1_pp},
                {"alpha1_mm", pc.alpha1_mm},
                {"jets", jets},
                {"residuals",
                 {{"sum_rule", pc.residual_sum_rule},
                  {"split", pc.residual_split},
                  {"third_order", pc.residual_third},
                  {"rho0_alpha0", pc.residual_alpha0},
                  {"rho12_quadrature_vs_jet", pc.residual_rho12},
                  {"rho21_quadrature_vs_jet", pc.residual_rho21}}}};
}

json to_json(const ScatteringData& sd) {
    json j{{"n", sd.n},
           {"a", complex_json(sd.a)},
           {"b", complex_json(sd.b)},
           {"a_r", sd.a_r},
           {"a_i", sd.a_i},
           {"b_r", sd.b_r},
           {"b_i", sd.b_i},
           {"theta", sd.theta},
           {"regime", regime_name(sd.regime)},
           {"zeta_plus", sd.zeta_plus},
           {"zeta_minus", sd.zeta_minus},
           {"residuals",
            {{"unitarity", sd.unitarity_residual},
             {"W_plus", sd.W_plus},
             {"W_minus", sd.W_minus},
             {"dW_plus", sd.dW_plus},
             {"dW_minus", sd.dW_minus}}}};
    if (!sd.complete) return j;
    j["alpha_plus"] = sd.alpha_plus;
    j["alpha_minus"] = sd.alpha_minus;
    j["alpha_limit_plus"] = sd.alpha_limit_plus;
    j["alpha_limit_minus"] = sd.alpha_limit_minus;
    j["alpha_measured_plus"] = sd.alpha_measured_plus;
    j["alpha_measured_minus"] = sd.alpha_measured_minus;
    j["period_integral_plus"] = complex_json(sd.period_integral_plus);
    j["period_integral_minus"] = complex_json(sd.period_integral_minus);
    j["periods_used"] = sd.periods_used;
    if (sd.regime == Regime::generic) {
        j["upsilon_plus"] = complex_json(sd.upsilon_plus);
        j["upsilon_minus"] = complex_json(sd.upsilon_minus);
        j["s1_plus"] = complex_json(sd.s1_plus);
        j["s1_minus"] = complex_json(sd.s1_minus);
        j["zhat_plus"] = complex_json(sd.zhat_plus);
        j["zhat_minus"] = complex_json(sd.zhat_minus);
    } else {
        j["s2"] = complex_json(sd.s2);
        j["xi_hat_plus"] = complex_json(sd.xi_hat_plus);
        j["xi_hat_minus"] = complex_json(sd.xi_hat_minus);
    }
    return j;
}

json to_json(const DiscreteMode& m, bool with_samples) {
    json j{{"index", m.index},
           {"kappa", m.kappa},
           {"parity", parity_name(m.parity)},
           {"parity_overlap", m.parity_overlap},
           {"residual", m.residual}};
    if (with_samples) {
        j["x"] = m.x;
        j["psi"] = m.psi;
    }
    return j;
}

json to_json(const IsolatedSeries& s) {
    json L = json::array();
    for (cd v : s.Lambda) L.push_back(complex_json(v));
    return json{{"mode_index", s.mode.index},
                {"kappa_j", s.mode.kappa},
                {"sign", s.sign},
                {"zero_case", s.zero_case},
                {"Lambda", L},
                {"solvability_residual", s.solvability_residual},
                {"orthogonality_residual", s.orthogonality_residual}};
}

json to_json(const EmergencePrediction& e) {
    return json{{"n", e.n},
                {"lambda0", complex_json(e.lambda0)},
                {"branch", e.branch > 0 ? "zeta_plus" : "zeta_minus"},
                {"mirrored", e.mirrored},
                {"regime", regime_name(e.regime)},
                {"zeta", e.zeta},
                {"exists", existence_name(e.exists)},
                {"first_order", complex_json(e.first_order)},
                {"Lambda", complex_json(e.Lambda)},
                {"condition_value", e.condition_value},
                {"condition_id", e.condition_id},
                {"rho0", complex_json(e.rho0)}};
}

json to_json(const OracleResult& r) {
    return json{{"lambda", complex_json(r.lambda)},
                {"status", status_name(r.status)},
                {"matching_residual", r.matching_residual},
                {"floquet_moduli", {r.mu_decay_modulus, r.mu_grow_modulus}},
                {"eigenfunction_residual", r.eigenfunction_residual},
                {"decay_per_period", r.decay_per_period},
                {"iterations", r.iterations}};
}

json to_json(const DefectReport& d) {
    json rows = json::array();
    for (std::size_t i = 0; i < d.epsilon.size(); ++i)
        rows.push_back(json{{"epsilon", d.epsilon[i]},
                            {"predicted", complex_json(d.predicted[i])},
                            {"oracle", complex_json(d.oracle[i])},
                            {"status", status_name(d.status[i])},
                            {"defect", d.defect[i]}});
    return json{{"rows", rows}, {"order", d.order}, {"contradiction", d.contradiction}};
}

json to_json(const Winding& w) {
    return json{{"number", w.number}, {"samples", w.samples}, {"min_abs", w.min_abs}, {"band_crossing", w.band_crossing}};
}

json to_json(const Enclosure& e) { return json{{"inside", e.inside}, {"margin", e.margin}, {"distance", e.distance}}; }

namespace {

void dump_into(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_into(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump_into(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            double v = j.get<double>();
            // JSON has no inf/nan
            out += std::isfinite(v) ? num(v) : "null";
            break;
        }
        default: out += j.dump();
    }
}

}  // namespace

std::string dump(const json& j) {
    std::string out;
    dump_into(j, out);
    out += '\n';
    return out;
}

json wrap(const std::string& kind, const json& tolerances, json body) {
    json j{{"schema", kSchema}, {"tool_version", kToolVersion}, {"report", kind}, {"tolerances", tolerances}};
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    return j;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string bands_csv(const std::vector<BandCurve>& curves) {
    std::string out = "n,sign,tau,re_lambda,im_lambda,source\n";
    for (const auto& c : curves)
        for (const auto& p : c.points)
            out += std::to_string(p.n) + ',' + std::to_string(p.sign) + ',' + num(p.tau) + ',' + num(p.lambda.real()) +
                   ',' + num(p.lambda.imag()) + ',' + csv_field(source_name(p.source)) + '\n';
    return out;
}

std::string bands_svg(const std::vector<BandCurve>& curves) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& c : curves)
        for (const auto& p : c.points) {
            xmin = std::min(xmin, p.lambda.real());
            xmax = std::max(xmax, p.lambda.real());
            ymin = std::min(ymin, p.lambda.imag());
            ymax = std::max(ymax, p.lambda.imag());
        }
    if (!std::isfinite(xmin)) xmin = -1, xmax = 1, ymin = -1, ymax = 1;
    double span = std::max({xmax - xmin, ymax - ymin, 1e-6});
    double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    const double W = 640, pad = 40, scale = (W - 2 * pad) / (1.05 * span);
    auto X = [&](double x) { return num(W / 2 + (x - cx) * scale); };
    auto Y = [&](double y) { return num(W / 2 - (y - cy) * scale); };
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" viewBox=\"0 0 640 640\">\n";
    out += "<rect width=\"640\" height=\"640\" fill=\"white\"/>\n";
    out += "<line x1=\"0\" y1=\"" + Y(0.0) + "\" x2=\"640\" y2=\"" + Y(0.0) + "\" stroke=\"#bbb\"/>\n";
    out += "<line x1=\"" + X(0.0) + "\" y1=\"0\" x2=\"" + X(0.0) + "\" y2=\"640\" stroke=\"#bbb\"/>\n";
    for (const auto& c : curves) {
        const char* col = palette[std::abs(c.n) % 6];
        for (const auto& p : c.points)
            out += "<circle cx=\"" + X(p.lambda.real()) + "\" cy=\"" + Y(p.lambda.imag()) + "\" r=\"1.5\" fill=\"" + col +
                   "\"/>\n";
    }
    out += "<text x=\"8\" y=\"16\" font-size=\"12\">Re(lambda) horizontal, Im(lambda) vertical</text>\n";
    out += "</svg>\n";
    return out;
}

std::string eigenfunction_csv(const OracleResult& r) {
    std::string out = "x,re_psi,im_psi\n";
    for (std::size_t i = 0; i < r.x.size(); ++i)
        out += num(r.x[i]) + ',' + num(r.psi[i].real()) + ',' + num(r.psi[i].imag()) + '\n';
    return out;
}

std::string scattering_csv(const JostSolutions& js, const ScatteringData& sd) {
    std::string out = "x,re_y1,im_y1,re_y2,im_y2,x_plus,x_minus\n";
    const cd ep = std::exp(cd(0.0, sd.zeta_plus)), em = std::exp(cd(0.0, sd.zeta_minus));
    for (std::size_t i = 0; i < js.x.size(); ++i) {
        double xp = 2.0 * (ep * js.y1[i]).real(), xm = 2.0 * (em * js.y1[i]).real();
        out += num(js.x[i]) + ',' + num(js.y1[i].real()) + ',' + num(js.y1[i].imag()) + ',' + num(js.y2[i].real()) +
               ',' + num(js.y2[i].imag()) + ',' + num(xp) + ',' + num(xm) + '\n';
    }
    return out;
}

void write_files(const std::string& dir, const std::map<std::string, std::string>& files) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
    std::vector<std::pair<fs::path, fs::path>> staged;
    for (const auto& [name, content] : files) {
        fs::path final_path = fs::path(dir) / name;
        fs::path tmp = final_path;
        tmp += ".partial";
        std::ofstream f(tmp, std::ios::binary);
        f << content;
        f.close();
        if (!f) {
            for (auto& s : staged) fs::remove(s.first, ec);
            fs::remove(tmp, ec);
            throw InputError("cannot write " + final_path.string());
        }
        staged.emplace_back(tmp, final_path);
    }
    for (auto& [tmp, final_path] : staged) fs::rename(tmp, final_path);
}

}  // namespace pencil::report
