#include "pencil/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pencil/errors.hpp"

namespace pencil {

using nlohmann::json;

double GammaSpec::operator()(double x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < sine_coeffs.size(); ++k) {
        if (sine_coeffs[k] != 0.0) s += sine_coeffs[k] * std::sin(double(k + 1) * x);
    }
    return s;
}

double GammaSpec::derivative(double x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < sine_coeffs.size(); ++k) {
        double kk = double(k + 1);
        if (sine_coeffs[k] != 0.0) s += kk * sine_coeffs[k] * std::cos(kk * x);
    }
    return s;
}

int GammaSpec::max_harmonic() const {
    for (int k = int(sine_coeffs.size()); k >= 1; --k)
        if (sine_coeffs[k - 1] != 0.0) return k;
    return 0;
}

double GammaSpec::coeff(int k) const {
    if (k < 1 || k > int(sine_coeffs.size())) return 0.0;
    return sine_coeffs[k - 1];
}

cd GammaSpec::fourier(int m) const {
    if (m == 0) return 0.0;
    // sin(kx) = (e^{ikx} - e^{-ikx}) / (2i)
    if (m > 0) return cd(0.0, -0.5 * coeff(m));
    return cd(0.0, 0.5 * coeff(-m));
}

bool GammaSpec::is_zero() const { return max_harmonic() == 0; }

double GammaSpec::sup_abs() const {
    if (is_zero()) return 0.0;
    // dense scan, then golden-section polish around the best sample
    const int samples = 4096;
    const double h = kTwoPi / samples;
    double best = 0.0, xbest = 0.0;
    for (int i = 0; i < samples; ++i) {
        double x = -kPi + i * h;
        double v = std::abs((*this)(x));
        if (v > best) { best = v; xbest = x; }
    }
    double a = xbest - h, b = xbest + h;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 80; ++it) {
        if (std::abs((*this)(c)) > std::abs((*this)(d))) b = d; else a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return std::max(best, std::abs((*this)(0.5 * (a + b))));
}

std::string kind_name(PotentialKind k) {
    switch (k) {
        case PotentialKind::sech2_well: return "sech2_well";
        case PotentialKind::gaussian_well: return "gaussian_well";
        case PotentialKind::exp_well: return "exp_well";
        case PotentialKind::tabulated: return "tabulated";
    }
    return "?";
}

double PotentialSpec::operator()(double x) const {
    switch (kind) {
        case PotentialKind::sech2_well: {
            double c = std::cosh(params[1] * x);
            return -params[0] / (c * c);
        }
        case PotentialKind::gaussian_well:
            return -params[0] * std::exp(-(x * x) / (params[1] * params[1]));
        case PotentialKind::exp_well:
            return -params[0] * std::exp(-params[1] * std::abs(x));
        case PotentialKind::tabulated: {
            if (x < grid.front() || x > grid.back()) {
                if (!extrapolate) throw InputError("tabulated potential evaluated outside its grid");
                return 0.0;
            }
            auto it = std::upper_bound(grid.begin(), grid.end(), x);
            if (it == grid.end()) return values.back();
            std::size_t i = std::size_t(it - grid.begin());
            double w = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
            return (1.0 - w) * values[i - 1] + w * values[i];
        }
    }
    return 0.0;
}

double PotentialSpec::support_cutoff() const {
    double L1 = 10.0 / envelope.theta;
    double L2 = std::log(std::max(envelope.C, 1e-300) / 1e-12) / envelope.theta;
    double L = std::max(L1, L2);
    if (kind == PotentialKind::tabulated)
        L = std::max(L, std::max(std::abs(grid.front()), std::abs(grid.back())));
    return L;
}

double PotentialSpec::min_value() const {
    double L = support_cutoff();
    double m = 0.0;
    const int samples = 20001;
    for (int i = 0; i < samples; ++i) {
        double x = -L + 2.0 * L * i / (samples - 1);
        m = std::min(m, (*this)(x));
    }
    if (kind != PotentialKind::tabulated) m = std::min(m, (*this)(0.0));
    return m;
}

bool PotentialSpec::is_even() const {
    if (kind != PotentialKind::tabulated) return true;
    double L = support_cutoff();
    for (int i = 0; i <= 400; ++i) {
        double x = L * i / 400.0;
        if (std::abs((*this)(x) - (*this)(-x)) > 1e-14 * (1.0 + std::abs((*this)(x)))) return false;
    }
    return true;
}

bool PotentialSpec::is_zero() const {
    if (kind == PotentialKind::tabulated)
        return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
    return params[0] == 0.0;
}

cd kappa(cd lambda, double kappa_star) { return std::sqrt(lambda * lambda - kappa_star); }

PotentialSpec sech2_well(double v0, double mu) {
    PotentialSpec v;
    v.kind = PotentialKind::sech2_well;
    v.params = {v0, mu};
    // sech²(y) <= 4 e^{-2|y|}
    v.envelope = {std::max(4.0 * std::abs(v0), 1e-12), 2.0 * mu};
    return v;
}

PotentialSpec gaussian_well(double v0, double sigma) {
    PotentialSpec v;
    v.kind = PotentialKind::gaussian_well;
    v.params = {v0, sigma};
    // exp(-x²/σ²) <= e · exp(-2|x|/σ)
    v.envelope = {std::max(std::abs(v0) * std::exp(1.0), 1e-12), 2.0 / sigma};
    return v;
}

PotentialSpec exp_well(double v0, double theta) {
    PotentialSpec v;
    v.kind = PotentialKind::exp_well;
    v.params = {v0, theta};
    v.envelope = {std::max(std::abs(v0), 1e-12), theta};
    return v;
}

PotentialSpec tabulated_potential(std::vector<double> grid, std::vector<double> values, Envelope env,
                                  bool extrapolate) {
    PotentialSpec v;
    v.kind = PotentialKind::tabulated;
    v.grid = std::move(grid);
    v.values = std::move(values);
    v.envelope = env;
    v.extrapolate = extrapolate;
    return v;
}

void validate(const PotentialSpec& v) {
    if (!(v.envelope.C > 0.0) || !(v.envelope.theta > 0.0))
        throw InputError("potential envelope requires C > 0 and theta > 0");
    if (v.kind == PotentialKind::tabulated) {
        if (v.grid.size() < 2 || v.grid.size() != v.values.size())
            throw InputError("tabulated potential needs matching grid/values with >= 2 points");
        for (std::size_t i = 1; i < v.grid.size(); ++i)
            if (!(v.grid[i] > v.grid[i - 1])) throw InputError("tabulated grid must be strictly increasing");
        for (std::size_t i = 0; i < v.grid.size(); ++i)
            if (!std::isfinite(v.values[i])) throw InputError("tabulated values must be finite");
    } else {
        if (v.params.size() != 2) throw InputError("potential requires exactly two parameters");
        if (!(v.params[1] > 0.0)) throw InputError("potential width/rate parameter must be positive");
    }
    // envelope check on a log-spaced grid up to |x| = 10/theta
    double xmax = 10.0 / v.envelope.theta;
    for (int i = 0; i <= 200; ++i) {
        double x = (i == 0) ? 0.0 : xmax * std::pow(10.0, -4.0 + 4.0 * i / 200.0);
        for (double s : {x, -x}) {
            double bound = v.envelope.C * std::exp(-v.envelope.theta * std::abs(s));
            double val;
            try {
                val = v(s);
            } catch (const InputError&) {
                continue;
            }
            if (std::abs(val) > bound * (1.0 + 1e-12) + 1e-300)
                throw InputError("potential violates its envelope |V| <= C exp(-theta|x|) at x = " +
                                 std::to_string(s));
        }
    }
}

void validate(const ProblemSpec& p) {
    if (!(p.epsilon >= 0.0) || !std::isfinite(p.epsilon)) throw InputError("epsilon must be >= 0");
    if (!std::isfinite(p.kappa_star)) throw InputError("kappa_star must be finite");
    for (double g : p.gamma.sine_coeffs)
        if (!std::isfinite(g)) throw InputError("gamma coefficients must be finite");
    validate(p.potential);
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    if (!j.is_object()) throw InputError(std::string(where) + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw InputError("unknown key '" + it.key() + "' in " + where);
}

double num(const json& j, const char* key, const char* where) {
    if (!j.contains(key)) throw InputError(std::string("missing key '") + key + "' in " + where);
    const json& v = j.at(key);
    if (!v.is_number()) throw InputError(std::string("key '") + key + "' in " + where + " must be a number");
    return v.get<double>();
}

std::vector<double> num_array(const json& j, const char* key, const char* where) {
    if (!j.contains(key)) throw InputError(std::string("missing key '") + key + "' in " + where);
    const json& v = j.at(key);
    if (!v.is_array()) throw InputError(std::string("key '") + key + "' in " + where + " must be an array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw InputError(std::string("non-numeric entry in ") + key);
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace

ProblemSpec parse_problem(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("problem file is not valid JSON: ") + e.what());
    }
    reject_unknown(j, {"kappa_star", "epsilon", "gamma", "potential"}, "problem");
    ProblemSpec p;
    p.kappa_star = num(j, "kappa_star", "problem");
    p.epsilon = num(j, "epsilon", "problem");
    if (!j.contains("gamma")) throw InputError("missing key 'gamma'");
    reject_unknown(j.at("gamma"), {"sine_coeffs"}, "gamma");
    p.gamma.sine_coeffs = num_array(j.at("gamma"), "sine_coeffs", "gamma");

    if (!j.contains("potential")) throw InputError("missing key 'potential'");
    const json& pj = j.at("potential");
    reject_unknown(pj, {"kind", "params", "envelope"}, "potential");
    if (!pj.contains("kind") || !pj.at("kind").is_string()) throw InputError("potential.kind must be a string");
    std::string kind = pj.at("kind").get<std::string>();
    if (!pj.contains("params")) throw InputError("missing key 'potential.params'");
    const json& par = pj.at("params");
    PotentialSpec v;
    if (kind == "sech2_well") {
        reject_unknown(par, {"v0", "mu"}, "potential.params");
        v = sech2_well(num(par, "v0", "params"), num(par, "mu", "params"));
    } else if (kind == "gaussian_well") {
        reject_unknown(par, {"v0", "sigma"}, "potential.params");
        v = gaussian_well(num(par, "v0", "params"), num(par, "sigma", "params"));
    } else if (kind == "exp_well") {
        reject_unknown(par, {"v0", "theta"}, "potential.params");
        v = exp_well(num(par, "v0", "params"), num(par, "theta", "params"));
    } else if (kind == "tabulated") {
        reject_unknown(par, {"grid", "values", "extrapolate"}, "potential.params");
        v.kind = PotentialKind::tabulated;
        v.grid = num_array(par, "grid", "params");
        v.values = num_array(par, "values", "params");
        if (par.contains("extrapolate")) {
            if (!par.at("extrapolate").is_boolean()) throw InputError("params.extrapolate must be boolean");
            v.extrapolate = par.at("extrapolate").get<bool>();
        }
        if (!pj.contains("envelope")) throw InputError("tabulated potential requires an explicit envelope");
    } else {
        throw InputError("unknown potential kind '" + kind + "'");
    }
    if (pj.contains("envelope")) {
        const json& e = pj.at("envelope");
        reject_unknown(e, {"C", "theta"}, "potential.envelope");
        v.envelope.C = num(e, "C", "envelope");
        v.envelope.theta = num(e, "theta", "envelope");
    }
    p.potential = v;
    validate(p);
    return p;
}

ProblemSpec load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open problem file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

std::string serialize_problem(const ProblemSpec& p) {
    json j;
    j["kappa_star"] = p.kappa_star;
    j["epsilon"] = p.epsilon;
    j["gamma"]["sine_coeffs"] = p.gamma.sine_coeffs;
    const PotentialSpec& v = p.potential;
    json pj;
    pj["kind"] = kind_name(v.kind);
    switch (v.kind) {
        case PotentialKind::sech2_well: pj["params"] = {{"v0", v.params[0]}, {"mu", v.params[1]}}; break;
        case PotentialKind::gaussian_well: pj["params"] = {{"v0", v.params[0]}, {"sigma", v.params[1]}}; break;
        case PotentialKind::exp_well: pj["params"] = {{"v0", v.params[0]}, {"theta", v.params[1]}}; break;
        case PotentialKind::tabulated:
            pj["params"] = {{"grid", v.grid}, {"values", v.values}, {"extrapolate", v.extrapolate}};
            break;
    }
    pj["envelope"] = {{"C", v.envelope.C}, {"theta", v.envelope.theta}};
    j["potential"] = pj;
    return j.dump(2) + "\n";
}

}  // namespace pencil
