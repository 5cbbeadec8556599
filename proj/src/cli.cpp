#include "pencil/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "pencil/bloch.hpp"
#include "pencil/coefficients.hpp"
#include "pencil/errors.hpp"
#include "pencil/oracle.hpp"
#include "pencil/predictor.hpp"
#include "pencil/scattering.hpp"

namespace pencil::cli {

using report::json;

bool operator==(const Tolerances& a, const Tolerances& b) {
    return a.ode_tol == b.ode_tol && a.n_modes == b.n_modes && a.alpha_modes == b.alpha_modes &&
           a.winding_samples == b.winding_samples && a.oracle_max_iterations == b.oracle_max_iterations &&
           a.eigenfunction_points == b.eigenfunction_points && a.fit_order_min == b.fit_order_min;
}

namespace {

double parse_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || !std::isfinite(d)) throw InputError("tolerance " + key + ": not a number: '" + v + "'");
    return d;
}

int parse_int(const std::string& key, const std::string& v) {
    double d = parse_double(key, v);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw InputError("tolerance " + key + ": not an integer: '" + v + "'");
    return int(d);
}

void check_ranges(const Tolerances& t) {
    if (!(t.ode_tol > 0.0 && t.ode_tol < 1e-3)) throw InputError("ode_tol must lie in (0, 1e-3)");
    if (t.n_modes < 4) throw InputError("n_modes must be >= 4");
    if (t.alpha_modes < 8) throw InputError("alpha_modes must be >= 8");
    if (t.winding_samples < 16) throw InputError("winding_samples must be >= 16");
    if (t.oracle_max_iterations < 1) throw InputError("oracle_max_iterations must be >= 1");
    if (t.eigenfunction_points < 9) throw InputError("eigenfunction_points must be >= 9");
    if (!(t.fit_order_min > 0.0)) throw InputError("fit_order_min must be > 0");
}

void set_key(Tolerances& t, const std::string& key, const std::string& v) {
    if (key == "ode_tol") t.ode_tol = parse_double(key, v);
    else if (key == "n_modes") t.n_modes = parse_int(key, v);
    else if (key == "alpha_modes") t.alpha_modes = parse_int(key, v);
    else if (key == "winding_samples") t.winding_samples = parse_int(key, v);
    else if (key == "oracle_max_iterations") t.oracle_max_iterations = parse_int(key, v);
    else if (key == "eigenfunction_points") t.eigenfunction_points = parse_int(key, v);
    else if (key == "fit_order_min") t.fit_order_min = parse_double(key, v);
    else throw InputError("unknown tolerance key '" + key + "'");
}

}  // namespace

void Tolerances::apply_override(const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--tol-override expects KEY=VAL, got '" + assignment + "'");
    set_key(*this, assignment.substr(0, eq), assignment.substr(eq + 1));
    check_ranges(*this);
}

json Tolerances::to_json() const {
    return json{{"ode_tol", ode_tol},
                {"n_modes", n_modes},
                {"alpha_modes", alpha_modes},
                {"winding_samples", winding_samples},
                {"oracle_max_iterations", oracle_max_iterations},
                {"eigenfunction_points", eigenfunction_points},
                {"fit_order_min", fit_order_min},
                {"fixed",
                 {{"delta_uni", kDeltaUni},
                  {"regime_threshold", kRegimeThreshold},
                  {"indeterminate", kIndeterminate},
                  {"oracle_matching_residual", 1e-8},
                  {"dedup", 1e-10}}}};
}

namespace {

using njson = nlohmann::json;

void reject_unknown(const njson& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw InputError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw InputError("unknown key '" + it.key() + "' in " + where);
}

std::vector<int> int_list(const njson& j, const std::string& key) {
    if (!j.is_array() || j.empty()) throw InputError(key + " must be a non-empty array of integers");
    std::vector<int> out;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw InputError(key + " must contain integers");
        out.push_back(v.get<int>());
    }
    return out;
}

std::vector<int> sign_list(const njson& j, const std::string& key) {
    auto v = int_list(j, key);
    for (int s : v)
        if (s != 1 && s != -1) throw InputError(key + " entries must be +1 or -1");
    return v;
}

int int_value(const njson& j, const std::string& key, int lo) {
    if (!j.is_number_integer()) throw InputError(key + " must be an integer");
    int v = j.get<int>();
    if (v < lo) throw InputError(key + " must be >= " + std::to_string(lo));
    return v;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& base_dir) {
    njson j;
    try {
        j = njson::parse(text);
    } catch (const njson::exception& e) {
        throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(j,
                   {"problem", "command", "out", "n", "signs", "branches", "tau_points", "epsilon_ladder", "target",
                    "mode_index", "order", "lambdas", "tolerances"},
                   "config");
    RunConfig c;
    if (!j.contains("problem") || !j["problem"].is_string()) throw InputError("config.problem must be a path string");
    std::filesystem::path pp = j["problem"].get<std::string>();
    c.problem_path = pp.is_absolute() ? pp.string() : (std::filesystem::path(base_dir) / pp).lexically_normal().string();
    if (j.contains("command")) {
        if (!j["command"].is_string()) throw InputError("config.command must be a string");
        c.command = j["command"].get<std::string>();
        if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end())
            throw InputError("unknown command '" + c.command + "'");
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw InputError("config.out must be a string");
        c.out = j["out"].get<std::string>();
    }
    if (j.contains("n")) {
        c.n = int_list(j["n"], "n");
        for (int n : c.n)
            if (n < 0) throw InputError("n entries must be >= 0");
    }
    if (j.contains("signs")) c.signs = sign_list(j["signs"], "signs");
    if (j.contains("branches")) c.branches = sign_list(j["branches"], "branches");
    if (j.contains("tau_points")) c.tau_points = int_value(j["tau_points"], "tau_points", 2);
    if (j.contains("epsilon_ladder")) {
        const auto& l = j["epsilon_ladder"];
        if (!l.is_array() || l.empty()) throw InputError("epsilon_ladder must be a non-empty array");
        c.epsilon_ladder.clear();
        for (const auto& v : l) {
            if (!v.is_number() || !(v.get<double>() > 0.0)) throw InputError("epsilon_ladder entries must be > 0");
            c.epsilon_ladder.push_back(v.get<double>());
        }
    }
    if (j.contains("target")) {
        if (!j["target"].is_string()) throw InputError("target must be a string");
        c.target = j["target"].get<std::string>();
        if (c.target != "emergent" && c.target != "isolated") throw InputError("target must be emergent or isolated");
    }
    if (j.contains("mode_index")) c.mode_index = int_value(j["mode_index"], "mode_index", 0);
    if (j.contains("order")) {
        c.order = int_value(j["order"], "order", 1);
        if (c.order > 3) throw InputError("order must be <= 3");
    }
    if (j.contains("lambdas")) {
        const auto& l = j["lambdas"];
        if (!l.is_array()) throw InputError("lambdas must be an array of [re, im] pairs");
        for (const auto& v : l) {
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                throw InputError("lambdas entries must be [re, im]");
            c.lambdas.emplace_back(v[0].get<double>(), v[1].get<double>());
        }
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) throw InputError("tolerances must be an object");
        for (auto it = t.begin(); it != t.end(); ++it) {
            if (!it.value().is_number()) throw InputError("tolerance " + it.key() + " must be a number");
            std::ostringstream ss;
            ss.precision(17);
            ss << it.value().get<double>();
            set_key(c.tol, it.key(), ss.str());
        }
        check_ranges(c.tol);
    }
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string serialize_run_config(const RunConfig& c) {
    json j;
    j["problem"] = c.problem_path;
    if (!c.command.empty()) j["command"] = c.command;
    if (!c.out.empty()) j["out"] = c.out;
    j["n"] = c.n;
    j["signs"] = c.signs;
    j["branches"] = c.branches;
    j["tau_points"] = c.tau_points;
    j["epsilon_ladder"] = c.epsilon_ladder;
    j["target"] = c.target;
    j["mode_index"] = c.mode_index;
    j["order"] = c.order;
    json l = json::array();
    for (cd z : c.lambdas) l.push_back({z.real(), z.imag()});
    j["lambdas"] = l;
    json t = c.tol.to_json();
    t.erase("fixed");
    j["tolerances"] = t;
    return report::dump(j);
}

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (int i; (i = next++) < count;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(m);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

OracleOptions oracle_options(const Tolerances& t) {
    OracleOptions o;
    o.ode.abs_tol = t.ode_tol;
    o.ode.rel_tol = t.ode_tol;
    o.winding_samples = t.winding_samples;
    o.max_iterations = t.oracle_max_iterations;
    o.eigenfunction_points = t.eigenfunction_points;
    return o;
}

json problem_json(const ProblemSpec& p) { return json::parse(serialize_problem(p)); }

std::map<std::string, std::string> cmd_bands(const RunConfig& c, const ProblemSpec& p, int jobs) {
    std::vector<double> grid(c.tau_points);
    for (int i = 0; i < c.tau_points; ++i) grid[i] = -0.5 + double(i) / (c.tau_points - 1);
    grid.back() = 0.5 - 1e-12;  // the cell is [−1/2, 1/2)
    std::vector<std::pair<int, int>> tasks;
    for (int n : c.n)
        for (int s : c.signs) tasks.emplace_back(n, s);
    std::vector<BandCurve> curves(tasks.size());
    parallel_for(int(tasks.size()), jobs, [&](int i) {
        curves[i] = band_sweep(p, tasks[i].first, tasks[i].second, grid, c.tol.n_modes);
    });
    json meta{{"problem", problem_json(p)},
              {"curves", json::array()},
              {"bifurcation_constant", bifurcation_constant(p.gamma)}};
    for (const auto& cv : curves)
        meta["curves"].push_back(json{{"n", cv.n}, {"sign", cv.sign}, {"points", cv.points.size()}});
    return {{"bands.csv", report::bands_csv(curves)},
            {"bands.svg", report::bands_svg(curves)},
            {"bands.json", report::dump(report::wrap("bands", c.tol.to_json(), meta))}};
}

std::map<std::string, std::string> cmd_coeffs(const RunConfig& c, const ProblemSpec& p, int jobs) {
    std::vector<json> out(c.n.size());
    parallel_for(int(c.n.size()), jobs, [&](int i) {
        if (c.n[i] < 1) throw Refused("coefficients require n >= 1");
        out[i] = report::to_json(perturbation_coeffs(p.gamma, c.n[i], p.kappa_star, +1, c.tol.alpha_modes));
    });
    json body{{"problem", problem_json(p)}, {"coefficients", out}};
    return {{"coeffs.json", report::dump(report::wrap("coeffs", c.tol.to_json(), body))}};
}

std::map<std::string, std::string> cmd_scattering(const RunConfig& c, const ProblemSpec& p, int jobs) {
    std::map<std::string, std::string> files;
    std::vector<json> out(c.n.size());
    std::vector<std::string> csv(c.n.size());
    parallel_for(int(c.n.size()), jobs, [&](int i) {
        const int n = c.n[i];
        if (n < 1) throw Refused("scattering requires n >= 1");
        ScatteringData sd = scattering_data(p.potential, n);
        json note;
        PerturbationCoeffs pc = perturbation_coeffs(p.gamma, n, p.kappa_star, +1, c.tol.alpha_modes);
        try {
            sd = threshold_constants(sd, pc, p);
        } catch (const Refused& e) {
            note = e.what();
        }
        json j = report::to_json(sd);
        if (!note.is_null()) j["threshold_constants_refused"] = note;
        out[i] = j;
        csv[i] = report::scattering_csv(jost_solutions(p.potential, n), sd);
    });
    json modes = json::array();
    for (const auto& m : discrete_spectrum(p.potential)) modes.push_back(report::to_json(m));
    json body{{"problem", problem_json(p)}, {"scattering", out}, {"discrete_spectrum", modes}};
    files["scattering.json"] = report::dump(report::wrap("scattering", c.tol.to_json(), body));
    for (std::size_t i = 0; i < c.n.size(); ++i) files["scattering_n" + std::to_string(c.n[i]) + ".csv"] = csv[i];
    return files;
}

std::map<std::string, std::string> cmd_predict(const RunConfig& c, const ProblemSpec& p, int jobs) {
    struct Task {
        int n, sign, branch;
    };
    std::vector<Task> tasks;
    for (int n : c.n)
        for (int s : c.signs)
            for (int b : c.branches) tasks.push_back({n, s, b});
    std::vector<json> out(tasks.size());
    parallel_for(int(tasks.size()), jobs, [&](int i) {
        const Task& t = tasks[i];
        json j{{"n", t.n}, {"sign", t.sign}, {"branch", t.branch}};
        try {
            j["prediction"] = report::to_json(emergent_prediction(p, t.n, t.sign, t.branch));
        } catch (const Refused& e) {
            j["refused"] = e.what();
        }
        out[i] = j;
    });
    json isolated = json::array();
    auto modes = discrete_spectrum(p.potential);
    for (const auto& m : modes) {
        if (std::abs(m.kappa + p.kappa_star) < 1e-9) {
            ZeroModeAnalysis z = zero_mode_analysis(p, m);
            json j{{"mode_index", m.index}, {"zero_case", true}, {"coupling", z.coupling}};
            if (z.extra) j["extra"] = report::to_json(*z.extra);
            isolated.push_back(j);
            continue;
        }
        for (int s : c.signs) isolated.push_back(report::to_json(isolated_series(p, m, s, 3, &modes)));
    }
    json body{{"problem", problem_json(p)}, {"emergent", out}, {"isolated", isolated}};
    return {{"predict.json", report::dump(report::wrap("predict", c.tol.to_json(), body))}};
}

// Winding around a predicted point with a radius kept off the nearby bands.
Winding absence_winding(const ProblemSpec& q, cd center, double radius, const OracleOptions& o) {
    Winding w;
    for (int k = 0; k < 6; ++k, radius *= 0.5) {
        w = winding_number(q, center, radius, o);
        if (!w.band_crossing) break;
    }
    return w;
}

std::map<std::string, std::string> cmd_verify(const RunConfig& c, const ProblemSpec& p, int jobs) {
    const OracleOptions o = oracle_options(c.tol);
    std::map<std::string, std::string> files;
    json cases = json::array();
    bool any_contradiction = false;
    if (c.target == "isolated") {
        auto modes = discrete_spectrum(p.potential);
        if (c.mode_index >= int(modes.size())) throw Refused("mode_index exceeds the discrete spectrum");
        const DiscreteMode& m = modes[c.mode_index];
        for (int s : c.signs) {
            IsolatedSeries ser = isolated_series(p, m, s, c.order, &modes);
            auto pred = [&](double e) { return ser.value(e, c.order); };
            auto radius = [&](double e) { return std::max(10.0 * e * e, 1e-3); };
            std::vector<DefectReport> rep(1);
            rep[0] = eigenvalue_defect_order(p, pred, c.epsilon_ladder, radius, o);
            const double need = c.tol.fit_order_min + (c.order - 1);
            std::string verdict = rep[0].contradiction ? "contradicted" : rep[0].order >= need ? "confirmed" : "order-deficit";
            if (verdict != "confirmed") any_contradiction = true;
            cases.push_back(json{{"sign", s},
                                 {"series", report::to_json(ser)},
                                 {"defect", report::to_json(rep[0])},
                                 {"required_order", need},
                                 {"verdict", verdict}});
        }
    } else {
        struct Task {
            int n, sign, branch;
        };
        std::vector<Task> tasks;
        for (int n : c.n)
            for (int s : c.signs)
                for (int b : c.branches) tasks.push_back({n, s, b});
        std::vector<json> out(tasks.size());
        std::vector<std::string> eigcsv(tasks.size());
        std::vector<char> bad(tasks.size(), 0);
        parallel_for(int(tasks.size()), jobs, [&](int i) {
            const Task& t = tasks[i];
            json j{{"n", t.n}, {"sign", t.sign}, {"branch", t.branch}};
            EmergencePrediction e;
            try {
                e = emergent_prediction(p, t.n, t.sign, t.branch);
            } catch (const Refused& ex) {
                j["refused"] = ex.what();
                j["verdict"] = "refused";
                out[i] = j;
                return;
            }
            j["prediction"] = report::to_json(e);
            if (e.exists == Existence::yes) {
                auto pred = [&](double eps) { return e.value(eps, false); };
                auto radius = [&](double eps) { return 0.8 * eps * std::abs(e.first_order) + 1e-4; };
                DefectReport d = eigenvalue_defect_order(p, pred, c.epsilon_ladder, radius, o);
                auto pred2 = [&](double eps) { return e.value(eps, true); };
                json dj = report::to_json(d);
                std::vector<double> d2;
                for (std::size_t k = 0; k < d.oracle.size(); ++k) d2.push_back(std::abs(d.oracle[k] - pred2(d.epsilon[k])));
                dj["order_with_Lambda"] = fitted_order(d.epsilon, d2);
                j["defect"] = dj;
                bool ok = !d.contradiction && d.order >= c.tol.fit_order_min;
                j["verdict"] = ok ? "confirmed" : "contradicted";
                if (!ok) bad[i] = 1;
                if (!d.contradiction) {
                    ProblemSpec q = p;
                    q.epsilon = d.epsilon.front();
                    OracleResult r = find_isolated_eigenvalue(q, d.oracle.front(), 1e-6, o);
                    eigcsv[i] = report::eigenfunction_csv(r);
                }
            } else if (e.exists == Existence::no) {
                json ws = json::array();
                bool all_zero = true;
                for (double eps : c.epsilon_ladder) {
                    ProblemSpec q = p;
                    q.epsilon = eps;
                    double r0 = 0.3 * eps * std::abs(e.first_order);
                    Winding w = absence_winding(q, e.value(eps, false), r0, o);
                    json wj = report::to_json(w);
                    wj["epsilon"] = eps;
                    ws.push_back(wj);
                    if (w.number != 0 || w.band_crossing) all_zero = false;
                }
                j["windings"] = ws;
                j["verdict"] = all_zero ? "absence-confirmed" : "contradicted";
                if (!all_zero) bad[i] = 1;
            } else {
                j["verdict"] = "indeterminate";
            }
            out[i] = j;
        });
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            cases.push_back(out[i]);
            if (bad[i]) any_contradiction = true;
            if (!eigcsv[i].empty())
                files["eigenfunction_n" + std::to_string(tasks[i].n) + (tasks[i].sign > 0 ? "_p" : "_m") +
                      (tasks[i].branch > 0 ? "_zp" : "_zm") + ".csv"] = eigcsv[i];
        }
    }
    json body{{"problem", problem_json(p)},
              {"target", c.target},
              {"epsilon_ladder", c.epsilon_ladder},
              {"cases", cases},
              {"verdict", any_contradiction ? "contradicted" : "consistent"}};
    files["verdict.json"] = report::dump(report::wrap("verify", c.tol.to_json(), body));
    return files;
}

std::map<std::string, std::string> cmd_enclosure(const RunConfig& c, const ProblemSpec& p, int jobs) {
    const OracleOptions o = oracle_options(c.tol);
    auto modes = discrete_spectrum(p.potential);
    std::vector<double> kap;
    for (const auto& m : modes) kap.push_back(m.kappa);
    struct Item {
        std::string source;
        cd lambda;
        OracleStatus status = OracleStatus::isolated;
    };
    std::vector<Item> items;
    for (cd z : c.lambdas) items.push_back({"config", z});
    std::vector<std::pair<const DiscreteMode*, int>> seeds;
    for (const auto& m : modes)
        if (std::abs(m.kappa + p.kappa_star) > 1e-9)
            for (int s : c.signs) seeds.emplace_back(&m, s);
    std::vector<Item> found(seeds.size());
    parallel_for(int(seeds.size()), jobs, [&](int i) {
        const auto& [m, s] = seeds[i];
        IsolatedSeries ser = isolated_series(p, *m, s, 2, &modes);
        cd guess = ser.value(p.epsilon, 2);
        OracleResult r = find_isolated_eigenvalue(p, guess, std::max(0.05 * std::abs(ser.ell), 1e-3), o);
        found[i] = {"oracle_mode" + std::to_string(m->index) + (s > 0 ? "_p" : "_m"), r.lambda, r.status};
    });
    for (auto& f : found)
        if (f.status == OracleStatus::isolated) items.push_back(f);
    json rows = json::array();
    bool all_inside = true;
    for (const auto& it : items) {
        Enclosure e = spectrum_enclosure_check(p, it.lambda, kap);
        all_inside = all_inside && e.inside;
        json j = report::to_json(e);
        j["source"] = it.source;
        j["lambda"] = report::complex_json(it.lambda);
        rows.push_back(j);
    }
    json body{{"problem", problem_json(p)}, {"checks", rows}, {"all_inside", all_inside}};
    return {{"enclosure.json", report::dump(report::wrap("enclosure", c.tol.to_json(), body))}};
}

}  // namespace

std::map<std::string, std::string> run_command(const RunConfig& c, const ProblemSpec& p, int jobs) {
    if (c.command == "bands") return cmd_bands(c, p, jobs);
    if (c.command == "coeffs") return cmd_coeffs(c, p, jobs);
    if (c.command == "scattering") return cmd_scattering(c, p, jobs);
    if (c.command == "predict") return cmd_predict(c, p, jobs);
    if (c.command == "verify") return cmd_verify(c, p, jobs);
    if (c.command == "enclosure") return cmd_enclosure(c, p, jobs);
    throw InputError("no command given");
}

}  // namespace pencil::cli
