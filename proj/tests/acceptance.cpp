// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance [--known-red 9[,..]]
// Exit status is 0 iff the failing set equals the declared known-red set.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "pencil/bloch.hpp"
#include "pencil/coefficients.hpp"
#include "pencil/errors.hpp"
#include "pencil/floquet.hpp"
#include "pencil/oracle.hpp"
#include "pencil/predictor.hpp"
#include "pencil/scattering.hpp"

using namespace pencil;

namespace {

// pinned tolerances
constexpr double kConservation = 1e-9;
constexpr double kClosedMonodromy = 1e-8;
constexpr double kClosedBands = 1e-9;
constexpr double kIdentity = 1e-8;
constexpr double kJetFactor = 0.8;
constexpr double kBandOrder = 1.7;
constexpr double kMidOrder = 2.7;
constexpr double kUnitarity = 1e-8;
constexpr double kReflectionless = 1e-7;
constexpr double kKappaGrid = 1e-6;
constexpr double kSeriesOrder1 = 1.7, kSeriesOrder2 = 2.6;
constexpr double kPureImag = 1e-9;
constexpr double kZero = 1e-8;
constexpr double kEmergentOrder = 1.7, kLambdaOrder = 2.5;
constexpr double kPairing = 1e-8;
const std::vector<double> kLadder{0.04, 0.02, 0.01};

struct Found {
    ProblemSpec p;
    cd lambda;
    std::string label;
};
std::vector<Found> g_found;

std::vector<double> kappas_of(const PotentialSpec& v) {
    std::vector<double> k;
    for (const auto& m : discrete_spectrum(v)) k.push_back(m.kappa);
    return k;
}

void record(const ProblemSpec& p, const OracleResult& r, const std::string& label) {
    if (r.status == OracleStatus::isolated) g_found.push_back({p, r.lambda, label});
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

struct Result {
    bool pass = true;
    std::vector<std::string> info;
    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        info.push_back(std::string(ok ? "ok   " : "bad  ") + what);
    }
    void note(const std::string& what) { info.push_back("info " + what); }
};

// 1
Result floquet_conservation() {
    Result r;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    // |det A − 1| is bounded below by rounding in a11·a22 − a12·a21, so the bound is
    // scaled by max(1, |a11 a22| + |a12 a21|); draws with that scale ≤ 10 are held to it absolutely
    double worst_det = 0, worst_abs = 0, worst_mu = 0, biggest = 0;
    for (int i = 0; i < 200; ++i) {
        ProblemSpec p;
        p.kappa_star = 2.0 * u(rng);
        p.epsilon = 0.1 * std::abs(u(rng));
        int K = 1 + int(3 * std::abs(u(rng)));
        for (int k = 0; k < K; ++k) p.gamma.sine_coeffs.push_back(u(rng));
        cd lam(2.5 * u(rng), 1.5 * u(rng));
        Monodromy m = monodromy(p, lam);
        FloquetPair f = floquet_multipliers(m, 1);
        double scale = std::max(1.0, std::abs(m.a11 * m.a22) + std::abs(m.a12 * m.a21));
        biggest = std::max(biggest, scale);
        worst_det = std::max(worst_det, std::abs(m.det() - 1.0) / scale);
        if (scale <= 10.0) worst_abs = std::max(worst_abs, std::abs(m.det() - 1.0));
        worst_mu = std::max(worst_mu, std::abs(f.mu_plus * f.mu_minus - 1.0));
    }
    r.check(worst_det <= kConservation, fmt("max |det A - 1| / scale = %.2e (largest scale %.1e)", worst_det, biggest));
    r.check(worst_abs <= kConservation, fmt("max |det A - 1| where scale <= 10: %.2e", worst_abs));
    r.check(worst_mu <= kConservation, fmt("max |mu+ mu- - 1| = %.2e", worst_mu));
    return r;
}

// 2
Result unperturbed_exactness() {
    Result r;
    double worst_m = 0;
    for (double ks : {-0.5, 0.0, 1.0})
        for (cd lam : {cd(0.3, 0.1), cd(1.2, -0.4), cd(0.0, 0.8), cd(2.1, 0.05)}) {
            ProblemSpec p;
            p.kappa_star = ks;
            p.gamma.sine_coeffs = {1.0, 0.5};
            Monodromy a = monodromy(p, lam), b = monodromy_unperturbed(lam, ks);
            double norm = std::max({1.0, std::abs(b.a11), std::abs(b.a12), std::abs(b.a21), std::abs(b.a22)});
            worst_m = std::max({worst_m, std::abs(a.a11 - b.a11) / norm, std::abs(a.a12 - b.a12) / norm,
                                std::abs(a.a21 - b.a21) / norm, std::abs(a.a22 - b.a22) / norm});
        }
    r.check(worst_m <= kClosedMonodromy, fmt("eps=0 monodromy vs closed form, relative to max(1, |A|): %.2e", worst_m));
    std::vector<double> grid(201);
    for (int i = 0; i < 201; ++i) grid[i] = -0.5 + i / 200.0;
    grid.back() = 0.5 - 1e-12;
    double worst_b = 0;
    for (int n : {0, 1, 2})
        for (double ks : {-0.5, 0.0, 1.0})
            for (int s : {1, -1}) {
                ProblemSpec p;
                p.kappa_star = ks;
                p.gamma.sine_coeffs = {1.0};
                BandCurve c = band_sweep(p, n, s, grid, 24);
                for (const auto& bp : c.points)
                    worst_b = std::max(worst_b, std::abs(bp.lambda - unperturbed_band(n, s, bp.tau, ks)));
            }
    r.check(worst_b <= kClosedBands, fmt("eps=0 Bloch bands vs closed form: %.2e", worst_b));
    return r;
}

// 3
Result coefficient_identities() {
    Result r;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double w[4] = {0, 0, 0, 0};
    for (int i = 0; i < 20; ++i) {
        GammaSpec g;
        int K = 1 + i % 4;
        for (int k = 0; k < K; ++k) g.sine_coeffs.push_back(u(rng));
        int n = 1 + i % 3;
        double ks = 1.5 * u(rng);
        PerturbationCoeffs pc = perturbation_coeffs(g, n, ks);
        w[0] = std::max(w[0], pc.residual_sum_rule);
        w[1] = std::max(w[1], pc.residual_split);
        w[2] = std::max(w[2], pc.residual_third);
        w[3] = std::max(w[3], pc.residual_alpha0);
    }
    r.check(w[0] <= kIdentity, fmt("rho0^2 = rho11 + rho22 (second order): %.2e", w[0]));
    r.check(w[1] <= kIdentity, fmt("rho11 = rho22 = rho0^2/2: %.2e", w[1]));
    r.check(w[2] <= kIdentity, fmt("rho11 + rho22 third order = 0: %.2e", w[2]));
    r.check(w[3] <= kIdentity, fmt("rho0 = -pi alpha0 / n: %.2e", w[3]));
    return r;
}

// 4
Result jet_expansion() {
    Result r;
    struct Case {
        std::vector<double> g;
        double ks;
        cd lam;
    };
    std::vector<Case> cases{{{1.0}, 0.0, cd(1.1, 0.0)},
                            {{0.3, 1.0, -0.2}, 0.4, cd(1.3, 0.2)},
                            {{0.5, 0.0, 0.7}, -1.0, cd(0.4, 0.9)}};
    for (const auto& c : cases) {
        cd kap = kappa(c.lam, c.ks);
        GammaSpec g{c.g};
        auto jt = jets(g, kap, 2);
        auto resid = [&](double eps, int J) {
            ProblemSpec p;
            p.kappa_star = c.ks;
            p.epsilon = eps;
            p.gamma = g;
            Monodromy m = monodromy(p, c.lam);
            cd s11 = 0, s12 = 0, s21 = 0, s22 = 0, f = 1.0;
            for (int j = 0; j <= J; ++j, f *= cd(0, eps) * c.lam) {
                s11 += f * jt[j].phi;
                s12 += f * jt[j].psi;
                s21 += f * jt[j].dphi;
                s22 += f * jt[j].dpsi;
            }
            return std::max({std::abs(m.a11 - s11), std::abs(m.a12 - s12), std::abs(m.a21 - s21),
                             std::abs(m.a22 - s22)});
        };
        for (int J : {1, 2}) {
            double ratio = resid(0.02, J) / resid(0.01, J);
            double need = kJetFactor * std::pow(2.0, J + 1);
            r.check(ratio >= need, fmt("lambda=%g%+gi J=%d residual ratio %.3f (need %.2f)", c.lam.real(),
                                       c.lam.imag(), J, ratio, need));
        }
    }
    return r;
}

std::pair<cd, cd> galerkin_pair(const ProblemSpec& p, double tau, cd l0) {
    auto ev = bloch_eigenvalues(p, tau, Window{l0, 0.3}, 32);
    if (ev.empty()) throw NonConvergence("no Galerkin eigenvalue near the threshold");
    std::sort(ev.begin(), ev.end(), [&](cd a, cd b) { return std::abs(a - l0) < std::abs(b - l0); });
    return {ev[0], ev.size() > 1 ? ev[1] : ev[0]};
}

double pair_error(std::pair<cd, cd> g, std::pair<cd, cd> a) {
    double d1 = std::max(std::abs(g.first - a.first), std::abs(g.second - a.second));
    double d2 = std::max(std::abs(g.first - a.second), std::abs(g.second - a.first));
    return std::min(d1, d2);
}

// 5
Result band_bifurcation() {
    Result r;
    ProblemSpec p;
    p.gamma.sine_coeffs = {0.0, 1.0};
    const int n = 1;
    for (double ks : {0.0, -2.0}) {
        p.kappa_star = ks;
        cd l0 = threshold_lambda(n, ks, 1);
        double a0 = alpha_coeffs(p.gamma, n).alpha0;
        for (double t : {0.0, 0.1 * std::abs(l0 * a0 / double(n))}) {
            std::vector<double> dc, dp;
            for (double e : kLadder) {
                p.epsilon = e;
                auto g = galerkin_pair(p, e * t, l0);
                dc.push_back(pair_error(g, asym_center(n, 1, p, t)));
                dp.push_back(pair_error(g, asym_center(n, 1, p, t, AsymForm::printed)));
            }
            double oc = fitted_order(kLadder, dc);
            r.check(oc >= kBandOrder, fmt("center kappa*=%g t=%.4f order %.2f", ks, t, oc));
            r.note(fmt("center kappa*=%g t=%.4f printed-form order %.2f", ks, t, fitted_order(kLadder, dp)));
        }
        cd le = std::sqrt(cd((n + 0.5) * (n + 0.5) + ks));
        for (double t : {0.0, -0.5}) {
            std::vector<double> dc, dp;
            for (double e : kLadder) {
                p.epsilon = e;
                double tau = 0.5 + e * t;
                if (tau >= 0.5) tau -= 1.0;
                auto g = galerkin_pair(p, tau, le);
                dc.push_back(pair_error(g, asym_edge(n, 1, p, t)));
                dp.push_back(pair_error(g, asym_edge(n, 1, p, t, AsymForm::printed)));
            }
            double oc = fitted_order(kLadder, dc);
            r.check(oc >= kBandOrder, fmt("edge kappa*=%g t=%.2f order %.2f", ks, t, oc));
            r.note(fmt("edge kappa*=%g t=%.2f printed-form order %.2f", ks, t, fitted_order(kLadder, dp)));
        }
    }
    return r;
}

// 6
Result midband() {
    Result r;
    for (double ks : {0.0, -2.0}) {
        ProblemSpec p;
        p.gamma.sine_coeffs = {0.0, 1.0};
        p.kappa_star = ks;
        std::vector<double> d;
        for (double e : kLadder) {
            p.epsilon = e;
            cd l0 = unperturbed_band(1, 1, 0.3, ks);
            auto ev = bloch_eigenvalues(p, 0.3, Window{l0, 0.05}, 32);
            if (ev.empty()) throw NonConvergence("no mid-band eigenvalue");
            std::sort(ev.begin(), ev.end(), [&](cd a, cd b) { return std::abs(a - l0) < std::abs(b - l0); });
            d.push_back(std::abs(ev[0] - asym_midband(1, 1, p, 0.3)));
        }
        double o = fitted_order(kLadder, d);
        r.check(o >= kMidOrder, fmt("kappa*=%g tau=0.3 order %.2f", ks, o));
    }
    return r;
}

// Finite-difference Dirichlet eigenvalues of −d²/dx² + V on [−L, L], Richardson-extrapolated in h.
std::vector<double> grid_eigenvalues(const PotentialSpec& v, double L, double h) {
    auto solve = [&](double hh) {
        int N = int(std::lround(2 * L / hh)) - 1;
        Eigen::VectorXd d(N), e(N - 1);
        for (int i = 0; i < N; ++i) d(i) = 2.0 / (hh * hh) + v(-L + (i + 1) * hh);
        e.setConstant(-1.0 / (hh * hh));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
        std::vector<double> out;
        for (int i = 0; i < N && es.eigenvalues()(i) < 0.0; ++i) out.push_back(es.eigenvalues()(i));
        return out;
    };
    auto c = solve(h), f = solve(h / 2);
    std::vector<double> out;
    for (std::size_t i = 0; i < std::min(c.size(), f.size()); ++i) out.push_back((4.0 * f[i] - c[i]) / 3.0);
    return out;
}

// 7
Result scattering() {
    Result r;
    std::vector<PotentialSpec> wells{sech2_well(2, 1), sech2_well(8, 1), gaussian_well(1, 1), gaussian_well(3, 0.7),
                                     exp_well(1.5, 1.2)};
    double worst = 0;
    for (const auto& v : wells)
        for (int n : {1, 2, 3}) worst = std::max(worst, scattering_coefficients(jost_solutions(v, n)).unitarity_residual);
    r.check(worst <= kUnitarity, fmt("max | |a|^2 - |b|^2 - 1 | = %.2e over 5 wells x n=1..3", worst));
    double bmax = 0;
    for (int n : {1, 2, 3}) bmax = std::max(bmax, std::abs(scattering_data(sech2_well(2, 1), n).b));
    r.check(bmax <= kReflectionless, fmt("-2 sech^2: max |b| = %.2e", bmax));
    auto modes = discrete_spectrum(sech2_well(2, 1));
    auto grid = grid_eigenvalues(sech2_well(2, 1), 20.0, 0.01);
    bool ok = modes.size() == 1 && grid.size() == 1;
    r.check(ok, fmt("-2 sech^2: %zu shooting mode(s), %zu grid mode(s)", modes.size(), grid.size()));
    if (ok) {
        r.check(std::abs(modes[0].kappa + 1.0) <= kKappaGrid,
                fmt("shooting kappa1 = %.12f (|+1| = %.1e)", modes[0].kappa, std::abs(modes[0].kappa + 1.0)));
        r.check(std::abs(grid[0] + 1.0) <= kKappaGrid,
                fmt("grid kappa1 = %.12f (|+1| = %.1e)", grid[0], std::abs(grid[0] + 1.0)));
    }
    auto m8 = discrete_spectrum(sech2_well(8, 1));
    auto g8 = grid_eigenvalues(sech2_well(8, 1), 20.0, 0.01);
    std::string ks;
    for (const auto& m : m8) ks += fmt(" %.9f", m.kappa);
    r.note(fmt("-8 sech^2 has %zu modes:%s", m8.size(), ks.c_str()));
    double w8 = 0;
    for (std::size_t i = 0; i < std::min(m8.size(), g8.size()); ++i) w8 = std::max(w8, std::abs(m8[i].kappa - g8[i]));
    r.check(m8.size() == g8.size() && w8 <= kKappaGrid, fmt("-8 sech^2 shooting vs grid: %.1e", w8));
    return r;
}

// 8
Result isolated_series_check() {
    Result r;
    ProblemSpec p;
    p.kappa_star = 0.5;
    p.gamma.sine_coeffs = {1.0, 0.5};
    p.potential = sech2_well(2, 1);
    auto modes = discrete_spectrum(p.potential, 4097);
    for (int s : {1, -1}) {
        IsolatedSeries ser = isolated_series(p, modes[0], s, 2, &modes);
        for (int terms : {1, 2}) {
            std::vector<double> d;
            double re = 0;
            for (double e : kLadder) {
                ProblemSpec q = p;
                q.epsilon = e;
                cd guess = ser.value(e, terms);
                OracleResult o = find_isolated_eigenvalue(q, guess, 0.05);
                if (o.status != OracleStatus::isolated) throw NonConvergence("isolated eigenvalue not found");
                if (terms == 2) record(q, o, "isolated");
                d.push_back(std::abs(o.lambda - guess));
                re = std::max(re, std::abs(o.lambda.real()));
            }
            double ord = fitted_order(kLadder, d);
            double need = terms == 1 ? kSeriesOrder1 : kSeriesOrder2;
            r.check(ord >= need, fmt("sign %+d truncated at Lambda%d: order %.2f (need %.1f)", s, terms, ord, need));
            if (terms == 2) r.check(re <= kPureImag, fmt("sign %+d max |Re lambda| = %.1e", s, re));
        }
    }
    ProblemSpec z = p;
    z.kappa_star = 1.0;
    auto zm = discrete_spectrum(z.potential);
    ZeroModeAnalysis za = zero_mode_analysis(z, zm[0]);
    r.check(std::abs(za.coupling) <= 1e-12, fmt("(gamma Psi, Psi) = %.1e", za.coupling));
    for (double e : kLadder) {
        z.epsilon = e;
        double L = oracle_length(z);
        MatchingValue mv = matching_value(z, 0.0, L);
        double R = 10.0 * e * z.gamma.sup_abs();
        ZeroCluster zc = zeros_in_disc(z, 0.0, 1e-3 * R);
        r.check(mv.normalized <= kZero, fmt("eps=%g normalized D(0) = %.1e", e, mv.normalized));
        r.check(zc.count >= 1 && std::abs(zc.centroid) <= kZero,
                fmt("eps=%g zeros near 0: count %d, centroid %.1e", e, zc.count, std::abs(zc.centroid)));
        Winding w = winding_number(z, 0.0, R, {}, true);
        r.check(w.number == 0 && !w.band_crossing,
                fmt("eps=%g winding on |lambda|=%.2f excluding 0: %d", e, R, w.number));
        g_found.push_back({z, 0.0, "zero"});
    }
    return r;
}

struct Fixture {
    ProblemSpec p;
    EmergencePrediction e;
    std::string name;
};

// Walks (V, γ, κ*) with n = 1 and both branches; keeps generic-regime predictions, at most
// two per (condition, real or imaginary λ₀) class.
void scan_fixtures(std::vector<Fixture>& yes, std::vector<Fixture>& no) {
    std::vector<std::pair<std::string, PotentialSpec>> wells{{"gauss(1,1)", gaussian_well(1, 1)},
                                                             {"gauss(2,1)", gaussian_well(2, 1)},
                                                             {"sech2(1,1)", sech2_well(1, 1)},
                                                             {"exp(1,1.5)", exp_well(1, 1.5)},
                                                             {"sech2(3,1.3)", sech2_well(3, 1.3)}};
    std::vector<std::vector<double>> gammas{{0.0, 1.0}, {0.5, 1.0, 0.3}, {1.0}};
    std::map<std::pair<bool, bool>, int> taken;
    for (double ks : {-2.0, 0.0, -0.5})
        for (const auto& [wn, v] : wells)
            for (const auto& g : gammas) {
                ProblemSpec p;
                p.kappa_star = ks;
                p.gamma.sine_coeffs = g;
                p.potential = v;
                const bool imag = 1.0 + ks < 0.0;
                try {
                    PerturbationCoeffs pc = perturbation_coeffs(p.gamma, 1, ks, 1);
                    ScatteringData sd = threshold_constants(scattering_data(v, 1), pc, p);
                    if (sd.regime != Regime::generic) continue;
                    for (int br : {1, -1}) {
                        EmergencePrediction e = emergent_prediction(p, pc, sd, 1, br);
                        if (e.exists == Existence::indeterminate) continue;
                        const bool exists = e.exists == Existence::yes;
                        if (taken[{exists, imag}] >= 2) continue;
                        ++taken[{exists, imag}];
                        std::string gs;
                        for (double c : g) gs += fmt("%s%g", gs.empty() ? "" : ",", c);
                        std::string name = fmt("%s gamma={%s} kappa*=%g branch %+d cond %.4g", wn.c_str(), gs.c_str(),
                                               ks, br, e.condition_value);
                        (exists ? yes : no).push_back({p, e, name});
                    }
                } catch (const NonConvergence&) {
                } catch (const Refused&) {
                }
            }
}

// 9
Result emergent() {
    Result r;
    std::vector<Fixture> yes, no;
    scan_fixtures(yes, no);
    r.check(!yes.empty(), fmt("fixtures with condition 7.39 met: %zu", yes.size()));
    r.check(!no.empty(), fmt("fixtures with condition 7.40 met: %zu", no.size()));
    bool any_yes = false;
    for (const auto& f : yes) {
        auto pred = [&](double e) { return f.e.value(e, false); };
        auto rad = [&](double e) { return 0.8 * e * std::abs(f.e.first_order) + 1e-4; };
        DefectReport d = eigenvalue_defect_order(f.p, pred, kLadder, rad);
        std::string st;
        for (auto s : d.status) st += " " + status_name(s);
        if (d.contradiction) {
            r.note(fmt("7.39 %s: oracle statuses%s (no eigenvalue near the prediction)", f.name.c_str(), st.c_str()));
            continue;
        }
        std::vector<double> d2;
        for (std::size_t k = 0; k < d.oracle.size(); ++k) d2.push_back(std::abs(d.oracle[k] - f.e.value(d.epsilon[k], true)));
        double o2 = fitted_order(d.epsilon, d2);
        r.note(fmt("7.39 %s: order %.2f, with Lambda %.2f", f.name.c_str(), d.order, o2));
        for (std::size_t k = 0; k < d.oracle.size(); ++k) {
            ProblemSpec q = f.p;
            q.epsilon = d.epsilon[k];
            g_found.push_back({q, d.oracle[k], "emergent"});
        }
        if (d.order >= kEmergentOrder && o2 >= kLambdaOrder) any_yes = true;
    }
    r.check(any_yes, "a 7.39 fixture with order >= 1.7 and Lambda order >= 2.5");
    bool any_no = false;
    for (const auto& f : no) {
        std::string ws;
        bool all0 = true;
        for (double e : kLadder) {
            ProblemSpec q = f.p;
            q.epsilon = e;
            double rad = 0.3 * e * std::abs(f.e.first_order);
            Winding w;
            for (int k = 0; k < 6; ++k, rad *= 0.5) {
                w = winding_number(q, f.e.value(e, false), rad);
                if (!w.band_crossing) break;
            }
            ws += fmt(" %d", w.number);
            if (w.number != 0 || w.band_crossing) all0 = false;
        }
        r.note(fmt("7.40 %s: windings%s", f.name.c_str(), ws.c_str()));
        if (!all0) {
            auto pred = [&](double e) { return f.e.value(e, false); };
            auto rad = [&](double e) { return 0.8 * e * std::abs(f.e.first_order) + 1e-4; };
            DefectReport d = eigenvalue_defect_order(f.p, pred, kLadder, rad);
            if (!d.contradiction) {
                r.note(fmt("7.40 %s: eigenvalue present, distance to first-order prediction has order %.2f",
                           f.name.c_str(), d.order));
                for (std::size_t k = 0; k < d.oracle.size(); ++k) {
                    ProblemSpec q = f.p;
                    q.epsilon = d.epsilon[k];
                    g_found.push_back({q, d.oracle[k], "emergent"});
                }
            }
        }
        any_no = any_no || all0;
    }
    r.check(any_no, "a 7.40 fixture with winding 0 on the whole ladder");
    return r;
}

// 10
Result enclosure() {
    Result r;
    double smallest = 1e300;
    int bad = 0;
    for (const auto& f : g_found) {
        Enclosure e = spectrum_enclosure_check(f.p, f.lambda, kappas_of(f.p.potential));
        smallest = std::min(smallest, e.margin);
        if (!e.inside) ++bad;
    }
    r.check(!g_found.empty(), fmt("%zu oracle eigenvalues collected", g_found.size()));
    r.check(bad == 0, fmt("%d outside; smallest margin %.3e (slack %.0e)", bad, smallest, kEnclosureSlack));
    return r;
}

// 11
Result symmetry() {
    Result r;
    int checked = 0;
    double worst = 0;
    for (const auto& f : g_found) {
        if (f.label == "zero") continue;
        std::vector<cd> images{-std::conj(f.lambda)};
        if (f.p.potential.is_even()) images.push_back(std::conj(f.lambda));
        for (cd img : images) {
            if (std::abs(img - f.lambda) < 1e-12) continue;
            OracleResult o = find_isolated_eigenvalue(f.p, img, 1e-3);
            double d = o.status == OracleStatus::isolated ? std::abs(o.lambda - img) : 1e300;
            worst = std::max(worst, d);
            ++checked;
        }
    }
    r.check(checked > 0, fmt("%d mirrored searches", checked));
    r.check(worst <= kPairing, fmt("max pairing distance %.2e", worst));
    return r;
}

std::set<int> parse_set(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.insert(std::stoi(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> known_red;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--known-red" && i + 1 < argc) known_red = parse_set(argv[++i]);
        else {
            std::fprintf(stderr, "usage: %s [--known-red N[,M..]]\n", argv[0]);
            return 2;
        }
    }
    std::vector<std::pair<std::string, std::function<Result()>>> criteria{
        {"Floquet conservation", floquet_conservation},
        {"unperturbed exactness", unperturbed_exactness},
        {"coefficient identities", coefficient_identities},
        {"monodromy vs jet expansion", jet_expansion},
        {"band bifurcation", band_bifurcation},
        {"mid-band asymptotics", midband},
        {"scattering", scattering},
        {"isolated eigenvalue series", isolated_series_check},
        {"emergent eigenvalues", emergent},
        {"enclosure", enclosure},
        {"symmetry", symmetry}};
    std::set<int> failed;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = int(i) + 1;
        auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r.pass = false;
            r.info.push_back(std::string("bad  exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!r.pass) failed.insert(id);
        const char* tag = r.pass ? "PASS" : known_red.count(id) ? "FAIL (known red)" : "FAIL";
        std::printf("%s criterion %d: %s  [%.1fs]\n", tag, id, criteria[i].first.c_str(), secs);
        for (const auto& line : r.info) std::printf("      %s\n", line.c_str());
        std::fflush(stdout);
    }
    if (failed == known_red) return 0;
    for (int id : known_red)
        if (!failed.count(id)) std::printf("XPASS criterion %d is declared known red but passed\n", id);
    return 1;
}
