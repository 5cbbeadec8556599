#include "pencil/scattering.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "pencil/errors.hpp"
#include "pencil/floquet.hpp"
#include "pencil/ode.hpp"
#include "pencil/quadrature.hpp"

namespace pencil {

namespace {

std::vector<double> uniform_grid(double a, double b, int points) {
    std::vector<double> x(points);
    for (int i = 0; i < points; ++i) x[i] = a + (b - a) * i / (points - 1);
    x.back() = b;
    return x;
}

ode::System schrodinger(const PotentialSpec& v, double energy) {
    // u'' = (V − E) u on real (u, u')
    return [&v, energy](const ode::State& y, ode::State& dy, double x) {
        dy[0] = y[1];
        dy[1] = (v(x) - energy) * y[0];
    };
}

ode::System schrodinger_complex(const PotentialSpec& v, double energy) {
    return [&v, energy](const ode::State& y, ode::State& dy, double x) {
        double q = v(x) - energy;
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = q * y[0];
        dy[3] = q * y[1];
    };
}

double wrap_pi(double z) {
    z = std::fmod(z, kPi);
    if (z < 0.0) z += kPi;
    if (z >= kPi) z -= kPi;
    return z;
}

}  // namespace

JostSolutions jost_solutions(const PotentialSpec& v, int n, int grid_points) {
    if (n < 1) throw Refused("Jost solutions require n >= 1");
    if (grid_points < 3) throw Refused("grid_points must be >= 3");
    JostSolutions js;
    js.n = n;
    js.L = v.support_cutoff();
    js.x = uniform_grid(-js.L, js.L, grid_points);
    const double L = js.L, nn = n;
    auto f = schrodinger_complex(v, nn * nn);

    // Y₁ from +L leftward
    cd e = std::exp(cd(0.0, nn * L));
    cd de = cd(0.0, nn) * e;
    std::vector<double> xr(js.x.rbegin(), js.x.rend());
    auto s1 = ode::integrate_at(f, {e.real(), e.imag(), de.real(), de.imag()}, xr);
    // Y₂ from −L rightward: Y₂(−L) = e^{inL}, Y₂'(−L) = −in e^{inL}
    cd e2 = std::exp(cd(0.0, nn * L));
    cd de2 = cd(0.0, -nn) * e2;
    auto s2 = ode::integrate_at(f, {e2.real(), e2.imag(), de2.real(), de2.imag()}, js.x);
    const int m = grid_points;
    js.y1.resize(m);
    js.dy1.resize(m);
    js.y2.resize(m);
    js.dy2.resize(m);
    for (int i = 0; i < m; ++i) {
        const auto& a = s1[m - 1 - i];
        js.y1[i] = cd(a[0], a[1]);
        js.dy1[i] = cd(a[2], a[3]);
        js.y2[i] = cd(s2[i][0], s2[i][1]);
        js.dy2[i] = cd(s2[i][2], s2[i][3]);
    }
    return js;
}

ScatteringCoeffs scattering_coefficients(const JostSolutions& js) {
    const double L = js.L, nn = js.n;
    cd em = std::exp(cd(0.0, -nn * L)), ep = std::exp(cd(0.0, nn * L));
    cd y = js.y2.back(), dy = js.dy2.back();
    // [em, ep; −in em, in ep] [a; b] = [y; dy]
    cd m11 = em, m12 = ep, m21 = cd(0.0, -nn) * em, m22 = cd(0.0, nn) * ep;
    cd det = m11 * m22 - m12 * m21;
    ScatteringCoeffs sc;
    sc.a = (y * m22 - m12 * dy) / det;
    sc.b = (m11 * dy - m21 * y) / det;
    sc.unitarity_residual = std::abs(std::norm(sc.a) - std::norm(sc.b) - 1.0);
    if (sc.unitarity_residual > 1e-6)
        throw NonConvergence("scattering unitarity residual " + std::to_string(sc.unitarity_residual) +
                             " exceeds 1e-6");
    return sc;
}

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::generic: return "generic";
        case Regime::degenerate_plus: return "degenerate_plus";
        case Regime::degenerate_minus: return "degenerate_minus";
    }
    return "unknown";
}

std::string parity_name(Parity p) {
    switch (p) {
        case Parity::even: return "even";
        case Parity::odd: return "odd";
        case Parity::none: return "none";
    }
    return "unknown";
}

ScatteringData scattering_data(const PotentialSpec& v, int n) {
    JostSolutions js = jost_solutions(v, n, 3);
    ScatteringCoeffs sc = scattering_coefficients(js);
    ScatteringData sd;
    sd.n = n;
    sd.a = sc.a;
    sd.b = sc.b;
    sd.a_r = sc.a.real();
    sd.a_i = sc.a.imag();
    sd.b_r = sc.b.real();
    sd.b_i = sc.b.imag();
    sd.unitarity_residual = sc.unitarity_residual;
    sd.theta = std::arg(sc.a);
    if (sd.theta < 0.0) sd.theta += kTwoPi;
    const double A = std::abs(sc.a);
    const double ac = std::acos(std::clamp(sd.b_r / A, -1.0, 1.0));
    double zp = wrap_pi(-0.5 * (sd.theta + ac));
    double zm = wrap_pi(-0.5 * (sd.theta - ac));
    bool deg_p = std::abs(sd.a_i + sd.b_r) < kRegimeThreshold;
    bool deg_m = std::abs(sd.a_i - sd.b_r) < kRegimeThreshold;
    auto W = [&](double z) { return A * std::cos(2.0 * z + sd.theta) - sd.b_r; };
    // pick the root of W that is not the fixed degenerate point
    auto other = [&](double fixed) { return std::abs(zp - fixed) > std::abs(zm - fixed) ? zp : zm; };
    if (deg_p && deg_m) {
        sd.regime = Regime::degenerate_plus;
        zp = kPi / 4.0;
        zm = 3.0 * kPi / 4.0;
    } else if (deg_p) {
        sd.regime = Regime::degenerate_plus;
        zm = other(kPi / 4.0);
        zp = kPi / 4.0;
    } else if (deg_m) {
        sd.regime = Regime::degenerate_minus;
        zp = other(3.0 * kPi / 4.0);
        zm = 3.0 * kPi / 4.0;
    }
    sd.zeta_plus = zp;
    sd.zeta_minus = zm;
    sd.W_plus = W(zp);
    sd.W_minus = W(zm);
    sd.dW_plus = -A * std::sin(2.0 * zp + sd.theta);
    sd.dW_minus = -A * std::sin(2.0 * zm + sd.theta);
    return sd;
}

namespace {

struct PeriodIntegral {
    cd value;
    int periods = 0;
    double alpha_measured = 0.0;
    std::vector<double> x, X;
};

// lim_N ∫_{−2πN}^{2πN} (γ − c) X² dx over N = 1, 2, 4, … with X = 2 Re e^{iζ} Y₁.
PeriodIntegral period_integral(const ProblemSpec& p, int n, double zeta, double c) {
    const PotentialSpec& v = p.potential;
    const double L = v.support_cutoff(), nn = n;
    const cd ez = std::exp(cd(0.0, zeta));
    auto f = [&](const ode::State& y, ode::State& dy, double x) {
        double q = v(x) - nn * nn;
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = q * y[0];
        dy[3] = q * y[1];
        double X = 2.0 * (ez * cd(y[0], y[1])).real();
        dy[4] = (p.gamma(x) - c) * X * X;
    };
    ode::Options opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-12;
    PeriodIntegral out;
    double prev = 0.0;
    bool have_prev = false;
    for (int N = 1; N <= 1 << 12; N *= 2) {
        double top = kTwoPi * N;
        double start = std::max(top, L);
        cd e = std::exp(cd(0.0, nn * start)), de = cd(0.0, nn) * e;
        ode::State y{e.real(), e.imag(), de.real(), de.imag(), 0.0};
        ode::integrate(f, y, start, top, opt);
        y[4] = 0.0;
        ode::integrate(f, y, top, -top, opt);
        double val = -y[4];  // integrated right to left
        if (have_prev && std::abs(val - prev) < 1e-8) {
            out.value = val;
            out.periods = N;
            break;
        }
        prev = val;
        have_prev = true;
        if (N == 1 << 12) throw NonConvergence("period integral did not converge");
    }
    // X on [−L, L] and its −∞ amplitude
    auto fx = schrodinger_complex(v, nn * nn);
    out.x = uniform_grid(-L, L, 513);
    std::vector<double> xr(out.x.rbegin(), out.x.rend());
    cd e = std::exp(cd(0.0, nn * L)), de = cd(0.0, nn) * e;
    auto s = ode::integrate_at(fx, {e.real(), e.imag(), de.real(), de.imag()}, xr, opt);
    out.X.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out.X[s.size() - 1 - i] = 2.0 * (ez * cd(s[i][0], s[i][1])).real();
    const auto& last = s.back();  // at x = −L
    double X = 2.0 * (ez * cd(last[0], last[1])).real();
    double dX = 2.0 * (ez * cd(last[2], last[3])).real();
    double phi = -nn * L - zeta;
    out.alpha_measured = 0.5 * (X * std::sin(phi) + dX * std::cos(phi) / nn);
    return out;
}

}  // namespace

ScatteringData threshold_constants(ScatteringData sd, const PerturbationCoeffs& pc, const ProblemSpec& p) {
    if (pc.n != sd.n) throw Refused("coefficients and scattering data refer to different n");
    if (std::abs(pc.rho0) < 1e-12) throw Refused("rho0(lambda0) = 0 violates the nondegeneracy assumption");
    const double nn = sd.n, A = std::abs(sd.a), th = sd.theta;
    const cd l0 = pc.lambda0, r0 = pc.rho0;
    const cd l2 = l0 * l0;

    auto fill_branch = [&](double z, cd& ups, cd& zhat, cd& s1, double& alpha, double& alpha_lim, double& alpha_meas,
                           cd& integral, std::vector<double>& X) {
        const double s2z = std::sin(2.0 * z), c2z = std::cos(2.0 * z);
        PeriodIntegral pi = period_integral(p, sd.n, z, nn * r0.real() * s2z / kPi);
        integral = pi.value;
        sd.periods_used = std::max(sd.periods_used, pi.periods);
        alpha_meas = pi.alpha_measured;
        X = pi.X;
        if (sd.x.empty()) sd.x = pi.x;
        alpha = A * std::sin(2.0 * z - th) + sd.b_i;
        alpha_lim = sd.b_i - A * std::sin(2.0 * z + th);
        ups = (A * std::sin(z + th) + sd.b_i) / (4.0 * nn * A * std::sin(2.0 * z + th));
        const double al = alpha;
        cd t1 = al * l0 * pc.rho_hat / kPi * s2z;
        cd t2 = -l2 * r0 * r0 * (al * al - 1.0) * s2z * s2z * c2z;
        cd t3 = -2.0 * nn * r0 * (nn * r0 + l2 * pc.drho0_dkappa) * (al + (al * al + 1.0) / 2.0 * s2z) * s2z;
        double ca = al * std::cos(z) + std::sin(z), sa = al * std::sin(z) + std::cos(z);
        cd t4 = -2.0 * kPi * nn * nn * l2 * pc.rho12_2 * ca * ca - 2.0 * kPi * l2 * pc.rho21_2 * sa * sa;
        s1 = (t1 + t2 + t3 + t4) / (kPi * nn * l0 * r0 * c2z * c2z);
        zhat = cd(0.0, 1.0) * l0 * ups * integral + cd(0.0, 1.0) * ups * s1;
    };

    if (sd.regime == Regime::generic) {
        fill_branch(sd.zeta_plus, sd.upsilon_plus, sd.zhat_plus, sd.s1_plus, sd.alpha_plus, sd.alpha_limit_plus,
                    sd.alpha_measured_plus, sd.period_integral_plus, sd.X_plus);
        fill_branch(sd.zeta_minus, sd.upsilon_minus, sd.zhat_minus, sd.s1_minus, sd.alpha_minus,
                    sd.alpha_limit_minus, sd.alpha_measured_minus, sd.period_integral_minus, sd.X_minus);
    } else {
        if (std::abs(sd.b_i) < kRegimeThreshold) throw Refused("degenerate regime requires b_i(n) != 0");
        sd.s2 = -1.0 / (2.0 * kPi * nn * l0 * r0) *
                ((nn * nn + l2) * r0 * r0 + nn * l2 * r0 * pc.drho0_dkappa - 2.0 * kPi * nn * nn * l2 * pc.rho12_2);
        auto xi = [&](double z, double sgn, cd& integral, double& alpha_meas, std::vector<double>& X) {
            PeriodIntegral pi = period_integral(p, sd.n, z, nn * r0.real() * std::sin(2.0 * z) / kPi);
            integral = pi.value;
            sd.periods_used = std::max(sd.periods_used, pi.periods);
            alpha_meas = pi.alpha_measured;
            X = pi.X;
            if (sd.x.empty()) sd.x = pi.x;
            double arb = sd.a_r + sgn * sd.b_i;
            return -arb / (4.0 * nn * sd.b_i) * (l0 * integral - 4.0 * nn * (1.0 + arb * arb) * sd.s2);
        };
        sd.xi_hat_plus = xi(sd.zeta_plus, +1.0, sd.period_integral_plus, sd.alpha_measured_plus, sd.X_plus);
        sd.xi_hat_minus = xi(sd.zeta_minus, -1.0, sd.period_integral_minus, sd.alpha_measured_minus, sd.X_minus);
        sd.alpha_plus = A * std::sin(2.0 * sd.zeta_plus - th) + sd.b_i;
        sd.alpha_minus = A * std::sin(2.0 * sd.zeta_minus - th) + sd.b_i;
        sd.alpha_limit_plus = sd.b_i - A * std::sin(2.0 * sd.zeta_plus + th);
        sd.alpha_limit_minus = sd.b_i - A * std::sin(2.0 * sd.zeta_minus + th);
    }
    sd.complete = true;
    return sd;
}

namespace {

struct Shot {
    int nodes = 0;
    double mismatch = 0.0;  // normalized Wronskian at 0
};

// Decaying solutions from ±L at energy κ < 0.
struct Branches {
    std::vector<double> xl, xr;
    std::vector<ode::State> left, right;
};

Branches shoot(const PotentialSpec& v, double kap, double L, int half_points) {
    Branches b;
    double s = std::sqrt(-kap);
    auto f = schrodinger(v, kap);
    b.xl = uniform_grid(-L, 0.0, half_points);
    b.xr = uniform_grid(L, 0.0, half_points);
    b.left = ode::integrate_at(f, {1.0, s}, b.xl);
    b.right = ode::integrate_at(f, {1.0, -s}, b.xr);
    return b;
}

double mismatch(const Branches& b) {
    const auto& l = b.left.back();
    const auto& r = b.right.back();
    double w = l[0] * r[1] - l[1] * r[0];
    double scale = std::hypot(l[0], l[1]) * std::hypot(r[0], r[1]);
    return scale > 0.0 ? w / scale : w;
}

// Number of eigenvalues below κ: zeros of the left-decaying solution on ℝ.
int count_below(const PotentialSpec& v, double kap, double L, double h) {
    double s = std::sqrt(-kap);
    int steps = std::max(64, int(std::ceil(2.0 * L / h)));
    auto xs = uniform_grid(-L, L, steps + 1);
    auto st = ode::integrate_at(schrodinger(v, kap), {1.0, s}, xs);
    int nodes = 0;
    for (std::size_t i = 1; i < st.size(); ++i)
        if ((st[i - 1][0] > 0.0) != (st[i][0] > 0.0)) ++nodes;
    // beyond L: u = A e^{s y} + B e^{−s y}, y = x − L
    double u = st.back()[0], du = st.back()[1];
    double Ac = 0.5 * (u + du / s), Bc = 0.5 * (u - du / s);
    if (Ac != 0.0 && -Bc / Ac > 1.0) ++nodes;
    return nodes;
}

}  // namespace

std::vector<DiscreteMode> discrete_spectrum(const PotentialSpec& v, int grid_points) {
    std::vector<DiscreteMode> modes;
    if (v.is_zero()) return modes;
    const double vmin = v.min_value();
    if (vmin >= 0.0) return modes;
    const double L = v.support_cutoff();
    const double h = std::min(0.05, 0.3 / std::sqrt(-vmin));
    const double top = -1e-10;
    const int total = count_below(v, top, L, h);
    if (grid_points % 2 == 0) ++grid_points;
    const int half = grid_points / 2 + 1;
    for (int j = 0; j < total; ++j) {
        double lo = vmin, hi = top;
        int clo = 0, chi = total;
        // bisect on the node count until [lo, hi] holds exactly the j-th level
        while (!(clo == j && chi == j + 1) && hi - lo > 1e-12 * std::max(1.0, std::abs(lo))) {
            double mid = 0.5 * (lo + hi);
            int cm = count_below(v, mid, L, h);
            if (cm <= j) {
                lo = mid;
                clo = cm;
            } else {
                hi = mid;
                chi = cm;
            }
        }
        auto fm = [&](double k) { return mismatch(shoot(v, k, L, 65)); };
        double kap;
        double flo = fm(lo), fhi = fm(hi);
        if (flo * fhi < 0.0) {
            boost::uintmax_t it = 200;
            auto r = boost::math::tools::toms748_solve(fm, lo, hi, flo, fhi,
                                                       boost::math::tools::eps_tolerance<double>(50), it);
            kap = 0.5 * (r.first + r.second);
        } else {
            kap = 0.5 * (lo + hi);
        }
        Branches b = shoot(v, kap, L, half);
        DiscreteMode m;
        m.index = j;
        m.kappa = kap;
        m.residual = std::abs(mismatch(b));
        const auto& l0 = b.left.back();
        const auto& r0 = b.right.back();
        double scale = std::abs(r0[0]) > std::abs(r0[1]) ? l0[0] / r0[0] : l0[1] / r0[1];
        m.x.resize(2 * half - 1);
        m.psi.resize(2 * half - 1);
        for (int i = 0; i < half; ++i) {
            m.x[i] = b.xl[i];
            m.psi[i] = b.left[i][0];
        }
        for (int i = 0; i < half - 1; ++i) {
            m.x[2 * half - 2 - i] = b.xr[i];
            m.psi[2 * half - 2 - i] = scale * b.right[i][0];
        }
        const double dx = m.x[1] - m.x[0];
        double norm2 = 0.0;
        for (std::size_t i = 0; i < m.psi.size(); ++i) {
            double w = (i == 0 || i + 1 == m.psi.size()) ? 0.5 : 1.0;
            norm2 += w * m.psi[i] * m.psi[i] * dx;
        }
        double nrm = std::sqrt(norm2);
        double peak = 0.0;
        for (double u : m.psi) peak = std::max(peak, std::abs(u));
        double sgn = 1.0;
        for (double u : m.psi)
            if (std::abs(u) > 1e-3 * peak) {
                sgn = u > 0.0 ? 1.0 : -1.0;
                break;
            }
        for (double& u : m.psi) u *= sgn / nrm;
        double ov = 0.0;
        const std::size_t M = m.psi.size();
        for (std::size_t i = 0; i < M; ++i) {
            double w = (i == 0 || i + 1 == M) ? 0.5 : 1.0;
            ov += w * m.psi[i] * m.psi[M - 1 - i] * dx;
        }
        m.parity_overlap = ov;
        if (std::abs(ov - 1.0) < 1e-6) m.parity = Parity::even;
        else if (std::abs(ov + 1.0) < 1e-6) m.parity = Parity::odd;
        else m.parity = Parity::none;
        modes.push_back(std::move(m));
    }
    return modes;
}

}  // namespace pencil
