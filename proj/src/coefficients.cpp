#include "pencil/coefficients.hpp"

#include <cmath>

#include "pencil/errors.hpp"
#include "pencil/ode.hpp"
#include "pencil/quadrature.hpp"

namespace pencil {

namespace {

constexpr double kSmallKappa = 1e-4;

cd sinc(cd z) {
    if (std::abs(z) < 1e-3) {
        cd z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sin(z) / z;
}

int gl_panels(const GammaSpec& g, cd kappa) {
    double freq = g.max_harmonic() + 2.0 * std::abs(kappa);
    return std::max(8, int(std::ceil(freq)));
}

// M_m = ∫₀^{2π} γ(t) (π − t)^m dt
double moment(const GammaSpec& g, int m) {
    return quad::gauss_legendre([&](double t) { return g(t) * std::pow(kPi - t, m); }, 0.0, kTwoPi,
                                std::max(8, g.max_harmonic()));
}

}  // namespace

cd rho0_of_kappa(const GammaSpec& g, cd kappa) {
    if (std::abs(kappa) < kSmallKappa) {
        // sin(2κw)/(2κ) = w − (2κ)² w³/6 + (2κ)⁴ w⁵/120
        cd k2 = 4.0 * kappa * kappa;
        return moment(g, 1) - k2 * moment(g, 3) / 6.0 + k2 * k2 * moment(g, 5) / 120.0;
    }
    cd sum = 0.0;
    for (int k = 1; k <= g.max_harmonic(); ++k) {
        double gk = g.coeff(k);
        if (gk == 0.0) continue;
        double sgn = (k % 2 == 0) ? -1.0 : 1.0;
        sum += gk * sgn * kPi * (sinc((double(k) - 2.0 * kappa) * kPi) - sinc((double(k) + 2.0 * kappa) * kPi));
    }
    return sum / (2.0 * kappa);
}

cd rho0(const GammaSpec& g, cd lambda, double kappa_star) { return rho0_of_kappa(g, kappa(lambda, kappa_star)); }

cd drho0_dkappa_at(const GammaSpec& g, cd k) {
    if (std::abs(k) < kSmallKappa) {
        return -8.0 * k * moment(g, 3) / 6.0 + 64.0 * k * k * k * moment(g, 5) / 120.0;
    }
    auto f = [&](double t) -> cd {
        double w = kPi - t;
        return g(t) * (w * std::cos(2.0 * k * w) / k - std::sin(2.0 * k * w) / (2.0 * k * k));
    };
    return quad::gauss_legendre(f, 0.0, kTwoPi, gl_panels(g, k));
}

cd drho0_dkappa(const GammaSpec& g, int n) { return drho0_dkappa_at(g, cd(n)); }

std::vector<FundamentalValues> jets(const GammaSpec& g, cd k, int J, double x_end) {
    if (J < 0 || J > 4) throw Refused("jet order must lie in 0..4");
    const int m = J + 1;
    // per order j: Φ_j, Φ_j', Ψ_j, Ψ_j' as 8 reals
    ode::State y(8 * m, 0.0);
    y[0] = 1.0;  // Φ₀(0)
    y[6] = 1.0;  // Ψ₀'(0)
    const cd k2 = k * k;
    auto rhs = [&](const ode::State& v, ode::State& dv, double x) {
        double gx = g(x);
        for (int j = 0; j < m; ++j) {
            for (int s = 0; s < 2; ++s) {
                int o = 8 * j + 4 * s;
                cd u(v[o], v[o + 1]);
                cd f = -k2 * u;
                if (j > 0) f += gx * cd(v[o - 8], v[o - 7]);
                dv[o] = v[o + 2];
                dv[o + 1] = v[o + 3];
                dv[o + 2] = f.real();
                dv[o + 3] = f.imag();
            }
        }
    };
    ode::Options opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    ode::integrate(rhs, y, 0.0, x_end, opt);
    std::vector<FundamentalValues> out(m);
    for (int j = 0; j < m; ++j) {
        const double* v = &y[8 * j];
        out[j] = {cd(v[0], v[1]), cd(v[2], v[3]), cd(v[4], v[5]), cd(v[6], v[7])};
    }
    return out;
}

namespace {

template <class Kernel>
double nested(const GammaSpec& g, Kernel kernel) {
    auto outer = [&](double x) {
        if (x <= 0.0) return 0.0;
        auto inner = [&](double t) { return g(t) * kernel(x, t); };
        return g(x) * quad::adaptive(inner, 0.0, x, 1e-11);
    };
    return quad::adaptive(outer, 0.0, kTwoPi, 1e-10);
}

}  // namespace

cd rho_hat(const GammaSpec& g, int n, double kappa_star) {
    if (n == 0) throw Refused("rho_hat requires n != 0");
    double nn = n;
    double r0 = rho0_of_kappa(g, cd(nn)).real();
    double dbl = nested(g, [nn](double x, double t) { return (kPi + t - x) * std::sin(2.0 * nn * (t - x)); });
    return (nn * nn - kappa_star) * r0 * r0 - (nn + kappa_star / nn) * dbl;
}

cd rho12_2(const GammaSpec& g, int n) {
    if (n == 0) throw Refused("rho12_2 requires n != 0");
    double nn = n;
    auto outer = [&](double x) {
        if (x <= 0.0) return 0.0;
        auto inner = [&](double t) { return g(t) * std::sin(nn * t) * std::sin(nn * (x - t)); };
        return g(x) * std::sin(nn * x) * quad::adaptive(inner, 0.0, x, 1e-11);
    };
    return -quad::adaptive(outer, 0.0, kTwoPi, 1e-10) / (nn * nn * nn);
}

cd rho21_2(const GammaSpec& g, int n) {
    if (n == 0) throw Refused("rho21_2 requires n != 0");
    double nn = n;
    auto outer = [&](double x) {
        if (x <= 0.0) return 0.0;
        auto inner = [&](double t) { return g(t) * std::cos(nn * t) * std::sin(nn * (x - t)); };
        return g(x) * std::cos(nn * x) * quad::adaptive(inner, 0.0, x, 1e-11);
    };
    return quad::adaptive(outer, 0.0, kTwoPi, 1e-10) / nn;
}

namespace {

// 2π Σ_{k≠±n} |f̂_k|²/(k² − n²) for f = γ ψ with ψ = (e^{inx} ± e^{−inx})/(2√π) (times −i for sine).
double alpha1_component(const GammaSpec& g, int n, int n_modes, bool cosine) {
    const double c = 1.0 / (2.0 * std::sqrt(kPi));
    // ψ̂_{n} and ψ̂_{−n}
    cd pn = cosine ? cd(c) : cd(0.0, -c);
    cd pm = cosine ? cd(c) : cd(0.0, c);
    double sum = 0.0;
    for (int k = -n_modes; k <= n_modes; ++k) {
        if (k == n || k == -n) continue;
        cd f = g.fourier(k - n) * pn + g.fourier(k + n) * pm;
        sum += std::norm(f) / double(k * k - n * n);
    }
    return kTwoPi * sum;
}

}  // namespace

AlphaCoeffs alpha_coeffs(const GammaSpec& g, int n, int n_modes) {
    if (n < 1) throw Refused("alpha_coeffs requires n >= 1");
    AlphaCoeffs a;
    a.alpha0 = 0.5 * g.coeff(2 * n);
    a.n_modes = n_modes;
    a.alpha1_pp = alpha1_component(g, n, n_modes, true);
    a.alpha1_mm = alpha1_component(g, n, n_modes, false);
    a.alpha1 = a.alpha1_pp + a.alpha1_mm;
    double pp2 = alpha1_component(g, n, 2 * n_modes, true);
    double mm2 = alpha1_component(g, n, 2 * n_modes, false);
    if (std::abs(pp2 + mm2 - a.alpha1) > 1e-8)
        throw NonConvergence("alpha_1 Fourier truncation not converged; raise n_modes");
    return a;
}

cd threshold_lambda(int n, double kappa_star, int sign) {
    cd l = std::sqrt(cd(double(n) * n + kappa_star));
    return sign >= 0 ? l : -l;
}

PerturbationCoeffs perturbation_coeffs(const GammaSpec& g, int n, double kappa_star, int sign, int n_modes) {
    if (n < 1) throw Refused("perturbation coefficients require n >= 1");
    PerturbationCoeffs pc;
    pc.n = n;
    pc.lambda0 = threshold_lambda(n, kappa_star, sign);
    if (std::abs(pc.lambda0) == 0.0) throw Refused("threshold lambda0 = 0");
    pc.rho0 = rho0_of_kappa(g, cd(n));
    pc.drho0_dkappa = drho0_dkappa(g, n);
    pc.rho_hat = rho_hat(g, n, kappa_star);
    pc.rho12_2 = rho12_2(g, n);
    pc.rho21_2 = rho21_2(g, n);
    AlphaCoeffs a = alpha_coeffs(g, n, n_modes);
    pc.alpha0 = a.alpha0;
    pc.alpha1 = a.alpha1;
    pc.alpha1_pp = a.alpha1_pp;
    pc.alpha1_mm = a.alpha1_mm;

    auto js = jets(g, cd(n), 3);
    for (int j = 0; j <= 3; ++j) {
        pc.jets[{1, 1, j}] = js[j].phi;
        pc.jets[{1, 2, j}] = js[j].psi;
        pc.jets[{2, 1, j}] = js[j].dphi;
        pc.jets[{2, 2, j}] = js[j].dpsi;
    }
    const cd r0sq = pc.rho0 * pc.rho0;
    const cd l2 = pc.lambda0 * pc.lambda0;
    pc.residual_sum_rule = std::abs(l2 * r0sq - l2 * (js[2].phi + js[2].dpsi));
    pc.residual_split = std::max(std::abs(js[2].phi - 0.5 * r0sq), std::abs(js[2].dpsi - 0.5 * r0sq));
    pc.residual_third = std::abs(js[3].phi + js[3].dpsi);
    pc.residual_alpha0 = std::abs(pc.rho0 + kPi * pc.alpha0 / n);
    pc.residual_rho12 = std::abs(pc.rho12_2 - js[2].psi);
    pc.residual_rho21 = std::abs(pc.rho21_2 - js[2].dphi);
    return pc;
}

}  // namespace pencil
