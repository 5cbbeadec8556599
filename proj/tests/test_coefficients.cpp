#include <doctest.h>

#include <random>

#include "pencil/coefficients.hpp"

using namespace pencil;

namespace {

// Composite Simpson for (1/2κ) ∫₀^{2π} γ(t) sin 2κ(π − t) dt.
cd rho0_simpson(const GammaSpec& g, cd k) {
    const int N = 4000;
    const double h = kTwoPi / N;
    cd s = 0;
    for (int i = 0; i <= N; ++i) {
        double t = i * h;
        double w = (i == 0 || i == N) ? 1 : (i % 2 ? 4 : 2);
        s += w * g(t) * std::sin(2.0 * k * (kPi - t));
    }
    return s * h / 3.0 / (2.0 * k);
}

}  // namespace

TEST_CASE("rho0 agrees with direct quadrature") {
    GammaSpec g{{0.3, 1.0, -0.2, 0.15}};
    for (cd k : {cd(1.3, 0), cd(0.7, 0.2), cd(2.0, 0), cd(0.05, 0.0)}) {
        CHECK(std::abs(rho0_of_kappa(g, k) - rho0_simpson(g, k)) < 1e-10);
    }
}

TEST_CASE("rho0 at an integer is -pi alpha0 / n") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        GammaSpec g;
        for (int k = 0; k < 5; ++k) g.sine_coeffs.push_back(u(rng));
        for (int n = 1; n <= 2; ++n) {
            double a0 = alpha_coeffs(g, n).alpha0;
            CHECK(a0 == doctest::Approx(g.coeff(2 * n) / 2.0).epsilon(1e-12));
            CHECK(std::abs(rho0_of_kappa(g, n) + kPi * a0 / n) < 1e-12);
        }
    }
}

TEST_CASE("d rho0 / d kappa matches a central difference") {
    GammaSpec g{{0.3, 1.0, -0.2, 0.15}};
    const double h = 1e-5;
    for (int n = 1; n <= 3; ++n) {
        cd fd = (rho0_of_kappa(g, n + h) - rho0_of_kappa(g, n - h)) / (2 * h);
        CHECK(std::abs(drho0_dkappa(g, n) - fd) < 1e-8);
    }
}

TEST_CASE("zeroth jet is the free fundamental system") {
    GammaSpec g{{1.0, 0.5}};
    for (cd k : {cd(1.2, 0), cd(0.4, 0.3)}) {
        auto j = jets(g, k, 1);
        cd c = std::cos(kTwoPi * k), s = std::sin(kTwoPi * k);
        CHECK(std::abs(j[0].phi - c) < 1e-10);
        CHECK(std::abs(j[0].psi - s / k) < 1e-10);
        CHECK(std::abs(j[0].dphi + k * s) < 1e-10);
        CHECK(std::abs(j[0].dpsi - c) < 1e-10);
    }
}

TEST_CASE("rho_hat satisfies the trace-derivative identity") {
    // ρ̂ = (n² − κ*)ρ₀² + (n + κ*/n)·d/dκ[κ² T](n), T = Φ₂ + Ψ₂' at 2π
    GammaSpec g{{0.3, 1.0, -0.2, 0.15}};
    const double h = 1e-4;
    auto kT = [&](double k) {
        auto j = jets(g, k, 2);
        return k * k * (j[2].phi + j[2].dpsi);
    };
    for (int n = 1; n <= 2; ++n)
        for (double ks : {0.0, -2.0, 1.0}) {
            cd r0 = rho0_of_kappa(g, n);
            cd d = (kT(n + h) - kT(n - h)) / (2 * h);
            cd expect = (n * n - ks) * r0 * r0 + (n + ks / n) * d;
            CHECK(std::abs(rho_hat(g, n, ks) - expect) < 1e-6 * std::max(1.0, std::abs(expect)));
        }
}

TEST_CASE("perturbation coefficient residuals are small") {
    GammaSpec g{{0.3, 1.0, -0.2, 0.15}};
    for (int n = 1; n <= 2; ++n) {
        PerturbationCoeffs pc = perturbation_coeffs(g, n, -0.5);
        CHECK(pc.residual_sum_rule < 1e-8);
        CHECK(pc.residual_split < 1e-8);
        CHECK(pc.residual_third < 1e-8);
        CHECK(pc.residual_rho12 < 1e-8);
        CHECK(pc.residual_rho21 < 1e-8);
        CHECK(pc.alpha1 == doctest::Approx(pc.alpha1_pp + pc.alpha1_mm));
    }
}
