#pragma once

#include <array>
#include <map>
#include <tuple>
#include <vector>

#include "pencil/floquet.hpp"
#include "pencil/problem.hpp"

namespace pencil {

// ρ₀ as a function of κ: (1/2κ) ∫₀^{2π} γ(t) sin 2κ(π − t) dt (series near κ = 0).
cd rho0_of_kappa(const GammaSpec& g, cd kappa);
cd rho0(const GammaSpec& g, cd lambda, double kappa_star);
// ∂ρ₀/∂κ at κ = n, by differentiating under the integral sign.
cd drho0_dkappa(const GammaSpec& g, int n);
cd drho0_dkappa_at(const GammaSpec& g, cd kappa);

// Jet values at x_end: entry j holds (Φ_j, Φ_j', Ψ_j, Ψ_j') where the fundamental
// solutions expand as Φ_ε = Σ (iελ)^j Φ_j at fixed κ. Order J ≤ 4.
std::vector<FundamentalValues> jets(const GammaSpec& g, cd kappa, int J, double x_end = kTwoPi);

// Double integrals at λ₀ (κ = n).
cd rho_hat(const GammaSpec& g, int n, double kappa_star);
cd rho12_2(const GammaSpec& g, int n);
cd rho21_2(const GammaSpec& g, int n);

struct AlphaCoeffs {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double alpha1_pp = 0.0;
    double alpha1_mm = 0.0;
    int n_modes = 0;
};

// α₀(n) = (1/2π)∫ γ sin 2nx and α₁ = α₁⁽⁺⁺⁾ + α₁⁽⁻⁻⁾ from the Fourier solve for u±.
AlphaCoeffs alpha_coeffs(const GammaSpec& g, int n, int n_modes = 64);

// Threshold point λ₀ = sign·sqrt(n² + κ*) (principal root).
cd threshold_lambda(int n, double kappa_star, int sign = +1);

struct PerturbationCoeffs {
    int n = 0;
    cd lambda0;
    cd rho0, drho0_dkappa, rho_hat, rho12_2, rho21_2;
    double alpha0 = 0.0, alpha1 = 0.0, alpha1_pp = 0.0, alpha1_mm = 0.0;
    // (i, j, order) → ρᵢⱼ⁽ᵒʳᵈᵉʳ⁾ at λ₀
    std::map<std::tuple<int, int, int>, cd> jets;

    // residuals: ρ₀² = ρ₁₁⁽²⁾ + ρ₂₂⁽²⁾, ρ₁₁⁽²⁾ = ρ₂₂⁽²⁾ = ρ₀²/2, ρ₁₁⁽³⁾ + ρ₂₂⁽³⁾ = 0, ρ₀ = −πα₀/n,
    // and the quadrature vs jet values of ρ₁₂⁽²⁾, ρ₂₁⁽²⁾
    double residual_sum_rule = 0.0;
    double residual_split = 0.0;
    double residual_third = 0.0;
    double residual_alpha0 = 0.0;
    double residual_rho12 = 0.0;
    double residual_rho21 = 0.0;
};

PerturbationCoeffs perturbation_coeffs(const GammaSpec& g, int n, double kappa_star, int sign = +1,
                                       int n_modes = 64);

}  // namespace pencil
