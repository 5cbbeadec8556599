#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pencil/coefficients.hpp"
#include "pencil/problem.hpp"

namespace pencil {

// Y₁ ~ e^{inx} as x → +∞ and Y₂ ~ e^{−inx} as x → −∞ for −Y'' + VY − n²Y = 0,
// sampled on a uniform grid over [−L, L], L = L_V.
struct JostSolutions {
    int n = 0;
    double L = 0.0;
    std::vector<double> x;
    std::vector<cd> y1, dy1, y2, dy2;
};

JostSolutions jost_solutions(const PotentialSpec& v, int n, int grid_points = 1025);

struct ScatteringCoeffs {
    cd a, b;
    double unitarity_residual = 0.0;  // | |a|² − |b|² − 1 |
};

// Y₂ = a·conj(Y₁) + b·Y₁, matched in value and derivative at x = +L.
// Throws NonConvergence when the unitarity residual exceeds 1e−6.
ScatteringCoeffs scattering_coefficients(const JostSolutions& js);

enum class Regime { generic, degenerate_plus, degenerate_minus };
std::string regime_name(Regime r);

inline constexpr double kRegimeThreshold = 1e-8;

struct ScatteringData {
    int n = 0;
    cd a, b;
    double a_r = 0, a_i = 0, b_r = 0, b_i = 0;
    double theta = 0.0;  // arg a in [0, 2π)
    double unitarity_residual = 0.0;
    Regime regime = Regime::generic;
    double zeta_plus = 0.0, zeta_minus = 0.0;
    double W_plus = 0.0, W_minus = 0.0;    // W(ζ±), should vanish
    double dW_plus = 0.0, dW_minus = 0.0;  // W'(ζ±) = −|a| sin(2ζ± + θ)

    bool complete = false;
    cd upsilon_plus, upsilon_minus;
    cd zhat_plus, zhat_minus;
    cd s1_plus, s1_minus;
    // closed form |a| sin(2ζ± − θ) + b_i
    double alpha_plus = 0.0, alpha_minus = 0.0;
    // b_i − |a| sin(2ζ± + θ): the amplitude of X± ~ 2α sin(nx − ζ±) at −∞ from a, b
    double alpha_limit_plus = 0.0, alpha_limit_minus = 0.0;
    // the same amplitude read off the integrated X± near x = −L
    double alpha_measured_plus = 0.0, alpha_measured_minus = 0.0;
    cd period_integral_plus, period_integral_minus;  // lim_N ∫_{−2πN}^{2πN} (γ − c±) X±²
    int periods_used = 0;
    cd xi_hat_plus, xi_hat_minus;
    cd s2;

    std::vector<double> x;
    std::vector<double> X_plus, X_minus;
};

// a, b, θ, regime and ζ± for the threshold k = n.
ScatteringData scattering_data(const PotentialSpec& v, int n);

// Fills Υ±, α±, S₁±, ẑ± (generic) or ξ̂±, S₂ (degenerate) and the X± samples.
ScatteringData threshold_constants(ScatteringData sd, const PerturbationCoeffs& pc, const ProblemSpec& p);

enum class Parity { even, odd, none };
std::string parity_name(Parity p);

struct DiscreteMode {
    int index = 0;
    double kappa = 0.0;
    std::vector<double> x;
    std::vector<double> psi;  // L²-normalized, real
    Parity parity = Parity::none;
    double parity_overlap = 0.0;  // ∫ψ(x)ψ(−x)dx
    double residual = 0.0;        // normalized Wronskian mismatch at the matching point
};

// Eigenvalues of −d²/dx² + V below 0 by Sturm node counting and bisection.
std::vector<DiscreteMode> discrete_spectrum(const PotentialSpec& v, int grid_points = 2049);

}  // namespace pencil
