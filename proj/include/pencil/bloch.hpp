#pragma once

#include <utility>
#include <vector>

#include "pencil/problem.hpp"

namespace pencil {

enum class BandSource { galerkin, asym_midband, asym_center, asym_edge };
std::string source_name(BandSource s);

struct BandPoint {
    int n = 0;
    int sign = 1;
    double tau = 0.0;
    cd lambda;
    BandSource source = BandSource::galerkin;
    bool ambiguous = false;  // two candidates equidistant from the continuation
};

struct BandCurve {
    int n = 0;
    int sign = 1;
    double epsilon = 0.0;
    std::vector<BandPoint> points;
};

struct Window {
    cd center;
    double radius = 1.0;
};

// ±sqrt((n − τ)² + κ*)
cd unperturbed_band(int n, int sign, double tau, double kappa_star);

// Eigenvalues of D + iελG − λ² in the Fourier basis e^{ikx}, |k| ≤ n_modes, with
// D = diag((k − τ)² + κ*) and G the Toeplitz matrix of γ. Returned in the window,
// sorted by (Re, Im), deduplicated at 1e−10. Refuses when n_modes is too small for
// the window.
std::vector<cd> bloch_eigenvalues(const ProblemSpec& p, double tau, const Window& w, int n_modes);

// Default bifurcation-window width constant C = 4 sup|γ|.
double bifurcation_constant(const GammaSpec& g);

// Follows λ⁽ⁿ⁾(ε, τ) over the grid as the eigenvalue nearest the ε = 0 seed (the previous
// point breaks exact ties); inside |τ| < Cε and
// |τ| > 1/2 − Cε both members of the bifurcating pair are returned.
BandCurve band_sweep(const ProblemSpec& p, int n, int sign, const std::vector<double>& tau_grid, int n_modes);

// Second-order mid-band asymptotics λ₀ − ε²λ₀(γψ₁, ψ₀)/2.
cd asym_midband(int n, int sign, const ProblemSpec& p, double tau, double C = -1.0);

// corrected: expansions checked against the exact two-mode reduction.
// printed: the uncorrected forms, kept for comparison.
enum class AsymForm { corrected, printed };

// Pair near λ₀ = sign·sqrt(n² + κ*) for τ = εt.
std::pair<cd, cd> asym_center(int n, int sign, const ProblemSpec& p, double t, AsymForm form = AsymForm::corrected);
// Pair near λ₀ = sign·sqrt((n + 1/2)² + κ*) for τ = 1/2 + εt (modes e^{−inx}, e^{i(n+1)x}).
std::pair<cd, cd> asym_edge(int n, int sign, const ProblemSpec& p, double t, AsymForm form = AsymForm::corrected);

}  // namespace pencil
