#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pencil/coefficients.hpp"
#include "pencil/problem.hpp"
#include "pencil/scattering.hpp"

namespace pencil {

struct IsolatedSeries {
    DiscreteMode mode;
    int sign = 1;
    cd ell;                      // ±sqrt(κⱼ + κ*), Λ₀
    std::vector<cd> Lambda;      // Λ₀..Λ_N
    std::vector<std::vector<cd>> psi;  // ψ₀ = Ψⱼ, ψ₁..ψ_N on mode.x
    bool zero_case = false;
    double solvability_residual = 0.0;  // max_m |(rhs_m, Ψⱼ)|
    double orthogonality_residual = 0.0;

    // λ₀ + Σ_{m=1}^{terms} ε^m Λ_m
    cd value(double eps, int terms) const;
};

// Series for the eigenvalue emanating from ±sqrt(κⱼ + κ*). The reduced resolvent of
// O₀ − κⱼ on {Ψⱼ}^⊥ is a Numerov discretization on the mode grid bordered by the
// orthogonality constraint. Requires κⱼ + κ* ≠ 0.
IsolatedSeries isolated_series(const ProblemSpec& p, const DiscreteMode& mode, int sign, int order = 3,
                               const std::vector<DiscreteMode>* all_modes = nullptr);

struct ZeroModeAnalysis {
    bool zero_is_eigenvalue = true;
    double coupling = 0.0;  // (γΨⱼ, Ψⱼ)
    std::optional<IsolatedSeries> extra;
};

// κⱼ = −κ*: λ = 0 stays an eigenvalue; a second one εΛ₁ + ε³Λ₃ + … appears when
// (γΨⱼ, Ψⱼ) ≠ 0.
ZeroModeAnalysis zero_mode_analysis(const ProblemSpec& p, const DiscreteMode& mode);

enum class Existence { yes, no, indeterminate };
std::string existence_name(Existence e);

struct EmergencePrediction {
    int n = 0;
    cd lambda0;
    int branch = +1;        // ζ₊ or ζ₋
    bool mirrored = false;  // obtained from −conj(λ₀) by the λ ↦ −conj(λ) symmetry
    Regime regime = Regime::generic;
    double zeta = 0.0;
    Existence exists = Existence::indeterminate;
    cd first_order;  // coefficient of ε
    cd Lambda;       // coefficient of ε²
    double condition_value = 0.0;
    std::string condition_id;
    cd rho0;

    cd value(double eps, bool with_Lambda) const;
};

inline constexpr double kIndeterminate = 1e-10;

// sign selects λ₀ = sqrt(n² + κ*) (+1) or its mirror −conj(λ₀) (−1).
EmergencePrediction emergent_prediction(const ProblemSpec& p, int n, int sign, int branch);
EmergencePrediction emergent_prediction(const ProblemSpec& p, const PerturbationCoeffs& pc, const ScatteringData& sd,
                                        int sign, int branch);

struct Enclosure {
    bool inside = false;
    double margin = 0.0;  // ε|λ| sup|γ| − dist(λ² − κ*, spec O₀)
    double distance = 0.0;
};

inline constexpr double kEnclosureSlack = 1e-10;

// dist(λ² − κ*, spec O₀) ≤ ε|λ| sup|γ| up to kEnclosureSlack·max(1, |λ² − κ*|).
Enclosure spectrum_enclosure_check(const ProblemSpec& p, cd lambda, const std::vector<double>& discrete);

}  // namespace pencil
