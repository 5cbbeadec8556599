#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "pencil/ode.hpp"
#include "pencil/problem.hpp"

namespace pencil {

// Complex value/derivative pair of a solution of u'' = q(x) u.
struct Cauchy {
    cd u{0.0};
    cd du{0.0};
};

using Coefficient = std::function<cd(double)>;

// Integrates u'' = q(x) u for several initial data simultaneously from x0 to x1.
std::vector<Cauchy> propagate(const Coefficient& q, std::vector<Cauchy> init, double x0, double x1,
                              const ode::Options& opt = {});

// q(x) = κ* + iελγ(x) − λ² (+ V(x) when with_potential).
Coefficient pencil_coefficient(const ProblemSpec& p, cd lambda, bool with_potential);

struct FundamentalValues {
    cd phi, dphi, psi, dpsi;
};

struct Monodromy {
    cd a11, a12, a21, a22;
    cd lambda;
    double epsilon = 0.0;
    double integrator_tolerance = 0.0;

    cd det() const { return a11 * a22 - a12 * a21; }
    cd trace() const { return a11 + a22; }
};

struct FloquetPair {
    cd mu_plus, mu_minus;
    int z = 1;
    cd trace;
    bool degenerate = false;
};

struct DecayingDirection {
    cd multiplier;                 // |multiplier| < 1
    std::array<cd, 2> eigvec;      // (u(0), u'(0)) of the solution decaying as x → +∞
    cd growing_multiplier;         // 1/multiplier, decays as x → −∞
    std::array<cd, 2> growing_eigvec;
};

inline constexpr double kDeltaUni = 1e-8;
inline constexpr double kDegenerateTrace = 1e-12;

FundamentalValues fundamental_solutions(const ProblemSpec& p, cd lambda, double x_end,
                                        const ode::Options& opt = {});
Monodromy monodromy(const ProblemSpec& p, cd lambda, const ode::Options& opt = {});
// Unperturbed closed form [[cos 2πκ, sin 2πκ/κ], [−κ sin 2πκ, cos 2πκ]].
Monodromy monodromy_unperturbed(cd lambda, double kappa_star);
FloquetPair floquet_multipliers(const Monodromy& m, int z);
// Eigenvector (−A12, A11 − μ), falling back to (A22 − μ, −A21) when that one is smaller.
std::array<cd, 2> monodromy_eigvec(const Monodromy& m, cd mu);
std::optional<DecayingDirection> decaying_direction(const Monodromy& m, double delta_uni = kDeltaUni);

}  // namespace pencil
