#pragma once

#include <complex>
#include <string>
#include <vector>

namespace pencil {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Odd 2π-periodic coefficient γ(x) = Σ_{k=1..K} g_k sin(kx).
struct GammaSpec {
    std::vector<double> sine_coeffs;  // sine_coeffs[k-1] = g_k

    double operator()(double x) const;
    double derivative(double x) const;
    int max_harmonic() const;
    double coeff(int k) const;  // g_k, zero outside 1..K
    // Fourier coefficient of e^{imx}: g_m/(2i) for m > 0, -g_{-m}/(2i) for m < 0.
    cd fourier(int m) const;
    double sup_abs() const;
    bool is_zero() const;
};

enum class PotentialKind { sech2_well, gaussian_well, exp_well, tabulated };

struct Envelope {
    double C = 1.0;
    double theta = 1.0;
};

// Real potential with exponential envelope |V(x)| <= C e^{-theta |x|}.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::sech2_well;
    // sech2_well: {v0, mu}; gaussian_well: {v0, sigma}; exp_well: {v0, theta}
    std::vector<double> params;
    std::vector<double> grid;    // tabulated only, strictly increasing
    std::vector<double> values;  // tabulated only
    bool extrapolate = true;     // tabulated: zero outside the hull instead of throwing
    Envelope envelope;

    double operator()(double x) const;
    // Effective support cutoff L_V = max(10/theta, L with C e^{-theta L} < 1e-12).
    double support_cutoff() const;
    double min_value() const;
    bool is_even() const;
    bool is_zero() const;
};

struct ProblemSpec {
    double kappa_star = 0.0;
    double epsilon = 0.0;
    GammaSpec gamma;
    PotentialSpec potential;
};

// Principal branch of sqrt(λ² − κ*), so kappa(1, 0) = 1.
cd kappa(cd lambda, double kappa_star);

PotentialSpec sech2_well(double v0, double mu);
PotentialSpec gaussian_well(double v0, double sigma);
PotentialSpec exp_well(double v0, double theta);
PotentialSpec tabulated_potential(std::vector<double> grid, std::vector<double> values, Envelope env,
                                  bool extrapolate = true);

std::string kind_name(PotentialKind k);

// Throws InputError if an invariant fails (envelope, epsilon sign, tabulated grid).
void validate(const ProblemSpec& p);
void validate(const PotentialSpec& v);

ProblemSpec parse_problem(const std::string& json_text);
ProblemSpec load_problem(const std::string& path);
std::string serialize_problem(const ProblemSpec& p);

}  // namespace pencil
