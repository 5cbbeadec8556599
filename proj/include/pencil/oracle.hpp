#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pencil/ode.hpp"
#include "pencil/problem.hpp"

namespace pencil {

enum class OracleStatus { isolated, in_band, not_found };
std::string status_name(OracleStatus s);

struct OracleOptions {
    double L = 0.0;  // 0: L_V rounded up to a multiple of 2π
    ode::Options ode{};
    int winding_samples = 256;
    int max_iterations = 80;
    double step_tolerance = 1e-14;
    int eigenfunction_points = 1025;
};

// L_V rounded up to an integer number of periods.
double oracle_length(const ProblemSpec& p);

struct MatchingValue {
    cd value;                 // Wronskian of the two decaying branches at x = 0
    double normalized = 0.0;  // |value| / (|branch₋(0)| |branch₊(0)|)
    cd mu_decay, mu_grow;     // multipliers used at +L and −L
    bool in_band = false;
};

MatchingValue matching_value(const ProblemSpec& p, cd lambda, double L, const ode::Options& opt = {});
// Raw analytic determinant; throws Refused when λ lies in a band.
cd matching_determinant(const ProblemSpec& p, cd lambda, double L);

// Zeros of the matching determinant inside |λ − center| < radius, by argument
// tracking with adaptive doubling. exclude_center subtracts the multiplicity of the
// zero at the center, measured on a circle of radius 1e-3·radius.
struct Winding {
    int number = 0;
    int samples = 0;
    double min_abs = 0.0;     // smallest normalized |D| on the contour
    bool band_crossing = false;
};
Winding winding_number(const ProblemSpec& p, cd center, double radius, const OracleOptions& o = {},
                       bool exclude_center = false);

// Zeros inside a disc from the Fourier coefficients of log D on its boundary:
// power sums p_k = Σ z_j^k give the centroid, and the individual zeros when count ≤ 3.
struct ZeroCluster {
    int count = 0;
    cd centroid;
    std::vector<cd> zeros;
    double min_abs = 0.0;
    bool band_crossing = false;
};
ZeroCluster zeros_in_disc(const ProblemSpec& p, cd center, double radius, const OracleOptions& o = {});

struct OracleResult {
    cd lambda;
    double matching_residual = 0.0;
    double mu_decay_modulus = 0.0, mu_grow_modulus = 0.0;
    std::vector<double> x;
    std::vector<cd> psi;
    double eigenfunction_residual = 0.0;
    double decay_per_period = 0.0;  // |ψ(x)| / |ψ(x + 2π)| in the outer region
    OracleStatus status = OracleStatus::not_found;
    int iterations = 0;
};

OracleResult find_isolated_eigenvalue(const ProblemSpec& p, cd guess, double search_radius,
                                      const OracleOptions& o = {});

struct DefectReport {
    std::vector<double> epsilon;
    std::vector<cd> oracle, predicted;
    std::vector<double> defect;
    std::vector<OracleStatus> status;
    double order = 0.0;
    bool contradiction = false;  // a ladder entry was not found
};

// Least-squares slope of log defect against log ε.
double fitted_order(const std::vector<double>& eps, const std::vector<double>& defect);

DefectReport eigenvalue_defect_order(const ProblemSpec& p, const std::function<cd(double)>& prediction,
                                     const std::vector<double>& ladder,
                                     const std::function<double(double)>& search_radius,
                                     const OracleOptions& o = {});

}  // namespace pencil
