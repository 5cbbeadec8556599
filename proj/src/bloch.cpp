#include "pencil/bloch.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "pencil/coefficients.hpp"
#include "pencil/errors.hpp"

namespace pencil {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct Pencil {
    Mat D, G;
    double eps = 0.0;
    Mat at(cd l) const {
        Mat P = D + cd(0.0, eps) * l * G;
        P.diagonal().array() -= l * l;
        return P;
    }
};

Pencil assemble(const ProblemSpec& p, double tau, int n_modes) {
    const int N = 2 * n_modes + 1;
    Pencil pc;
    pc.eps = p.epsilon;
    pc.D = Mat::Zero(N, N);
    pc.G = Mat::Zero(N, N);
    for (int a = 0; a < N; ++a) {
        int ka = a - n_modes;
        pc.D(a, a) = (ka - tau) * (ka - tau) + p.kappa_star;
        for (int b = 0; b < N; ++b) pc.G(a, b) = p.gamma.fourier(ka - (b - n_modes));
    }
    return pc;
}

// Inverse iteration with a two-sided Rayleigh functional: the scalar quadratic
// yᴴ P(λ) x = 0 stays accurate at defective points where the companion QR only
// resolves λ to sqrt(machine epsilon).
cd polish(const Pencil& pc, cd lambda, Vec x) {
    for (int it = 0; it < 6; ++it) {
        Mat P = pc.at(lambda);
        Eigen::PartialPivLU<Mat> lu(P);
        Vec xr = lu.solve(x);
        Vec yl = lu.adjoint().solve(x);
        if (!xr.allFinite() || !yl.allFinite() || xr.norm() == 0.0 || yl.norm() == 0.0) break;
        xr.normalize();
        yl.normalize();
        cd a = -yl.dot(xr);
        cd b = cd(0.0, pc.eps) * yl.dot(pc.G * xr);
        cd c = yl.dot(pc.D * xr);
        cd next;
        if (std::abs(a) < 1e-300) break;
        cd disc = std::sqrt(b * b - 4.0 * a * c);
        cd r1 = (-b + disc) / (2.0 * a), r2 = (-b - disc) / (2.0 * a);
        next = std::abs(r1 - lambda) < std::abs(r2 - lambda) ? r1 : r2;
        x = xr;
        double step = std::abs(next - lambda);
        lambda = next;
        if (step <= 1e-15 * std::max(1.0, std::abs(lambda))) break;
    }
    return lambda;
}

bool complex_less(cd a, cd b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

std::vector<cd> solve_all(const ProblemSpec& p, double tau, const Window& w, int n_modes, bool dedup) {
    int k_c = int(std::ceil(std::sqrt(std::abs(std::pow(std::abs(w.center) + w.radius, 2) - p.kappa_star)) + 1.0));
    int need = 2 * std::max(k_c, p.gamma.max_harmonic()) + 8;
    if (n_modes < need)
        throw Refused("n_modes = " + std::to_string(n_modes) + " too small for the window; need at least " +
                      std::to_string(need));
    Pencil pc = assemble(p, tau, n_modes);
    const int N = 2 * n_modes + 1;
    Mat C = Mat::Zero(2 * N, 2 * N);
    C.topRightCorner(N, N) = Mat::Identity(N, N);
    C.bottomLeftCorner(N, N) = pc.D;
    C.bottomRightCorner(N, N) = cd(0.0, p.epsilon) * pc.G;
    Eigen::ComplexEigenSolver<Mat> es(C, true);
    if (es.info() != Eigen::Success) throw NonConvergence("companion eigensolver failed");
    std::vector<cd> out;
    for (int i = 0; i < 2 * N; ++i) {
        cd l = es.eigenvalues()[i];
        if (std::abs(l - w.center) > w.radius + 1e-6) continue;
        Vec x = es.eigenvectors().col(i).head(N);
        if (x.norm() == 0.0) x = es.eigenvectors().col(i).tail(N);
        l = polish(pc, l, x);
        if (std::abs(l - w.center) <= w.radius) out.push_back(l);
    }
    std::sort(out.begin(), out.end(), complex_less);
    if (dedup) {
        std::vector<cd> u;
        for (cd l : out)
            if (std::none_of(u.begin(), u.end(), [&](cd v) { return std::abs(v - l) <= 1e-10; })) u.push_back(l);
        out = u;
    }
    return out;
}

}  // namespace

std::string source_name(BandSource s) {
    switch (s) {
        case BandSource::galerkin: return "galerkin";
        case BandSource::asym_midband: return "asym_midband";
        case BandSource::asym_center: return "asym_center";
        case BandSource::asym_edge: return "asym_edge";
    }
    return "unknown";
}

cd unperturbed_band(int n, int sign, double tau, double kappa_star) {
    cd l = std::sqrt(cd((n - tau) * (n - tau) + kappa_star));
    return sign >= 0 ? l : -l;
}

std::vector<cd> bloch_eigenvalues(const ProblemSpec& p, double tau, const Window& w, int n_modes) {
    return solve_all(p, tau, w, n_modes, true);
}

double bifurcation_constant(const GammaSpec& g) { return 4.0 * g.sup_abs(); }

BandCurve band_sweep(const ProblemSpec& p, int n, int sign, const std::vector<double>& tau_grid, int n_modes) {
    BandCurve curve;
    curve.n = n;
    curve.sign = sign;
    curve.epsilon = p.epsilon;
    const double Ce = bifurcation_constant(p.gamma) * p.epsilon;
    bool have_prev = false;
    cd prev;
    for (double tau : tau_grid) {
        if (tau < -0.5 || tau >= 0.5) throw Refused("tau grid must lie in [-1/2, 1/2)");
        cd seed = unperturbed_band(n, sign, tau, p.kappa_star);
        Window w{seed, 0.5 + 2.0 * Ce};
        auto cands = solve_all(p, tau, w, n_modes, false);
        if (cands.empty()) throw NonConvergence("no Bloch eigenvalue near the unperturbed band");
        bool pair_window = std::abs(tau) < Ce || std::abs(tau) > 0.5 - Ce;
        // outside the pair windows the other bands stay O(ε) away from the seed
        std::sort(cands.begin(), cands.end(),
                  [&](cd a, cd b) { return std::abs(a - seed) < std::abs(b - seed); });
        int take = pair_window ? std::min<int>(2, cands.size()) : 1;
        bool tie = false;
        if (!pair_window && cands.size() > 1) {
            double d0 = std::abs(cands[0] - seed), d1 = std::abs(cands[1] - seed);
            tie = d1 - d0 <= 1e-12 * std::max(1.0, d1) && std::abs(cands[0] - cands[1]) > 1e-10;
            if (tie && have_prev && std::abs(cands[1] - prev) < std::abs(cands[0] - prev)) std::swap(cands[0], cands[1]);
        }
        std::vector<BandPoint> pts;
        for (int i = 0; i < take; ++i) {
            BandPoint bp{n, sign, tau, cands[i], BandSource::galerkin, false};
            pts.push_back(bp);
        }
        if (tie && !have_prev) pts[0].ambiguous = true;
        std::sort(pts.begin(), pts.end(), [](const BandPoint& a, const BandPoint& b) {
            return a.lambda.imag() < b.lambda.imag();
        });
        for (auto& bp : pts) curve.points.push_back(bp);
        if (!pts[0].ambiguous) {
            prev = pair_window ? seed : pts[0].lambda;
            have_prev = !pair_window;
        }
    }
    return curve;
}

cd asym_midband(int n, int sign, const ProblemSpec& p, double tau, double C) {
    if (C < 0.0) C = bifurcation_constant(p.gamma);
    const double e = p.epsilon;
    if (std::abs(tau) < C * e || std::abs(tau) > 0.5 - C * e)
        throw Refused("tau outside the mid-band window C*eps <= |tau| <= 1/2 - C*eps");
    cd l0 = unperturbed_band(n, sign, tau, p.kappa_star);
    const double dn = (n - tau) * (n - tau) + p.kappa_star;
    // ψ₀ = e^{inx}/√(2π); ψ₁ has Fourier components −γ̂_{k−n}/(D_k − λ₀²), k ≠ n
    const int K = p.gamma.max_harmonic();
    cd inner = 0.0;  // (γψ₁, ψ₀)
    for (int k = n - K; k <= n + K; ++k) {
        if (k == n) continue;
        double dk = (k - tau) * (k - tau) + p.kappa_star;
        cd psi1 = -p.gamma.fourier(k - n) / (dk - dn);
        inner += p.gamma.fourier(n - k) * psi1;
    }
    return l0 - e * e * l0 * inner / 2.0;
}

std::pair<cd, cd> asym_center(int n, int sign, const ProblemSpec& p, double t, AsymForm form) {
    cd l0 = threshold_lambda(n, p.kappa_star, sign);
    if (std::abs(l0) < 1e-12) throw Refused("asym_center requires lambda0 != 0");
    if (n < 1) throw Refused("asym_center requires n >= 1");
    AlphaCoeffs a = alpha_coeffs(p.gamma, n);
    const double e = p.epsilon, nn = n, a0 = a.alpha0;
    const cd l2 = l0 * l0;
    if (form == AsymForm::printed) {
        cd c2 = e * e / (4.0 * l0) * ((2.0 - nn * nn / (2.0 * l2)) * t * t - 7.0 * a0 * a0 / 8.0 + l2 * a.alpha1);
        cd lead;
        if (std::abs(l0.imag()) > std::abs(l0.real()))
            lead = e / (4.0 * l0) * std::sqrt(4.0 * t * t * nn * nn - l2 * a0 * a0);
        else
            lead = cd(0.0, e) / (4.0 * l0) * std::sqrt(l2 * a0 * a0 - 4.0 * t * t * nn * nn);
        return {l0 + lead + c2, l0 - lead + c2};
    }
    cd S = std::sqrt(4.0 * nn * nn * t * t - l2 * a0 * a0);
    cd lead = e / (2.0 * l0) * S;
    cd c2 = e * e / (4.0 * l0) * ((2.0 - 2.0 * nn * nn / l2) * t * t - a0 * a0 / 2.0 + l2 * a.alpha1);
    return {l0 + lead + c2, l0 - lead + c2};
}

std::pair<cd, cd> asym_edge(int n, int sign, const ProblemSpec& p, double t, AsymForm form) {
    if (n < 0) throw Refused("asym_edge requires n >= 0");
    const double h = n + 0.5;
    cd l0 = std::sqrt(cd(h * h + p.kappa_star));
    if (sign < 0) l0 = -l0;
    if (std::abs(l0) < 1e-12) throw Refused("asym_edge requires lambda0 != 0");
    const double e = p.epsilon;
    const cd l2 = l0 * l0;
    if (form == AsymForm::printed) {
        double a0 = 0.5 * p.gamma.coeff(2 * n + 2);
        cd shift = -e * t / (2.0 * l0);
        cd lead = e / (4.0 * l0) * std::sqrt((4.0 * n + 2.0) * (4.0 * n + 2.0) * t * t + l2 * a0 * a0);
        return {l0 + shift + lead, l0 + shift - lead};
    }
    const double beta = 0.5 * p.gamma.coeff(2 * n + 1);
    const double m = 2.0 * n + 1.0;
    // r_e = Σ_{k ∉ {−n, n+1}} |γ̂_{−n−k}|² / ((k − 1/2)² − (n + 1/2)²)
    const int K = p.gamma.max_harmonic();
    double re = 0.0;
    for (int k = -n - K; k <= -n + K; ++k) {
        if (k == -n || k == n + 1) continue;
        re += std::norm(p.gamma.fourier(-n - k)) / ((k - 0.5) * (k - 0.5) - h * h);
    }
    cd lead = e / (2.0 * l0) * std::sqrt(m * m * t * t - l2 * beta * beta);
    cd c2 = e * e / (2.0 * l0) * ((1.0 - m * m / (4.0 * l2)) * t * t + l2 * re - beta * beta / 4.0);
    return {l0 + lead + c2, l0 - lead + c2};
}

}  // namespace pencil
