#include "pencil/predictor.hpp"

#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "pencil/errors.hpp"

namespace pencil {

namespace {

using CVec = std::vector<cd>;

// Reduced resolvent of −d² + V − κ on {Ψ}^⊥ with zero boundary values at ±L.
class ReducedResolvent {
public:
    ReducedResolvent(const ProblemSpec& p, const DiscreteMode& m) : x_(m.x), psi_(m.psi) {
        const int M = int(x_.size());
        if (M < 5) throw Refused("mode grid too coarse for the reduced resolvent");
        h_ = x_[1] - x_[0];
        const int n = M - 2;  // interior unknowns
        std::vector<double> w(M);
        for (int i = 0; i < M; ++i) w[i] = p.potential(x_[i]) - m.kappa;
        std::vector<Eigen::Triplet<double>> t;
        const double ih2 = 1.0 / (h_ * h_);
        for (int r = 0; r < n; ++r) {
            int i = r + 1;
            t.emplace_back(r, r, 2.0 * ih2 + 10.0 * w[i] / 12.0);
            if (r > 0) t.emplace_back(r, r - 1, -ih2 + w[i - 1] / 12.0);
            if (r + 1 < n) t.emplace_back(r, r + 1, -ih2 + w[i + 1] / 12.0);
            t.emplace_back(r, n, psi_[i]);
            t.emplace_back(n, r, h_ * psi_[i]);
        }
        A_.resize(n + 1, n + 1);
        A_.setFromTriplets(t.begin(), t.end());
        lu_.compute(A_);
        if (lu_.info() != Eigen::Success) throw NonConvergence("reduced resolvent factorization failed");
    }

    CVec solve(const CVec& f) const {
        const int M = int(x_.size()), n = M - 2;
        Eigen::VectorXd br(n + 1), bi(n + 1);
        for (int r = 0; r < n; ++r) {
            int i = r + 1;
            cd F = (f[i - 1] + 10.0 * f[i] + f[i + 1]) / 12.0;
            br[r] = F.real();
            bi[r] = F.imag();
        }
        br[n] = 0.0;
        bi[n] = 0.0;
        Eigen::VectorXd ur = lu_.solve(br), ui = lu_.solve(bi);
        CVec u(M, 0.0);
        for (int r = 0; r < n; ++r) u[r + 1] = cd(ur[r], ui[r]);
        return u;
    }

    // (f, g) with real g, trapezoid rule
    cd inner(const CVec& f, const std::vector<double>& g) const {
        cd s = 0.0;
        const std::size_t M = f.size();
        for (std::size_t i = 0; i < M; ++i) s += ((i == 0 || i + 1 == M) ? 0.5 : 1.0) * f[i] * g[i];
        return s * h_;
    }

private:
    std::vector<double> x_, psi_;
    double h_ = 0.0;
    Eigen::SparseMatrix<double> A_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

CVec times_gamma(const GammaSpec& g, const std::vector<double>& x, const CVec& u) {
    CVec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = g(x[i]) * u[i];
    return out;
}

}  // namespace

cd IsolatedSeries::value(double eps, int terms) const {
    cd s = Lambda.empty() ? cd(0.0) : Lambda[0];
    double e = 1.0;
    for (int m = 1; m <= terms && m < int(Lambda.size()); ++m) {
        e *= eps;
        s += e * Lambda[m];
    }
    return s;
}

IsolatedSeries isolated_series(const ProblemSpec& p, const DiscreteMode& mode, int sign, int order,
                               const std::vector<DiscreteMode>* all_modes) {
    if (order < 1) throw Refused("series order must be >= 1");
    const double s0 = mode.kappa + p.kappa_star;
    if (std::abs(s0) < 1e-9) throw Refused("kappa_j + kappa_star = 0: use zero_mode_analysis");
    if (all_modes)
        for (const auto& o : *all_modes)
            if (o.index != mode.index && std::abs(o.kappa - mode.kappa) < 1e-6)
                throw Refused("nearly resonant discrete eigenvalues");
    IsolatedSeries s;
    s.mode = mode;
    s.sign = sign >= 0 ? 1 : -1;
    s.ell = std::sqrt(cd(s0));
    if (s.sign < 0) s.ell = -s.ell;
    ReducedResolvent R(p, mode);
    const auto& x = mode.x;
    const std::vector<double>& Psi = mode.psi;
    s.psi.push_back(CVec(Psi.begin(), Psi.end()));
    s.Lambda.push_back(s.ell);
    auto& L = s.Lambda;
    for (int m = 1; m <= order; ++m) {
        cd S = 0.0;
        for (int j = 0; j < m; ++j) S += L[j] * R.inner(times_gamma(p.gamma, x, s.psi[m - 1 - j]), Psi);
        cd quad = 0.0;
        for (int q = 1; q < m; ++q) quad += L[q] * L[m - q];
        L.push_back((-quad + cd(0.0, 1.0) * S) / (2.0 * s.ell));
        auto c = [&](int j) {
            cd v = 0.0;
            for (int q = 0; q <= j; ++q) v += L[q] * L[j - q];
            return v;
        };
        CVec rhs(x.size(), 0.0);
        for (int j = 1; j <= m; ++j) {
            cd cj = c(j);
            for (std::size_t i = 0; i < x.size(); ++i) rhs[i] += cj * s.psi[m - j][i];
        }
        for (int j = 0; j < m; ++j) {
            CVec gp = times_gamma(p.gamma, x, s.psi[m - 1 - j]);
            for (std::size_t i = 0; i < x.size(); ++i) rhs[i] -= cd(0.0, 1.0) * L[j] * gp[i];
        }
        s.solvability_residual = std::max(s.solvability_residual, std::abs(R.inner(rhs, Psi)));
        CVec next = R.solve(rhs);
        s.orthogonality_residual = std::max(s.orthogonality_residual, std::abs(R.inner(next, Psi)));
        s.psi.push_back(std::move(next));
    }
    return s;
}

ZeroModeAnalysis zero_mode_analysis(const ProblemSpec& p, const DiscreteMode& mode) {
    if (std::abs(mode.kappa + p.kappa_star) > 1e-9) throw Refused("zero_mode_analysis requires kappa_j = -kappa_star");
    ZeroModeAnalysis z;
    ReducedResolvent R(p, mode);
    const auto& x = mode.x;
    const std::vector<double>& Psi = mode.psi;
    CVec psi0(Psi.begin(), Psi.end());
    CVec gPsi = times_gamma(p.gamma, x, psi0);
    cd coupling = R.inner(gPsi, Psi);
    z.coupling = coupling.real();
    if (std::abs(coupling) <= 1e-10) return z;
    IsolatedSeries s;
    s.mode = mode;
    s.zero_case = true;
    s.ell = 0.0;
    cd L1 = cd(0.0, 1.0) * coupling;
    CVec rhs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) rhs[i] = -cd(0.0, 1.0) * L1 * (gPsi[i] - coupling * psi0[i]);
    s.solvability_residual = std::abs(R.inner(rhs, Psi));
    CVec psi2 = R.solve(rhs);
    cd L3 = cd(0.0, 1.0) * R.inner(times_gamma(p.gamma, x, psi2), Psi);
    s.Lambda = {0.0, L1, 0.0, L3};
    s.psi = {psi0, CVec(x.size(), 0.0), psi2};
    s.orthogonality_residual = std::abs(R.inner(psi2, Psi));
    z.extra = s;
    return z;
}

std::string existence_name(Existence e) {
    switch (e) {
        case Existence::yes: return "yes";
        case Existence::no: return "no";
        case Existence::indeterminate: return "indeterminate";
    }
    return "unknown";
}

cd EmergencePrediction::value(double eps, bool with_Lambda) const {
    cd v = lambda0 + eps * first_order;
    if (with_Lambda) v += eps * eps * Lambda;
    return v;
}

EmergencePrediction emergent_prediction(const ProblemSpec& p, const PerturbationCoeffs& pc, const ScatteringData& sd,
                                        int sign, int branch) {
    if (!sd.complete) throw Refused("scattering data lacks threshold constants");
    const int n = pc.n;
    const double nn = n;
    const cd l0 = pc.lambda0;
    if (std::abs(l0) < 1e-12) throw Refused("lambda0 = 0 is excluded");
    if (std::abs(pc.rho0) < 1e-12) throw Refused("rho0(lambda0) = 0 violates the nondegeneracy assumption");
    EmergencePrediction e;
    e.n = n;
    e.branch = branch >= 0 ? 1 : -1;
    e.regime = sd.regime;
    e.rho0 = pc.rho0;
    const bool plus = e.branch > 0;
    const double z = plus ? sd.zeta_plus : sd.zeta_minus;
    e.zeta = z;
    const double s2z = std::sin(2.0 * z), c2z = std::cos(2.0 * z);
    const cd r0 = pc.rho0;
    e.first_order = cd(0.0, 1.0) * nn * r0 * s2z / (2.0 * kPi);
    const bool imaginary = nn * nn + p.kappa_star < 0.0;
    if (sd.regime == Regime::generic) {
        if (imaginary) {
            e.condition_value = (r0 * c2z * l0.imag()).real();
        } else {
            double ac = std::acos(std::clamp(sd.b_r / std::abs(sd.a), -1.0, 1.0));
            double arg = sd.theta + (plus ? ac : -ac);
            e.condition_value = (pc.rho_hat / (2.0 * kPi) * std::tan(arg)).real();
        }
        cd zh = plus ? sd.zhat_plus : sd.zhat_minus;
        e.Lambda = -cd(0.0, 1.0) * nn * r0 * zh * c2z / kPi -
                   p.kappa_star * r0 * r0 * s2z * s2z / (8.0 * kPi * kPi * l0);
    } else {
        if (std::abs(sd.b_i) < kRegimeThreshold) throw Refused("degenerate regime requires b_i(n) != 0");
        cd xi = plus ? sd.xi_hat_plus : sd.xi_hat_minus;
        e.condition_value = (l0 * r0 * sd.b_i / sd.a_r * (xi - pc.rho_hat / (kPi * l0 * r0))).real();
        e.Lambda = -(p.kappa_star * r0 * r0 + 4.0 * nn * pc.rho_hat) / (8.0 * kPi * kPi * l0);
    }
    if (e.condition_value < -kIndeterminate) e.exists = Existence::yes;
    else if (e.condition_value > kIndeterminate) e.exists = Existence::no;
    else e.exists = Existence::indeterminate;
    if (sd.regime == Regime::generic) e.condition_id = e.exists == Existence::no ? "7.40" : "7.39";
    else e.condition_id = e.exists == Existence::no ? "7.87b" : "7.77";
    e.lambda0 = l0;
    if (sign < 0) {
        e.mirrored = true;
        e.lambda0 = -std::conj(l0);
        e.first_order = -std::conj(e.first_order);
        e.Lambda = -std::conj(e.Lambda);
    }
    return e;
}

EmergencePrediction emergent_prediction(const ProblemSpec& p, int n, int sign, int branch) {
    PerturbationCoeffs pc = perturbation_coeffs(p.gamma, n, p.kappa_star, +1);
    ScatteringData sd = threshold_constants(scattering_data(p.potential, n), pc, p);
    return emergent_prediction(p, pc, sd, sign, branch);
}

Enclosure spectrum_enclosure_check(const ProblemSpec& p, cd lambda, const std::vector<double>& discrete) {
    cd z = lambda * lambda - p.kappa_star;
    double d = z.real() >= 0.0 ? std::abs(z.imag()) : std::abs(z);
    for (double k : discrete) d = std::min(d, std::abs(z - k));
    Enclosure e;
    e.distance = d;
    e.margin = p.epsilon * std::abs(lambda) * p.gamma.sup_abs() - d;
    // slack covers the accuracy of the discrete κⱼ (ε = 0 and zero-mode boundary cases)
    e.inside = e.margin >= -kEnclosureSlack * std::max(1.0, std::abs(z));
    return e;
}

}  // namespace pencil
