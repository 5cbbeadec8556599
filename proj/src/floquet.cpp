#include "pencil/floquet.hpp"

#include <cmath>

namespace pencil {

std::vector<Cauchy> propagate(const Coefficient& q, std::vector<Cauchy> init, double x0, double x1,
                              const ode::Options& opt) {
    const std::size_t m = init.size();
    ode::State y(4 * m);
    for (std::size_t s = 0; s < m; ++s) {
        y[4 * s + 0] = init[s].u.real();
        y[4 * s + 1] = init[s].u.imag();
        y[4 * s + 2] = init[s].du.real();
        y[4 * s + 3] = init[s].du.imag();
    }
    auto rhs = [&q, m](const ode::State& v, ode::State& dv, double x) {
        cd qx = q(x);
        for (std::size_t s = 0; s < m; ++s) {
            cd u(v[4 * s], v[4 * s + 1]);
            cd f = qx * u;
            dv[4 * s + 0] = v[4 * s + 2];
            dv[4 * s + 1] = v[4 * s + 3];
            dv[4 * s + 2] = f.real();
            dv[4 * s + 3] = f.imag();
        }
    };
    ode::integrate(rhs, y, x0, x1, opt);
    for (std::size_t s = 0; s < m; ++s) {
        init[s].u = cd(y[4 * s], y[4 * s + 1]);
        init[s].du = cd(y[4 * s + 2], y[4 * s + 3]);
    }
    return init;
}

Coefficient pencil_coefficient(const ProblemSpec& p, cd lambda, bool with_potential) {
    cd base = p.kappa_star - lambda * lambda;
    cd coupling = cd(0.0, p.epsilon) * lambda;
    if (with_potential) {
        return [base, coupling, &p](double x) { return base + coupling * p.gamma(x) + p.potential(x); };
    }
    return [base, coupling, &p](double x) { return base + coupling * p.gamma(x); };
}

FundamentalValues fundamental_solutions(const ProblemSpec& p, cd lambda, double x_end, const ode::Options& opt) {
    auto q = pencil_coefficient(p, lambda, false);
    auto out = propagate(q, {Cauchy{1.0, 0.0}, Cauchy{0.0, 1.0}}, 0.0, x_end, opt);
    return {out[0].u, out[0].du, out[1].u, out[1].du};
}

Monodromy monodromy(const ProblemSpec& p, cd lambda, const ode::Options& opt) {
    FundamentalValues f = fundamental_solutions(p, lambda, kTwoPi, opt);
    Monodromy m;
    m.a11 = f.phi;
    m.a12 = f.psi;
    m.a21 = f.dphi;
    m.a22 = f.dpsi;
    m.lambda = lambda;
    m.epsilon = p.epsilon;
    m.integrator_tolerance = opt.rel_tol;
    return m;
}

Monodromy monodromy_unperturbed(cd lambda, double kappa_star) {
    cd k = kappa(lambda, kappa_star);
    cd c = std::cos(kTwoPi * k);
    cd s = std::sin(kTwoPi * k);
    cd sinc_term;  // sin(2πκ)/κ with its limit 2π at κ = 0
    if (std::abs(k) < 1e-4) {
        cd z2 = (kTwoPi * k) * (kTwoPi * k);
        sinc_term = kTwoPi * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
    } else {
        sinc_term = s / k;
    }
    Monodromy m;
    m.a11 = c;
    m.a12 = sinc_term;
    m.a21 = -k * s;
    m.a22 = c;
    m.lambda = lambda;
    return m;
}

FloquetPair floquet_multipliers(const Monodromy& m, int z) {
    FloquetPair fp;
    fp.z = z >= 0 ? 1 : -1;
    fp.trace = m.trace();
    cd disc = fp.trace * fp.trace - 4.0;
    cd root = std::sqrt(disc);
    fp.mu_plus = 0.5 * (fp.trace + double(fp.z) * root);
    fp.mu_minus = 0.5 * (fp.trace - double(fp.z) * root);
    // the smaller-magnitude root via μ₊μ₋ = 1 avoids cancellation
    if (std::abs(fp.mu_plus) > std::abs(fp.mu_minus)) {
        if (std::abs(fp.mu_plus) > 0.0) fp.mu_minus = 1.0 / fp.mu_plus;
    } else if (std::abs(fp.mu_minus) > 0.0) {
        fp.mu_plus = 1.0 / fp.mu_minus;
    }
    fp.degenerate = std::abs(disc) < kDegenerateTrace;
    return fp;
}

std::array<cd, 2> monodromy_eigvec(const Monodromy& m, cd mu) {
    std::array<cd, 2> v1{-m.a12, m.a11 - mu};
    std::array<cd, 2> v2{m.a22 - mu, -m.a21};
    double n1 = std::abs(v1[0]) + std::abs(v1[1]);
    double n2 = std::abs(v2[0]) + std::abs(v2[1]);
    return n1 >= n2 ? v1 : v2;
}

std::optional<DecayingDirection> decaying_direction(const Monodromy& m, double delta_uni) {
    FloquetPair fp = floquet_multipliers(m, 1);
    cd small = std::abs(fp.mu_plus) < std::abs(fp.mu_minus) ? fp.mu_plus : fp.mu_minus;
    cd large = std::abs(fp.mu_plus) < std::abs(fp.mu_minus) ? fp.mu_minus : fp.mu_plus;
    if (std::abs(std::abs(small) - 1.0) <= delta_uni && std::abs(std::abs(large) - 1.0) <= delta_uni)
        return std::nullopt;
    DecayingDirection d;
    d.multiplier = small;
    d.eigvec = monodromy_eigvec(m, small);
    d.growing_multiplier = large;
    d.growing_eigvec = monodromy_eigvec(m, large);
    return d;
}

}  // namespace pencil
