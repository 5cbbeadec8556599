#include "pencil/oracle.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "pencil/errors.hpp"
#include "pencil/floquet.hpp"

namespace pencil {

std::string status_name(OracleStatus s) {
    switch (s) {
        case OracleStatus::isolated: return "isolated";
        case OracleStatus::in_band: return "in_band";
        case OracleStatus::not_found: return "not_found";
    }
    return "unknown";
}

double oracle_length(const ProblemSpec& p) {
    double lv = p.potential.support_cutoff();
    return kTwoPi * std::ceil(lv / kTwoPi);
}

namespace {

struct Branch {
    std::array<cd, 2> right_data, left_data;  // Cauchy data at +L and −L
    cd mu_decay, mu_grow;
    bool in_band = false;
};

Branch floquet_data(const ProblemSpec& p, cd lambda, const ode::Options& opt) {
    Monodromy A = monodromy(p, lambda, opt);
    FloquetPair fp = floquet_multipliers(A, 1);
    Branch b;
    b.mu_decay = std::abs(fp.mu_plus) < std::abs(fp.mu_minus) ? fp.mu_plus : fp.mu_minus;
    b.mu_grow = 1.0 / b.mu_decay;
    b.in_band = std::abs(std::abs(b.mu_decay) - 1.0) <= kDeltaUni;
    // the analytic eigenvector keeps the determinant holomorphic in λ
    b.right_data = {-A.a12, A.a11 - b.mu_decay};
    b.left_data = {-A.a12, A.a11 - b.mu_grow};
    return b;
}

}  // namespace

MatchingValue matching_value(const ProblemSpec& p, cd lambda, double L, const ode::Options& opt) {
    Branch b = floquet_data(p, lambda, opt);
    MatchingValue mv;
    mv.mu_decay = b.mu_decay;
    mv.mu_grow = b.mu_grow;
    mv.in_band = b.in_band;
    auto q = pencil_coefficient(p, lambda, true);
    auto r = propagate(q, {Cauchy{b.right_data[0], b.right_data[1]}}, L, 0.0, opt)[0];
    auto l = propagate(q, {Cauchy{b.left_data[0], b.left_data[1]}}, -L, 0.0, opt)[0];
    mv.value = l.u * r.du - l.du * r.u;
    double scale = std::hypot(std::abs(l.u), std::abs(l.du)) * std::hypot(std::abs(r.u), std::abs(r.du));
    mv.normalized = scale > 0.0 ? std::abs(mv.value) / scale : std::abs(mv.value);
    return mv;
}

cd matching_determinant(const ProblemSpec& p, cd lambda, double L) {
    MatchingValue mv = matching_value(p, lambda, L);
    if (mv.in_band) throw Refused("lambda lies in a spectral band (|mu| = 1)");
    return mv.value;
}

namespace {

struct CircleSamples {
    std::vector<cd> z, d;
    int winding = 0;
    double min_abs = INFINITY;
    bool band_crossing = false;
};

// Samples D on the circle, doubling until no phase step exceeds π/2.
CircleSamples sample_circle(const ProblemSpec& p, cd center, double radius, const OracleOptions& o) {
    const double L = o.L > 0.0 ? o.L : oracle_length(p);
    CircleSamples c;
    int M = std::max(16, o.winding_samples);
    auto point = [&](int k, int m) { return center + radius * std::exp(cd(0.0, kTwoPi * k / m)); };
    auto eval = [&](cd z) {
        MatchingValue mv = matching_value(p, z, L, o.ode);
        if (mv.in_band) c.band_crossing = true;
        c.min_abs = std::min(c.min_abs, mv.normalized);
        return mv.value;
    };
    c.z.resize(M);
    c.d.resize(M);
    for (int k = 0; k < M; ++k) c.d[k] = eval(c.z[k] = point(k, M));
    for (;;) {
        double total = 0.0, max_jump = 0.0;
        for (int k = 0; k < M; ++k) {
            double d = std::arg(c.d[(k + 1) % M] / c.d[k]);
            total += d;
            max_jump = std::max(max_jump, std::abs(d));
        }
        if (max_jump <= kPi / 2.0 || M >= 16384) {
            c.winding = int(std::lround(total / kTwoPi));
            break;
        }
        std::vector<cd> fz(2 * M), fd(2 * M);
        for (int k = 0; k < M; ++k) {
            fz[2 * k] = c.z[k];
            fd[2 * k] = c.d[k];
            fz[2 * k + 1] = point(2 * k + 1, 2 * M);
            fd[2 * k + 1] = eval(fz[2 * k + 1]);
        }
        c.z.swap(fz);
        c.d.swap(fd);
        M *= 2;
    }
    return c;
}

}  // namespace

Winding winding_number(const ProblemSpec& p, cd center, double radius, const OracleOptions& o, bool exclude_center) {
    CircleSamples c = sample_circle(p, center, radius, o);
    Winding w;
    w.number = c.winding;
    w.samples = int(c.z.size());
    w.min_abs = c.min_abs;
    w.band_crossing = c.band_crossing;
    if (exclude_center) w.number -= sample_circle(p, center, 1e-3 * radius, o).winding;
    return w;
}

ZeroCluster zeros_in_disc(const ProblemSpec& p, cd center, double radius, const OracleOptions& o) {
    CircleSamples c = sample_circle(p, center, radius, o);
    ZeroCluster zc;
    zc.count = c.winding;
    zc.min_abs = c.min_abs;
    zc.band_crossing = c.band_crossing;
    if (zc.count <= 0) return zc;
    const int M = int(c.z.size());
    // unwrapped log D minus the winding part is periodic in θ
    std::vector<cd> f(M);
    double phase = std::arg(c.d[0]);
    for (int k = 0; k < M; ++k) {
        if (k > 0) phase += std::arg(c.d[k] / c.d[k - 1]);
        f[k] = cd(std::log(std::abs(c.d[k])), phase - double(zc.count) * kTwoPi * k / M);
    }
    const int K = std::min(zc.count, 3);
    std::vector<cd> ps(K + 1);  // power sums about the center
    for (int m = 1; m <= K; ++m) {
        cd ck = 0.0;
        for (int k = 0; k < M; ++k) ck += f[k] * std::exp(cd(0.0, kTwoPi * m * k / M));
        ck /= double(M);
        ps[m] = -double(m) * std::pow(radius, m) * ck;
    }
    zc.centroid = center + ps[1] / double(zc.count);
    if (zc.count == 1) {
        zc.zeros = {center + ps[1]};
    } else if (zc.count == 2) {
        cd e2 = 0.5 * (ps[1] * ps[1] - ps[2]);
        cd disc = std::sqrt(ps[1] * ps[1] - 4.0 * e2);
        zc.zeros = {center + 0.5 * (ps[1] + disc), center + 0.5 * (ps[1] - disc)};
    } else if (zc.count == 3) {
        // Newton identities, then the cubic by companion eigenvalues
        cd e1 = ps[1], e2 = 0.5 * (e1 * ps[1] - ps[2]), e3 = (e2 * ps[1] - e1 * ps[2] + ps[3]) / 3.0;
        Eigen::Matrix3cd C = Eigen::Matrix3cd::Zero();
        C(0, 0) = e1;
        C(0, 1) = -e2;
        C(0, 2) = e3;
        C(1, 0) = 1.0;
        C(2, 1) = 1.0;
        Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(C);
        for (int i = 0; i < 3; ++i) zc.zeros.push_back(center + es.eigenvalues()[i]);
    }
    return zc;
}

namespace {

std::vector<Cauchy> sample_branch(const Coefficient& q, Cauchy start, const std::vector<double>& xs,
                                  const ode::Options& opt) {
    std::vector<Cauchy> out;
    out.reserve(xs.size());
    out.push_back(start);
    for (std::size_t i = 1; i < xs.size(); ++i) out.push_back(propagate(q, {out.back()}, xs[i - 1], xs[i], opt)[0]);
    return out;
}

void fill_eigenfunction(const ProblemSpec& p, OracleResult& res, double L, const OracleOptions& o) {
    Branch b = floquet_data(p, res.lambda, o.ode);
    auto q = pencil_coefficient(p, res.lambda, true);
    int M = o.eigenfunction_points | 1;
    int half = M / 2 + 1;
    std::vector<double> xl(half), xr(half);
    for (int i = 0; i < half; ++i) {
        xl[i] = -L + L * i / (half - 1);
        xr[i] = L - L * i / (half - 1);
    }
    xl.back() = 0.0;
    xr.back() = 0.0;
    auto left = sample_branch(q, Cauchy{b.left_data[0], b.left_data[1]}, xl, o.ode);
    auto right = sample_branch(q, Cauchy{b.right_data[0], b.right_data[1]}, xr, o.ode);
    cd scale = std::abs(right.back().u) >= std::abs(right.back().du) ? left.back().u / right.back().u
                                                                       : left.back().du / right.back().du;
    res.x.assign(M, 0.0);
    res.psi.assign(M, 0.0);
    for (int i = 0; i < half; ++i) {
        res.x[i] = xl[i];
        res.psi[i] = left[i].u;
    }
    for (int i = 0; i < half - 1; ++i) {
        res.x[M - 1 - i] = xr[i];
        res.psi[M - 1 - i] = scale * right[i].u;
    }
    double peak = 0.0;
    for (cd v : res.psi) peak = std::max(peak, std::abs(v));
    if (peak > 0.0)
        for (cd& v : res.psi) v /= peak;
    // fourth-order finite-difference residual of ψ'' − qψ
    const double h = res.x[1] - res.x[0];
    double rn = 0.0, pn = 0.0;
    for (int i = 2; i + 2 < M; ++i) {
        cd d2 = (-res.psi[i - 2] + 16.0 * res.psi[i - 1] - 30.0 * res.psi[i] + 16.0 * res.psi[i + 1] - res.psi[i + 2]) /
                (12.0 * h * h);
        rn += std::norm(d2 - q(res.x[i]) * res.psi[i]);
        pn += std::norm(res.psi[i]);
    }
    res.eigenfunction_residual = pn > 0.0 ? std::sqrt(rn / pn) : 0.0;
    res.decay_per_period = 1.0 / std::abs(b.mu_decay);
}

}  // namespace

OracleResult find_isolated_eigenvalue(const ProblemSpec& p, cd guess, double search_radius, const OracleOptions& o) {
    const double L = o.L > 0.0 ? o.L : oracle_length(p);
    OracleResult res;
    auto D = [&](cd z) { return matching_value(p, z, L, o.ode).value; };
    double h = std::max(search_radius / 8.0, 1e-8);
    cd x0 = guess - h, x1 = guess + h, x2 = guess;
    cd f0 = D(x0), f1 = D(x1), f2 = D(x2);
    bool converged = false;
    for (int it = 0; it < o.max_iterations; ++it) {
        res.iterations = it + 1;
        if (f2 == 0.0) {
            converged = true;
            break;
        }
        cd h1 = x1 - x0, h2 = x2 - x1;
        cd d1 = (f1 - f0) / h1, d2 = (f2 - f1) / h2;
        cd dd = (d2 - d1) / (h2 + h1);
        cd bq = d2 + h2 * dd;
        cd disc = std::sqrt(bq * bq - 4.0 * f2 * dd);
        cd den = std::abs(bq + disc) >= std::abs(bq - disc) ? bq + disc : bq - disc;
        cd dx = den != 0.0 ? -2.0 * f2 / den : cd(h);
        cd x3 = x2 + dx;
        if (!std::isfinite(x3.real()) || !std::isfinite(x3.imag()) || std::abs(x3 - guess) > search_radius) break;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        x2 = x3;
        f2 = D(x3);
        if (std::abs(dx) <= o.step_tolerance * std::max(1.0, std::abs(x3))) {
            converged = true;
            break;
        }
    }
    res.lambda = x2;
    MatchingValue mv = matching_value(p, x2, L, o.ode);
    res.matching_residual = mv.normalized;
    res.mu_decay_modulus = std::abs(mv.mu_decay);
    res.mu_grow_modulus = std::abs(mv.mu_grow);
    if (!converged || std::abs(x2 - guess) > search_radius) {
        res.status = OracleStatus::not_found;
        return res;
    }
    if (mv.in_band) {
        res.status = OracleStatus::in_band;
        return res;
    }
    res.status = res.matching_residual <= 1e-8 ? OracleStatus::isolated : OracleStatus::not_found;
    if (res.status == OracleStatus::isolated) fill_eigenfunction(p, res, L, o);
    return res;
}

double fitted_order(const std::vector<double>& eps, const std::vector<double>& defect) {
    const std::size_t m = eps.size();
    if (m < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::log(eps[i]), y = std::log(std::max(defect[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

DefectReport eigenvalue_defect_order(const ProblemSpec& p, const std::function<cd(double)>& prediction,
                                     const std::vector<double>& ladder,
                                     const std::function<double(double)>& search_radius, const OracleOptions& o) {
    if (ladder.size() < 3) throw Refused("epsilon ladder needs at least 3 entries");
    DefectReport rep;
    for (double e : ladder) {
        ProblemSpec q = p;
        q.epsilon = e;
        cd pred = prediction(e);
        OracleResult r = find_isolated_eigenvalue(q, pred, search_radius(e), o);
        rep.epsilon.push_back(e);
        rep.predicted.push_back(pred);
        rep.oracle.push_back(r.lambda);
        rep.status.push_back(r.status);
        rep.defect.push_back(std::abs(r.lambda - pred));
        if (r.status != OracleStatus::isolated) rep.contradiction = true;
    }
    rep.order = fitted_order(rep.epsilon, rep.defect);
    return rep;
}

}  // namespace pencil
