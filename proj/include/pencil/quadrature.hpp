#pragma once

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pencil/errors.hpp"

namespace pencil::quad {

// Composite 30-point Gauss–Legendre; exact to rounding for smooth integrands of
// moderate frequency once `panels` resolves the oscillation.
template <class F>
auto gauss_legendre(F f, double a, double b, int panels = 8) {
    using boost::math::quadrature::gauss;
    const double h = (b - a) / panels;
    decltype(f(a)) sum{};
    for (int i = 0; i < panels; ++i) sum += gauss<double, 30>::integrate(f, a + i * h, a + (i + 1) * h);
    return sum;
}

// Adaptive 31-point Gauss–Kronrod; throws NonConvergence when the error estimate
// stays above tol · max(1, L1 norm).
template <class F>
auto adaptive(F f, double a, double b, double tol, double* err_out = nullptr) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0, l1 = 0.0;
    auto v = gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, &err, &l1);
    if (err_out) *err_out = err;
    if (!(err <= 10.0 * tol * std::max(1.0, l1)))
        throw NonConvergence("adaptive quadrature did not converge (error estimate " + std::to_string(err) + ")");
    return v;
}

}  // namespace pencil::quad
