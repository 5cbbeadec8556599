#include "pencil/ode.hpp"

#include <cmath>
#include <exception>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "pencil/errors.hpp"

namespace pencil::ode {

namespace odeint = boost::numeric::odeint;

namespace {

auto make_stepper(const Options& opt) {
    return odeint::make_controlled(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_fehlberg78<State>());
}

double signed_step(const Options& opt, double x0, double x1) {
    double h = std::min(opt.initial_step, std::abs(x1 - x0));
    return x1 >= x0 ? h : -h;
}

}  // namespace

void integrate(const System& f, State& y, double x0, double x1, const Options& opt) {
    if (x0 == x1) return;
    try {
        odeint::integrate_adaptive(make_stepper(opt), f, y, x0, x1, signed_step(opt, x0, x1));
    } catch (const std::exception& e) {
        throw NonConvergence(std::string("ODE integration failed: ") + e.what());
    }
    for (double v : y)
        if (!std::isfinite(v)) throw NonConvergence("ODE integration produced a non-finite state");
}

std::vector<State> integrate_at(const System& f, State y, const std::vector<double>& xs, const Options& opt) {
    std::vector<State> out;
    out.reserve(xs.size());
    if (xs.empty()) return out;
    out.push_back(y);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        integrate(f, y, xs[i - 1], xs[i], opt);
        out.push_back(y);
    }
    return out;
}

}  // namespace pencil::ode
