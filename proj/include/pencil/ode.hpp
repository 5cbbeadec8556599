#pragma once

#include <functional>
#include <vector>

namespace pencil::ode {

struct Options {
    double abs_tol = 1e-11;
    double rel_tol = 1e-11;
    double initial_step = 1e-2;
};

using State = std::vector<double>;
using System = std::function<void(const State&, State&, double)>;

// Adaptive 7(8) Runge–Kutta–Fehlberg integration of y' = f(y, x) from x0 to x1
// (x1 < x0 allowed). Throws NonConvergence if step control fails.
void integrate(const System& f, State& y, double x0, double x1, const Options& opt = {});

// Same, recording the state at each abscissa of xs (monotone, xs.front() is the start).
std::vector<State> integrate_at(const System& f, State y, const std::vector<double>& xs,
                                const Options& opt = {});

}  // namespace pencil::ode
