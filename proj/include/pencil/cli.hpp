#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "pencil/problem.hpp"
#include "pencil/report.hpp"

namespace pencil::cli {

// Tunable numerical settings; every report embeds their resolved values.
struct Tolerances {
    double ode_tol = 1e-11;
    int n_modes = 32;
    int alpha_modes = 64;
    int winding_samples = 256;
    int oracle_max_iterations = 80;
    int eigenfunction_points = 1025;
    double fit_order_min = 1.7;

    // KEY=VAL; throws InputError on unknown keys or unparsable values
    void apply_override(const std::string& assignment);
    report::json to_json() const;
};

struct RunConfig {
    std::string problem_path;  // relative paths resolve against the config file directory
    std::string command;       // bands | coeffs | scattering | predict | verify | enclosure
    std::string out;
    std::vector<int> n{1};
    std::vector<int> signs{1, -1};
    std::vector<int> branches{1, -1};
    int tau_points = 201;
    std::vector<double> epsilon_ladder{0.04, 0.02, 0.01};
    std::string target = "emergent";  // verify: emergent | isolated
    int mode_index = 0;
    int order = 2;
    std::vector<cd> lambdas;  // enclosure: extra eigenvalues to check
    Tolerances tol;

    bool operator==(const RunConfig&) const = default;
};

bool operator==(const Tolerances& a, const Tolerances& b);

inline const std::vector<std::string> kCommands{"bands", "coeffs", "scattering", "predict", "verify", "enclosure"};

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);
std::string serialize_run_config(const RunConfig& c);

// Runs one command and returns file name → content; nothing touches the disk.
std::map<std::string, std::string> run_command(const RunConfig& c, const ProblemSpec& p, int jobs);

// Bounded worker pool; results are written by index so output order is fixed.
void parallel_for(int count, int jobs, const std::function<void(int)>& body);

}  // namespace pencil::cli
