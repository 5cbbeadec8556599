#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "pencil/cli.hpp"
#include "pencil/errors.hpp"
#include "pencil/problem.hpp"
#include "pencil/report.hpp"

namespace {

int env_jobs() {
    const char* v = std::getenv("PENCIL_SPECTRA_JOBS");
    if (!v || !*v) return 1;
    char* end = nullptr;
    long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1) throw pencil::InputError("PENCIL_SPECTRA_JOBS must be a positive integer");
    return int(n);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra of the quadratic pencil with a weak periodic perturbation"};
    std::string command, config_path, out;
    int jobs = 0;
    std::vector<std::string> overrides;
    app.add_option("command", command, "bands | coeffs | scattering | predict | verify | enclosure")
        ->check(CLI::IsMember(pencil::cli::kCommands));
    app.add_option("--config", config_path, "run configuration (JSON)")->required();
    app.add_option("--out", out, "output directory");
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tol-override", overrides, "KEY=VAL, repeatable");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        pencil::cli::RunConfig cfg = pencil::cli::load_run_config(config_path);
        if (!command.empty()) cfg.command = command;
        if (cfg.command.empty()) throw pencil::InputError("no command given on the command line or in the config");
        if (!out.empty()) cfg.out = out;
        if (cfg.out.empty()) cfg.out = "out";
        for (const auto& o : overrides) cfg.tol.apply_override(o);
        if (jobs == 0) jobs = env_jobs();
        pencil::ProblemSpec p = pencil::load_problem(cfg.problem_path);
        auto files = pencil::cli::run_command(cfg, p, jobs);
        pencil::report::write_files(cfg.out, files);
        for (const auto& [name, body] : files) std::cout << cfg.out << "/" << name << "\n";
        return 0;
    } catch (const pencil::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const pencil::Refused& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 2;
    } catch (const pencil::NonConvergence& e) {
        std::cerr << "no convergence: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
