// qseal: bound tables, verification sweeps and scheme evaluation.
//
//   qseal bounds fig1   [--grid N]
//   qseal bounds fig2   [--grid N] --M 2 --M 4 ...
//   qseal verify gentle --dim D --outcomes K --instances N
//   qseal simulate naive   --q Q [--trials T]
//   qseal simulate achieve --p P [--grid N]
//   qseal seal eval   --scheme FILE
//   qseal seal family --p P [--phi PHI]      (writes a scheme file)
//
// Common flags: --seed, --out, --tol, --trials, --grid. CSV goes to --out or,
// without it, to standard output; summaries then go to standard error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qseal/commands.hpp"

namespace {

// Writes `body` to cfg.output_path or stdout; returns false if the file cannot be written.
bool emit(const qseal::RunConfig& cfg, const std::string& body) {
    if (cfg.output_path.empty()) {
        std::cout << body;
        return static_cast<bool>(std::cout);
    }
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output file " << cfg.output_path << '\n';
        return false;
    }
    out << body;
    return static_cast<bool>(out.flush());
}

std::ostream& report_stream(const qseal::RunConfig& cfg) { return cfg.output_path.empty() ? std::cerr : std::cout; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum seal bounds, simulations and verification"};
    app.require_subcommand(1);

    qseal::RunConfig cfg;
    app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    app.add_option("--out", cfg.output_path, "CSV output path (default: standard output)");
    app.add_option("--tol", cfg.tolerance, "Bound violation tolerance")->capture_default_str();
    app.add_option("--trials", cfg.trials, "Monte Carlo trials")->capture_default_str();
    app.add_option("--grid", cfg.grid_points, "Grid points")->capture_default_str();

    auto* bounds = app.add_subcommand("bounds", "Closed-form bound curves");
    bounds->require_subcommand(1);
    bounds->fallthrough();
    auto* fig1 = bounds->add_subcommand("fig1", "p_dist upper bound and qubit-family lower bounds vs p");
    fig1->fallthrough();
    auto* fig2 = bounds->add_subcommand("fig2", "p_nfp upper bound vs p for several M");
    fig2->fallthrough();
    std::vector<int> Ms;
    fig2->add_option("--M", Ms, "Message alphabet size (repeatable)")->required();

    auto* verify = app.add_subcommand("verify", "Randomized bound verification");
    verify->require_subcommand(1);
    verify->fallthrough();
    auto* gentle = verify->add_subcommand("gentle", "Gentle measurement bounds on random instances");
    gentle->fallthrough();
    int dim = 4;
    int outcomes = 3;
    std::int64_t instances = 1000;
    gentle->add_option("--dim", dim, "Hilbert space dimension (<= 64)")->capture_default_str();
    gentle->add_option("--outcomes", outcomes, "POVM outcomes")->capture_default_str();
    gentle->add_option("--instances", instances, "Random instances")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Protocol simulations");
    simulate->require_subcommand(1);
    simulate->fallthrough();
    auto* naive = simulate->add_subcommand("naive", "Permuted product-state protocol under attack");
    naive->fallthrough();
    int q = 1;
    naive->add_option("--q", q, "Number of plus registers")->required();
    auto* achieve = simulate->add_subcommand("achieve", "Single-qubit seal family");
    achieve->fallthrough();
    double p = 0.75;
    achieve->add_option("--p", p, "Readout probability in (1/2, 1]")->required();

    auto* seal = app.add_subcommand("seal", "Scheme files");
    seal->require_subcommand(1);
    seal->fallthrough();
    auto* eval = seal->add_subcommand("eval", "Detection metrics and bounds for a scheme file");
    eval->fallthrough();
    std::string scheme_path;
    eval->add_option("--scheme", scheme_path, "Scheme JSON file")->required();
    auto* family = seal->add_subcommand("family", "Write the single-qubit family as a scheme file");
    family->fallthrough();
    double family_p = 0.75;
    double phi = 0.0;
    family->add_option("--p", family_p, "Readout probability in (1/2, 1]")->required();
    family->add_option("--phi", phi, "Relative phase in [0, 2 pi)")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.validate();
        if (fig1->parsed()) {
            if (!emit(cfg, qseal::cmd_bounds_fig1(cfg).str())) return 1;
            report_stream(cfg) << qseal::kLowerBoundNote;
            return 0;
        }
        if (fig2->parsed()) return emit(cfg, qseal::cmd_bounds_fig2(cfg, Ms).str()) ? 0 : 1;
        if (gentle->parsed()) {
            const auto sweep = qseal::cmd_verify_gentle(cfg, dim, outcomes, instances);
            if (!emit(cfg, sweep.table.str())) return 1;
            report_stream(cfg) << sweep.summary();
            for (const auto& inst : sweep.offending) std::cerr << "offending instance: " << inst << '\n';
            return sweep.ok() ? 0 : 2;
        }
        if (naive->parsed()) return emit(cfg, qseal::cmd_simulate_naive(cfg, q).str()) ? 0 : 1;
        if (achieve->parsed()) {
            if (!emit(cfg, qseal::cmd_simulate_achieve(cfg, p).str())) return 1;
            report_stream(cfg) << qseal::kLowerBoundNote;
            return 0;
        }
        if (eval->parsed()) {
            const auto scheme = qseal::read_scheme(scheme_path);
            const auto ev = qseal::cmd_seal_eval(cfg, scheme);
            if (!emit(cfg, ev.table.str())) return 1;
            report_stream(cfg) << ev.summary();
            return ev.bounds_hold ? 0 : 2;
        }
        if (family->parsed()) {
            std::ostringstream os;
            qseal::write_scheme(os, qseal::achieve::build_family(family_p, phi));
            return emit(cfg, os.str()) ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
