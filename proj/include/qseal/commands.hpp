#pragma once

// Command implementations behind the qseal CLI. Each returns its CSV table
// plus whatever the command reports to the user; file and stream handling
// stays in the tool.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "qseal/achieve.hpp"
#include "qseal/csv.hpp"
#include "qseal/errors.hpp"
#include "qseal/gentle.hpp"
#include "qseal/naive.hpp"
#include "qseal/rng.hpp"
#include "qseal/scheme_io.hpp"
#include "qseal/seal.hpp"

namespace qseal {

struct RunConfig {
    std::uint64_t seed = 0;
    std::string output_path;  // empty: standard output
    double tolerance = kBoundTol;
    std::int64_t trials = 100000;
    int grid_points = 101;

    void validate() const {
        if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
        if (trials < 1) throw ValidationError("trials must be at least 1");
        if (grid_points < 2) throw ValidationError("grid must have at least 2 points");
    }
};

// k-th of n equally spaced points on [lo, hi]; the end points are exact.
inline double grid_point(double lo, double hi, int k, int n) {
    if (k == n - 1) return hi;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
}

inline CsvTable cmd_bounds_fig1(const RunConfig& cfg) {
    cfg.validate();
    CsvTable t({"p", "p_dist_upper", "p_dist_lower_paper", "p_dist_lower_numeric"});
    for (int k = 0; k < cfg.grid_points; ++k) {
        const double p = grid_point(0.5, 1.0, k, cfg.grid_points);
        t.add_row({p, p_dist_upper_bound(p).clamped, achieve::p_dist_lower_paper(p),
                   achieve::p_dist_lower_numeric(p, 0.0)});
    }
    return t;
}

// p sweeps [0, 1]; each M column is blank below p = 1/M.
inline CsvTable cmd_bounds_fig2(const RunConfig& cfg, const std::vector<int>& Ms) {
    cfg.validate();
    if (Ms.empty()) throw ValidationError("bounds fig2: at least one M is required");
    std::vector<std::string> header{"p"};
    for (int M : Ms) {
        if (M < 2) throw ValidationError("bounds fig2: every M must be at least 2, got " + std::to_string(M));
        header.push_back("p_nfp_upper_M" + std::to_string(M));
    }
    CsvTable t(std::move(header));
    for (int k = 0; k < cfg.grid_points; ++k) {
        const double p = grid_point(0.0, 1.0, k, cfg.grid_points);
        std::vector<CsvCell> row{p};
        for (int M : Ms) {
            if (p >= 1.0 / M)
                row.emplace_back(p_nfp_upper_bound(p, M));
            else
                row.emplace_back(std::monostate{});
        }
        t.add_row(std::move(row));
    }
    return t;
}

inline std::string serialize_instance(const GentleInstance& inst) {
    std::ostringstream os;
    const auto write_matrix = [&os](const ComplexMatrix& m) {
        const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
        detail::write_complex_list(os, rm.data(), rm.size());
    };
    os << "{\"dim\": " << inst.rho.dim() << ", \"epsilon\": " << detail::number_text(inst.epsilon)
       << ", \"dominant\": " << inst.dominant.first() << ", \"rho\": ";
    write_matrix(inst.rho.matrix());
    os << ", \"povm\": [";
    for (std::size_t k = 0; k < inst.povm.size(); ++k) {
        os << (k ? ", " : "") << "{\"label\": " << inst.povm[k].label.first() << ", \"matrix\": ";
        write_matrix(inst.povm[k].op);
        os << '}';
    }
    os << "]}";
    return os.str();
}

struct GentleSweep {
    CsvTable table{{"instance", "epsilon", "lhs_classic", "bound_classic", "lhs_unknown", "bound_unknown",
                    "slack_classic", "slack_unknown", "satisfied_classic", "satisfied_unknown", "identities_hold"}};
    std::int64_t instances = 0;
    std::int64_t classic_violations = 0;
    std::int64_t unknown_violations = 0;
    std::int64_t identity_violations = 0;
    double min_slack_classic = 0.0;
    double max_slack_classic = 0.0;
    double min_slack_unknown = 0.0;
    double max_slack_unknown = 0.0;
    std::vector<std::string> offending;  // serialized instances

    bool ok() const { return classic_violations == 0 && unknown_violations == 0 && identity_violations == 0; }

    std::string summary() const {
        std::ostringstream os;
        os << "instances: " << instances << "\nviolations (classic bound): " << classic_violations
           << "\nviolations (unknown-outcome bound): " << unknown_violations
           << "\nviolations (proof identities): " << identity_violations;
        if (instances > 0)
            os << "\nslack classic: min " << format_real(min_slack_classic) << " max " << format_real(max_slack_classic)
               << "\nslack unknown-outcome: min " << format_real(min_slack_unknown) << " max "
               << format_real(max_slack_unknown);
        os << '\n';
        return os.str();
    }
};

// Per-instance epsilon targets are log-uniform on [1e-6, 0.5].
inline GentleSweep cmd_verify_gentle(const RunConfig& cfg, int dim, int n_outcomes, std::int64_t instances) {
    cfg.validate();
    if (dim < 1 || dim > 64) throw ValidationError("verify gentle: dim must be in [1, 64]");
    if (n_outcomes < 2) throw ValidationError("verify gentle: need at least 2 outcomes");
    if (instances < 0) throw ValidationError("verify gentle: instances must be non-negative");
    GentleSweep sweep;
    for (std::int64_t i = 0; i < instances; ++i) {
        RngStream rng(derive_seed(cfg.seed, "verify-gentle",
                                  {static_cast<std::uint64_t>(dim), static_cast<std::uint64_t>(n_outcomes),
                                   static_cast<std::uint64_t>(i)}));
        const double target = std::exp(rng.uniform(std::log(1e-6), std::log(0.5)));
        const auto inst = random_instance(dim, n_outcomes, target, rng);
        const auto r = verify_instance(inst, cfg.tolerance);
        const bool identities = r.triangle_step_holds && r.norm_equals_trace && r.trace_equals_epsilon;
        sweep.table.add_row({i, r.epsilon, r.lhs_classic, r.bound_classic, r.lhs_unknown, r.bound_unknown,
                             r.slack_classic(), r.slack_unknown(), r.satisfied_classic, r.satisfied_unknown,
                             identities});
        if (i == 0) {
            sweep.min_slack_classic = sweep.max_slack_classic = r.slack_classic();
            sweep.min_slack_unknown = sweep.max_slack_unknown = r.slack_unknown();
        } else {
            sweep.min_slack_classic = std::min(sweep.min_slack_classic, r.slack_classic());
            sweep.max_slack_classic = std::max(sweep.max_slack_classic, r.slack_classic());
            sweep.min_slack_unknown = std::min(sweep.min_slack_unknown, r.slack_unknown());
            sweep.max_slack_unknown = std::max(sweep.max_slack_unknown, r.slack_unknown());
        }
        sweep.classic_violations += !r.satisfied_classic;
        sweep.unknown_violations += !r.satisfied_unknown;
        sweep.identity_violations += !identities;
        if (!r.all_hold()) sweep.offending.push_back(serialize_instance(inst));
        ++sweep.instances;
    }
    return sweep;
}

inline CsvTable cmd_simulate_naive(const RunConfig& cfg, int q) {
    cfg.validate();
    if (q < 1) throw ValidationError("simulate naive: q must be at least 1");
    const auto uq = static_cast<std::uint64_t>(q);
    const auto [s1, s2] = naive::build_naive_scheme(q, derive_seed(cfg.seed, "naive-sigma", {uq}),
                                                    derive_seed(cfg.seed, "naive-tau", {uq}));
    CsvCell nondisturbing = std::monostate{};
    if (q <= naive::kMaxDenseQ) nondisturbing = naive::verify_nondisturbing(s1, s2);
    RngStream rng(derive_seed(cfg.seed, "naive-attack", {uq}));
    const auto r = naive::simulate_qubitwise_attack(s1, cfg.trials, rng);
    const double exact = naive::exact_mean_fidelity(q);
    CsvTable t({"q", "trials", "nondisturbing", "mean_fidelity", "stderr", "exact_fidelity", "detection_probability",
                "exact_detection_probability"});
    t.add_row({std::int64_t{q}, r.trials, nondisturbing, r.mean_fidelity, r.stderr_of_mean(), exact,
               naive::detection_probability_naive(r), 1.0 - exact});
    return t;
}

inline constexpr const char* kLowerBoundNote =
    "note: p_dist_lower_paper is the closed form 1/2 + sqrt(2p(1-p))/4; p_dist_lower_numeric is "
    "1/2 + ||Z(p) - |psi_1><psi_1|||_1 / 4 = 1/2 + sqrt(p(1-p))/2. The two differ and are reported side by side.\n";

// Row of the qubit family at p: promises and returned states at phi = 0, the
// worst deviation of the returned state from Z(p) / Z(1-p) over `grid` phis,
// and the phi spread of the numeric lower bound.
inline CsvTable cmd_simulate_achieve(const RunConfig& cfg, double p) {
    cfg.validate();
    if (!(p > 0.5 && p <= 1.0)) throw ValidationError("simulate achieve: p must lie in (1/2, 1]");
    const auto scheme = achieve::build_family(p, 0.0);
    const auto r1 = achieve::returned_state({p, 0.0}, 1);
    const auto r2 = achieve::returned_state({p, 0.0}, 2);
    double z_error = 0.0;
    for (int k = 0; k < cfg.grid_points; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / cfg.grid_points;
        z_error = std::max(z_error, max_abs_entry(achieve::returned_state({p, phi}, 1).matrix() -
                                                  achieve::z_state(p).matrix()));
        z_error = std::max(z_error, max_abs_entry(achieve::returned_state({p, phi}, 2).matrix() -
                                                  achieve::z_state(1.0 - p).matrix()));
    }
    CsvTable t({"p", "promise_m1", "promise_m2", "returned_m1_00", "returned_m1_11", "returned_m2_00",
                "returned_m2_11", "returned_z_error", "p_dist_lower_paper", "p_dist_lower_numeric", "phi_spread",
                "p_dist_upper"});
    t.add_row({p, promise_probability(scheme, 1), promise_probability(scheme, 2), r1.matrix()(0, 0).real(),
               r1.matrix()(1, 1).real(), r2.matrix()(0, 0).real(), r2.matrix()(1, 1).real(), z_error,
               achieve::p_dist_lower_paper(p), achieve::p_dist_lower_numeric(p, 0.0),
               achieve::phi_invariance_spread(p, cfg.grid_points), p_dist_upper_bound(p).clamped});
    return t;
}

struct SealEvaluation {
    DetectionReport report;
    CsvTable table{{"m", "promise_probability", "p_dist_numeric", "p_dist_upper", "p_dist_upper_raw", "p_nfp_numeric",
                    "p_nfp_upper"}};
    bool bounds_hold = false;

    std::string summary() const {
        std::ostringstream os;
        os << "messages: " << report.per_message.size() << " (averages use a uniform prior over messages)\n"
           << "p_dist: " << format_real(report.p_dist_numeric) << " (upper bound " << format_real(report.p_dist_upper)
           << ")\np_nfp: " << format_real(report.p_nfp_numeric) << " (upper bound " << format_real(report.p_nfp_upper)
           << ")\nbounds " << (bounds_hold ? "hold" : "VIOLATED") << '\n';
        return os.str();
    }
};

// Per-message rows followed by one averaged row with a blank m.
inline SealEvaluation cmd_seal_eval(const RunConfig& cfg, const SealScheme& scheme) {
    cfg.validate();
    SealEvaluation ev;
    ev.report = evaluate_detection(scheme);
    for (const auto& d : ev.report.per_message)
        ev.table.add_row({std::int64_t{d.message}, d.promise_probability, d.p_dist_numeric, d.p_dist_upper.clamped,
                          d.p_dist_upper.raw, d.p_nfp_numeric, d.p_nfp_upper});
    double mean_promise = 0.0;
    for (const auto& d : ev.report.per_message) mean_promise += d.promise_probability;
    mean_promise /= static_cast<double>(ev.report.per_message.size());
    ev.table.add_row({std::monostate{}, mean_promise, ev.report.p_dist_numeric, ev.report.p_dist_upper,
                      ev.report.p_dist_upper_raw, ev.report.p_nfp_numeric, ev.report.p_nfp_upper});
    ev.bounds_hold = ev.report.bounds_hold(cfg.tolerance);
    return ev;
}

}  // namespace qseal
