#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mbqc/estimate.hpp"
#include "mbqc/json_io.hpp"
#include "mbqc/omega.hpp"
#include "mbqc/sampler.hpp"
#include "mbqc/sim.hpp"
#include "mbqc/version.hpp"

namespace {

using namespace mbqc;

struct CommonOpts {
    std::string out;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
};

std::uint64_t resolve_seed(const CommonOpts& opts) {
    if (opts.seed) {
        return *opts.seed;
    }
    if (const char* env = std::getenv(kSeedEnvVar)) {
        return std::stoull(env);
    }
    return kDefaultSeed;
}

json provenance(const std::string& command_line, std::uint64_t seed) {
    json doc;
    doc["command"] = command_line;
    doc["seed"] = seed;
    doc["version"] = kVersion;
    return doc;
}

void emit(const json& doc, const CommonOpts& opts) {
    if (opts.out.empty()) {
        std::cout << doc.dump(2) << '\n';
    } else {
        save_json(doc, opts.out);
    }
}

void emit_text(const std::string& text, const CommonOpts& opts) {
    if (opts.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(opts.out);
        if (!f) {
            throw IoError("cannot open '" + opts.out + "' for writing");
        }
        f << text;
    }
}

std::string joined_command(int argc, char** argv) {
    std::string out;
    for (int k = 0; k < argc; ++k) {
        if (k) {
            out += ' ';
        }
        out += argv[k];
    }
    return out;
}

BasisMap parse_basis(const ResourceState& state, const std::string& text) {
    BasisMap basis;
    std::stringstream ss(text);
    std::string item;
    std::size_t pos = 0;
    const std::vector<std::size_t> measured = state.measured().indices();
    while (std::getline(ss, item, ',')) {
        if (pos >= measured.size()) {
            throw ValidationError("basis list longer than the measured-qubit count");
        }
        MeasBasis b;
        if (item == "X") {
            b = MeasBasis::X;
        } else if (item == "Y") {
            b = MeasBasis::Y;
        } else if (item == "XY") {
            b = MeasBasis::XY;
        } else {
            throw ValidationError("basis entries must be X, Y or XY, got '" + item + "'");
        }
        basis.mu[measured[pos++]] = b;
    }
    if (pos != measured.size()) {
        throw ValidationError("basis list shorter than the measured-qubit count");
    }
    return basis;
}

DensityState noisy_state(const StateDocument& doc, const std::optional<NoiseModel>& noise,
                         std::size_t dense_cap) {
    const ResourceState& state = doc.state;
    PureState psi;
    if (doc.sign_flips.empty()) {
        psi = ideal_vector(state, dense_cap);
    } else {
        SignedGroup flipped{state.group, doc.sign_flips};
        psi = stabilizer_vector(state.num_qubits(), flipped.signed_generators(), dense_cap);
    }
    DensityState rho = density_from(psi);
    if (noise) {
        rho = apply_noise(state, rho, *noise, dense_cap);
    }
    return rho;
}

int run(int argc, char** argv) {
    CLI::App app{"Noisy MBQC resource-state benchmarking"};
    app.set_version_flag("--version", std::string("mbqcfid ") + kVersion);
    app.require_subcommand(1);

    const std::string command_line = joined_command(argc, argv);

    // ---- build ----
    auto* build = app.add_subcommand("build", "Construct or validate a resource state file");
    std::string build_type;
    std::size_t build_n = 0, build_rows = 0, build_cols = 0;
    std::string build_in;
    CommonOpts build_opts;
    build->add_option("--type", build_type, "cluster1d | cluster2d | custom")->required();
    build->add_option("--n", build_n, "chain length (cluster1d)");
    build->add_option("--rows", build_rows, "grid rows (cluster2d)");
    build->add_option("--cols", build_cols, "grid columns (cluster2d)");
    build->add_option("--in", build_in, "input state file (custom)");
    build->add_option("--out", build_opts.out, "output path (default stdout)");

    // ---- omega ----
    auto* omega_cmd = app.add_subcommand("omega", "Construct the averaged-fidelity operator");
    std::string omega_state, omega_method = "exact", omega_mu;
    std::size_t omega_cap = kEnumerationCapDefault;
    CommonOpts omega_opts;
    omega_cmd->add_option("--state", omega_state, "resource state file")->required();
    omega_cmd->add_option("--method", omega_method, "exact | recursive (default exact)");
    omega_cmd->add_option("--mu", omega_mu,
                          "fixed bases for the measured qubits in qubit order, e.g. X,X,XY,X");
    omega_cmd->add_option("--enum-cap", omega_cap, "group enumeration cap (default 24)");
    omega_cmd->add_option("--out", omega_opts.out, "output path (default stdout)");

    // ---- spectrum ----
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Spectral summary of the operator");
    std::string spectrum_state;
    std::size_t spectral_cap = kSpectralCapDefault;
    bool spectrum_csv = false;
    CommonOpts spectrum_opts;
    spectrum_cmd->add_option("--state", spectrum_state, "resource state file")->required();
    spectrum_cmd->add_option("--spectral-cap", spectral_cap, "spectral cap (default 26)");
    spectrum_cmd->add_flag("--csv", spectrum_csv, "emit CSV instead of JSON");
    spectrum_cmd->add_option("--out", spectrum_opts.out, "output path (default stdout)");

    // ---- sample ----
    auto* sample_cmd = app.add_subcommand("sample", "Sample stabilizers from the native distribution");
    std::string sample_state;
    std::size_t sample_count_opt = 10;
    CommonOpts sample_opts;
    sample_cmd->add_option("--state", sample_state, "resource state file")->required();
    sample_cmd->add_option("--count", sample_count_opt, "number of samples (default 10)");
    sample_cmd->add_option("--seed", sample_opts.seed, "RNG seed");
    sample_cmd->add_option("--out", sample_opts.out, "output path (default stdout)");

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand("simulate", "Average MBQC fidelity on a noisy state");
    std::string sim_state, sim_noise, sim_angles = "clifford_exact";
    std::size_t sim_dense_cap = kDenseCapDefault;
    CommonOpts sim_opts;
    sim_cmd->add_option("--state", sim_state, "resource state file")->required();
    sim_cmd->add_option("--noise", sim_noise,
                        "noise model, e.g. depolarizing:0.01 | dephasing:0.02 | coherent_z:0.05 | "
                        "global_mix:0.1 | excited_mix:k=weight,...");
    sim_cmd->add_option("--angles", sim_angles,
                        "angle average: mc:N | clifford_mc:N | clifford_exact | explicit:a,b,...");
    sim_cmd->add_option("--dense-cap", sim_dense_cap, "dense simulation cap (default 12)");
    sim_cmd->add_option("--seed", sim_opts.seed, "RNG seed");
    sim_cmd->add_option("--threads", sim_opts.threads, "worker threads (default 1)");
    sim_cmd->add_option("--out", sim_opts.out, "output path (default stdout)");

    // ---- estimate ----
    auto* est_cmd = app.add_subcommand("estimate", "Single-shot direct fidelity estimation");
    std::string est_state, est_noise, est_target = "mbqc";
    double est_eps = 0.05, est_delta = 0.05;
    std::size_t est_dense_cap = kDenseCapDefault;
    CommonOpts est_opts;
    est_cmd->add_option("--state", est_state, "resource state file")->required();
    est_cmd->add_option("--target", est_target, "mbqc | state (default mbqc)");
    est_cmd->add_option("--eps", est_eps, "additive precision (default 0.05)");
    est_cmd->add_option("--delta", est_delta, "failure probability (default 0.05)");
    est_cmd->add_option("--noise", est_noise, "noise model applied to the ideal state");
    est_cmd->add_option("--dense-cap", est_dense_cap, "dense simulation cap (default 12)");
    est_cmd->add_option("--seed", est_opts.seed, "RNG seed");
    est_cmd->add_option("--threads", est_opts.threads, "worker threads (default 1)");
    est_cmd->add_option("--out", est_opts.out, "output path (default stdout)");

    // ---- bounds ----
    auto* bounds_cmd = app.add_subcommand("bounds", "Check the fidelity sandwich");
    double bounds_fs = 0.0, bounds_fmbqc = 0.0, bounds_nu = 0.0, bounds_tol = 1e-9;
    CommonOpts bounds_opts;
    bounds_cmd->add_option("--fs", bounds_fs, "state fidelity")->required();
    bounds_cmd->add_option("--fmbqc", bounds_fmbqc, "average MBQC fidelity")->required();
    bounds_cmd->add_option("--nu", bounds_nu, "spectral gap")->required();
    bounds_cmd->add_option("--tol", bounds_tol, "slack tolerance (default 1e-9)");
    bounds_cmd->add_option("--out", bounds_opts.out, "output path (default stdout)");

    // ---- report ----
    auto* report_cmd = app.add_subcommand("report", "Consolidated fidelity report");
    std::string report_state, report_noise;
    double report_eps = 0.05, report_delta = 0.05;
    std::size_t report_mc = 64, report_dense_cap = kDenseCapDefault,
                report_spectral_cap = kSpectralCapDefault;
    CommonOpts report_opts;
    report_cmd->add_option("--state", report_state, "resource state file")->required();
    report_cmd->add_option("--noise", report_noise, "noise model applied to the ideal state");
    report_cmd->add_option("--eps", report_eps, "estimation precision (default 0.05)");
    report_cmd->add_option("--delta", report_delta, "estimation failure probability (default 0.05)");
    report_cmd->add_option("--mc-samples", report_mc, "Monte Carlo angle samples (default 64)");
    report_cmd->add_option("--dense-cap", report_dense_cap, "dense simulation cap (default 12)");
    report_cmd->add_option("--spectral-cap", report_spectral_cap, "spectral cap (default 26)");
    report_cmd->add_option("--seed", report_opts.seed, "RNG seed");
    report_cmd->add_option("--threads", report_opts.threads, "worker threads (default 1)");
    report_cmd->add_option("--out", report_opts.out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (build->parsed()) {
        ResourceState state;
        std::vector<std::size_t> sign_flips;
        if (build_type == "cluster1d") {
            state = cluster_1d(build_n);
        } else if (build_type == "cluster2d") {
            state = cluster_2d(build_rows, build_cols);
        } else if (build_type == "custom") {
            if (build_in.empty()) {
                throw ValidationError("--type custom needs --in");
            }
            StateDocument doc = load_state(build_in);
            state = std::move(doc.state);
            sign_flips = std::move(doc.sign_flips);
        } else {
            throw ValidationError("unknown build type '" + build_type + "'");
        }
        json doc = state_to_json(state, sign_flips);
        doc["provenance"] = provenance(command_line, resolve_seed(build_opts));
        emit(doc, build_opts);
        return 0;
    }

    if (omega_cmd->parsed()) {
        const StateDocument doc = load_state(omega_state);
        PauliSum sum;
        if (!omega_mu.empty()) {
            sum = build_omega_fixed(doc.state, parse_basis(doc.state, omega_mu), omega_cap);
        } else if (omega_method == "exact") {
            sum = build_omega(doc.state, omega_cap);
        } else if (omega_method == "recursive") {
            sum = build_omega_recursive(doc.state, omega_cap);
        } else {
            throw ValidationError("unknown method '" + omega_method + "'");
        }
        json out = pauli_sum_to_json(sum);
        out["provenance"] = provenance(command_line, resolve_seed(omega_opts));
        emit(out, omega_opts);
        return 0;
    }

    if (spectrum_cmd->parsed()) {
        const StateDocument doc = load_state(spectrum_state);
        const SpectralSummary summary = spectral_summary(doc.state, spectral_cap);
        if (spectrum_csv) {
            std::ostringstream csv;
            csv << "max,beta,tau,nu,max_multiplicity\n";
            csv.precision(17);
            csv << summary.max_eig << ',' << summary.beta << ',' << summary.tau << ',' << summary.nu
                << ',' << summary.max_multiplicity << '\n';
            emit_text(csv.str(), spectrum_opts);
        } else {
            json out = spectral_summary_to_json(summary);
            out["provenance"] = provenance(command_line, resolve_seed(spectrum_opts));
            emit(out, spectrum_opts);
        }
        return 0;
    }

    if (sample_cmd->parsed()) {
        const StateDocument doc = load_state(sample_state);
        const std::uint64_t seed = resolve_seed(sample_opts);
        const StabilizerSampler sampler(doc.state);
        std::ostringstream lines;
        for (std::size_t k = 0; k < sample_count_opt; ++k) {
            RngStream rng(seed, k);
            const SampleTrace trace = sampler.sample(rng);
            json line;
            line["word"] = trace.result.str();
            line["log2_prob"] = trace.log2_prob;
            lines << line.dump() << '\n';
        }
        emit_text(lines.str(), sample_opts);
        return 0;
    }

    if (sim_cmd->parsed()) {
        const StateDocument doc = load_state(sim_state);
        const std::uint64_t seed = resolve_seed(sim_opts);
        require_dense(doc.state.num_qubits(), sim_dense_cap, "simulation");
        std::optional<NoiseModel> noise;
        if (!sim_noise.empty()) {
            noise = NoiseModel::parse(sim_noise);
        }
        const DensityState rho = noisy_state(doc, noise, sim_dense_cap);
        const AngleSpec spec = AngleSpec::parse(sim_angles, seed);
        const FidelityEstimate estimate =
            average_mbqc_fidelity(doc.state, rho, spec, sim_opts.threads);
        json out;
        out["mean"] = estimate.mean;
        out["std_error"] = estimate.std_error;
        out["samples"] = estimate.samples;
        out["angles"] = spec.str();
        out["noise"] = noise ? noise->str() : "none";
        out["exact"] = expectation(rho, build_omega(doc.state));
        out["provenance"] = provenance(command_line, seed);
        emit(out, sim_opts);
        return 0;
    }

    if (est_cmd->parsed()) {
        const StateDocument doc = load_state(est_state);
        const std::uint64_t seed = resolve_seed(est_opts);
        require_dense(doc.state.num_qubits(), est_dense_cap, "estimation backend");
        std::optional<NoiseModel> noise;
        if (!est_noise.empty()) {
            noise = NoiseModel::parse(est_noise);
        }
        const DensityState rho = noisy_state(doc, noise, est_dense_cap);
        EstimationReport report;
        if (est_target == "mbqc") {
            report = estimate_mbqc_fidelity(doc.state, rho, est_eps, est_delta, seed, est_opts.threads);
        } else if (est_target == "state") {
            report = estimate_state_fidelity(doc.state, rho, est_eps, est_delta, seed, est_opts.threads);
        } else {
            throw ValidationError("unknown target '" + est_target + "'");
        }
        json out = estimation_report_to_json(report);
        out["noise"] = noise ? noise->str() : "none";
        out["provenance"] = provenance(command_line, seed);
        emit(out, est_opts);
        return 0;
    }

    if (bounds_cmd->parsed()) {
        const BoundsVerdict verdict = check_bounds(bounds_fs, bounds_fmbqc, bounds_nu, bounds_tol);
        json out = bounds_verdict_to_json(verdict);
        out["provenance"] = provenance(command_line, resolve_seed(bounds_opts));
        emit(out, bounds_opts);
        return 0;
    }

    if (report_cmd->parsed()) {
        const auto t0 = std::chrono::steady_clock::now();
        const StateDocument doc = load_state(report_state);
        const std::uint64_t seed = resolve_seed(report_opts);
        require_dense(doc.state.num_qubits(), report_dense_cap, "report");
        std::optional<NoiseModel> noise;
        if (!report_noise.empty()) {
            noise = NoiseModel::parse(report_noise);
        }
        const DensityState rho = noisy_state(doc, noise, report_dense_cap);
        const auto ms_since = [](std::chrono::steady_clock::time_point start) {
            return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        };

        json timings;
        auto t = std::chrono::steady_clock::now();
        const SpectralSummary summary = spectral_summary(doc.state, report_spectral_cap);
        timings["spectrum_ms"] = ms_since(t);

        t = std::chrono::steady_clock::now();
        const PauliSum omega = build_omega(doc.state, report_spectral_cap);
        const double f_mbqc_exact = expectation(rho, omega);
        const double f_s_exact = state_fidelity(rho, doc.state);
        timings["exact_ms"] = ms_since(t);

        t = std::chrono::steady_clock::now();
        const EstimationReport mbqc_report =
            estimate_mbqc_fidelity(doc.state, rho, report_eps, report_delta, seed, report_opts.threads);
        const EstimationReport state_report = estimate_state_fidelity(
            doc.state, rho, report_eps, report_delta, seed + 1, report_opts.threads);
        timings["estimation_ms"] = ms_since(t);

        t = std::chrono::steady_clock::now();
        AngleSpec mc;
        mc.mode = AngleSpec::Mode::mc_uniform;
        mc.count = report_mc;
        mc.seed = seed + 2;
        const FidelityEstimate mc_estimate =
            average_mbqc_fidelity(doc.state, rho, mc, report_opts.threads);
        // Drive the adaptive measurement path on a few angle draws; it must
        // agree with the fixed-angle operator route.
        const std::size_t adaptive_checks = std::min<std::size_t>(3, report_mc);
        for (std::size_t k = 0; k < adaptive_checks; ++k) {
            RngStream rng(seed + 2, k);
            std::vector<double> angles(doc.state.flow.order.size());
            for (double& a : angles) {
                a = 2 * std::numbers::pi * rng.next_double();
            }
            (void)mbqc_fidelity_at(doc.state, rho, angles);
        }
        timings["mc_ms"] = ms_since(t);

        const BoundsVerdict exact_bounds = check_bounds(f_s_exact, f_mbqc_exact, summary.nu);

        json out;
        out["n"] = doc.state.num_qubits();
        out["outputs"] = doc.state.outputs.indices();
        out["noise"] = noise ? noise->str() : "none";
        out["nu"] = summary.nu;
        out["beta"] = summary.beta;
        out["f_s"] = {{"exact", f_s_exact}, {"estimated", state_report.estimate_clamped}};
        out["f_mbqc"] = {{"exact", f_mbqc_exact},
                         {"estimated", mbqc_report.estimate_clamped},
                         {"mc_mean", mc_estimate.mean},
                         {"mc_std_error", mc_estimate.std_error},
                         {"mc_samples", mc_estimate.samples}};
        out["bounds"] = bounds_verdict_to_json(exact_bounds);
        out["estimates"] = {{"mbqc", estimation_report_to_json(mbqc_report)},
                            {"state", estimation_report_to_json(state_report)}};
        timings["total_ms"] = ms_since(t0);
        out["timings_ms"] = std::move(timings);
        out["provenance"] = provenance(command_line, seed);
        emit(out, report_opts);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mbqc::CapExceeded& e) {
        std::cerr << "error (cap exceeded): " << e.what() << '\n';
        return 3;
    } catch (const mbqc::IoError& e) {
        std::cerr << "error (io): " << e.what() << '\n';
        return 4;
    } catch (const mbqc::ValidationError& e) {
        std::cerr << "error (validation): " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error (validation): " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
