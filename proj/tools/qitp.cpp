#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qitp/cli.hpp"

namespace {

void add_hamiltonian_options(CLI::App *app, qitp::cli::HamiltonianSpec &spec, std::string &a2_text) {
    app->add_option("--ham", spec.source, "hydrogen | two-neutron | Hamiltonian JSON file")->capture_default_str();
    app->add_option("--basis", spec.basis_path, "STO-2G basis config for the hydrogen preset");
    app->add_option("--couplings", spec.couplings_path, "spin-coupling JSON for the two-neutron preset");
    app->add_option_function<double>("--a1", [&spec](double v) { spec.a1 = v; }, "vector coupling A1 (MeV)");
    app->add_option("--a2", a2_text, "tensor coupling A2, 9 comma-separated values, row-major (MeV)");
}

void apply_a2(qitp::cli::HamiltonianSpec &spec, const std::string &a2_text) {
    if (!a2_text.empty()) spec.a2 = qitp::cli::parse_list(a2_text);
}

}  // namespace

int main(int argc, char **argv) {
    using namespace qitp::cli;
    CLI::App app{"Imaginary-time propagation with a reservoir qubit: simulate, sweep, transpile"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    RunConfig run;
    std::string run_a2;
    auto *run_cmd = app.add_subcommand("run", "Run the ITP experiment and write results");
    add_hamiltonian_options(run_cmd, run.hamiltonian, run_a2);
    run_cmd->add_option("--tau", run.tau, "imaginary time step (inverse energy units)")->required();
    run_cmd->add_option("--et", run.et, "trial energy: auto | <value> | frac:<x>")->capture_default_str();
    run_cmd->add_option("--init", run.initial_state, "uniform | basis:<k> | amps:<a,b,...>")->capture_default_str();
    run_cmd->add_option("--reps", run.repetitions, "repetitions")->capture_default_str()->check(CLI::PositiveNumber);
    run_cmd->add_option("--shots", run.shots, "shots (0 = exact probabilities only)")->capture_default_str();
    run_cmd->add_option("--seed", run.seed, "sampler seed")->capture_default_str();
    run_cmd->add_option("--noise", run.noise, "noise g,l,e (damping, dephasing, readout flip)");
    run_cmd->add_option("--out", run.out, "output path (default stdout)");
    run_cmd->add_option("--format", run.format, "json | csv")->capture_default_str();

    SweepConfig sweep;
    std::string sweep_a2, taus_text = "5,10,20", fractions_text;
    bool fractions_given = false;
    auto *sweep_cmd = app.add_subcommand("sweep-et", "Sweep the trial energy as fractions of E0");
    add_hamiltonian_options(sweep_cmd, sweep.hamiltonian, sweep_a2);
    sweep_cmd->add_option("--taus", taus_text, "comma-separated tau values")->capture_default_str();
    sweep_cmd->add_option_function<std::string>(
        "--fractions",
        [&](const std::string &s) {
            fractions_text = s;
            fractions_given = true;
        },
        "comma-separated E_T/E0 fractions (default 0.5,0.8,0.9,1.0,1.1,1.2,1.5)");
    sweep_cmd->add_option("--init", sweep.initial_state, "initial state")->capture_default_str();
    sweep_cmd->add_option("--reps", sweep.repetitions, "repetitions")->capture_default_str()->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", sweep.out, "CSV output path (default stdout)");

    TranspileConfig tr;
    std::string tr_a2;
    auto *tr_cmd = app.add_subcommand("transpile", "Compile U(tau) for a 2-level system into RX/RZ/CZ");
    add_hamiltonian_options(tr_cmd, tr.hamiltonian, tr_a2);
    tr_cmd->add_option("--tau", tr.tau, "imaginary time step")->required();
    tr_cmd->add_option("--et", tr.et, "trial energy: auto | <value> | frac:<x>")->capture_default_str();
    tr_cmd->add_option("--out", tr.out, "OpenQASM output path (default stdout)");
    tr_cmd->add_option("--report", tr.report, "JSON report path (default <out>.report.json)");

    HamConfig ham;
    std::string ham_a2;
    auto *ham_cmd = app.add_subcommand("ham", "Build a benchmark Hamiltonian and write it as JSON");
    ham_cmd->add_option("--builder", ham.builder, "hydrogen-sto2g | two-neutron")->capture_default_str();
    ham_cmd->add_option("--basis", ham.params.basis_path, "STO-2G basis config");
    ham_cmd->add_option("--couplings", ham.params.couplings_path, "spin-coupling JSON");
    ham_cmd->add_option_function<double>("--a1", [&ham](double v) { ham.params.a1 = v; }, "vector coupling A1 (MeV)");
    ham_cmd->add_option("--a2", ham_a2, "tensor coupling A2, 9 values row-major (MeV)");
    ham_cmd->add_option("--out", ham.out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        if (*run_cmd) {
            apply_a2(run.hamiltonian, run_a2);
            return cmd_run(run);
        }
        if (*sweep_cmd) {
            apply_a2(sweep.hamiltonian, sweep_a2);
            sweep.taus = parse_list(taus_text);
            if (fractions_given) sweep.fractions = parse_list(fractions_text);
            return cmd_sweep_et(sweep);
        }
        if (*tr_cmd) {
            apply_a2(tr.hamiltonian, tr_a2);
            return cmd_transpile(tr);
        }
        if (*ham_cmd) {
            apply_a2(ham.params, ham_a2);
            return cmd_ham(ham);
        }
    } catch (const qitp::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kConfigError;
}
