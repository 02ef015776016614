#pragma once

// Command implementations behind the `qitp` executable. Each command takes a
// plain config struct, writes its outputs, and returns a process exit code:
//   0 success, 2 configuration error, 3 post-selection impossible,
//   4 transpile request outside the two-qubit scope.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qitp/dilation.hpp"
#include "qitp/errors.hpp"
#include "qitp/hamiltonians.hpp"
#include "qitp/numcore.hpp"
#include "qitp/simulator.hpp"
#include "qitp/transpiler.hpp"

#ifndef QITP_DATA_DIR
#define QITP_DATA_DIR "config"
#endif

namespace qitp::cli {

inline constexpr const char *kToolName = "qitp";
inline constexpr const char *kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kPostselectionFailed = 3, kOutOfScope = 4 };

using ojson = nlohmann::ordered_json;

inline std::string default_basis_path() { return std::string(QITP_DATA_DIR) + "/sto2g_hydrogen.json"; }

// ---------------------------------------------------------------------------
// Hamiltonian selection

struct HamiltonianSpec {
    /// "hydrogen", "two-neutron", a file path, or an inline JSON document.
    std::string source = "hydrogen";
    std::string basis_path;      // hydrogen; empty = shipped default
    std::string couplings_path;  // two-neutron
    std::optional<double> a1;
    std::optional<std::vector<double>> a2;  // 9 entries, row-major
};

struct ResolvedHamiltonian {
    HermitianOperator op;
    std::string builder;  // "hydrogen-sto2g", "two-neutron" or "file"
    nlohmann::json params;
    bool fock_labels = false;
};

inline SpinCouplings resolve_couplings(const HamiltonianSpec &spec) {
    SpinCouplings c;
    if (!spec.couplings_path.empty()) c = spin_couplings_from_json(read_json_file(spec.couplings_path));
    if (spec.a1) c.a1 = *spec.a1;
    if (spec.a2) {
        if (spec.a2->size() != 9) throw Error(ErrorKind::InvalidArgument, "--a2 needs 9 comma-separated values");
        for (std::size_t i = 0; i < 9; ++i) c.a2[i / 3][i % 3] = (*spec.a2)[i];
    }
    c.validate();
    return c;
}

inline ResolvedHamiltonian resolve_hamiltonian(const HamiltonianSpec &spec) {
    if (spec.source == "hydrogen" || spec.source == "hydrogen-sto2g") {
        const std::string path = spec.basis_path.empty() ? default_basis_path() : spec.basis_path;
        const GaussianBasis basis = gaussian_basis_from_json(read_json_file(path));
        return {hydrogen_sto2g(basis).h_orth, "hydrogen-sto2g", to_json(basis), false};
    }
    if (spec.source == "two-neutron") {
        const SpinCouplings c = resolve_couplings(spec);
        return {two_neutron_sd(c), "two-neutron", to_json(c), true};
    }
    return {load_hamiltonian(spec.source), "file", {{"source", spec.source}}, false};
}

// ---------------------------------------------------------------------------
// Small parsers shared by the commands

inline std::vector<double> parse_list(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        const std::string t = item.substr(b, e - b + 1);
        char *end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size() || !std::isfinite(v)) {
            throw Error(ErrorKind::InvalidArgument, "bad number '" + t + "' in list");
        }
        out.push_back(v);
    }
    return out;
}

/// "auto" (= exact E0), a number (absolute E_T), or "frac:x" (E_T = x·E0).
inline ItpParams parse_trial(const std::string &et, double tau) {
    if (et == "auto") return ItpParams::ground(tau);
    if (et.rfind("frac:", 0) == 0) {
        const auto v = parse_list(et.substr(5));
        if (v.size() != 1) throw Error(ErrorKind::InvalidArgument, "bad --et fraction '" + et + "'");
        return ItpParams::fraction(tau, v[0]);
    }
    const auto v = parse_list(et);
    if (v.size() != 1) throw Error(ErrorKind::InvalidArgument, "bad --et value '" + et + "'");
    return ItpParams::absolute(tau, v[0]);
}

/// "uniform", "basis:k", or "amps:..." with either real values "0.6,0.8" or a
/// JSON array of [re, im] pairs. Amplitudes are normalized.
inline PureState parse_initial_state(const std::string &spec, std::size_t dim) {
    if (spec == "uniform") return PureState::uniform(dim);
    if (spec.rfind("basis:", 0) == 0) {
        const auto v = parse_list(spec.substr(6));
        if (v.size() != 1 || v[0] < 0 || v[0] != std::floor(v[0])) {
            throw Error(ErrorKind::InvalidArgument, "bad basis index in '" + spec + "'");
        }
        return PureState::basis(dim, static_cast<std::size_t>(v[0]));
    }
    if (spec.rfind("amps:", 0) == 0) {
        const std::string body = spec.substr(5);
        CVector amps;
        if (!body.empty() && body.front() == '[') {
            try {
                for (const auto &e : nlohmann::json::parse(body)) amps.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
            } catch (const nlohmann::json::exception &ex) {
                throw Error(ErrorKind::InvalidArgument, std::string("bad amplitude list: ") + ex.what());
            }
        } else {
            for (double x : parse_list(body)) amps.emplace_back(x, 0.0);
        }
        if (amps.size() != dim) throw Error(ErrorKind::InvalidArgument, "amplitude count does not match dimension");
        return PureState::normalized(std::move(amps));
    }
    throw Error(ErrorKind::InvalidArgument, "unknown initial state '" + spec + "'");
}

/// "g,l,e".
inline NoiseParams parse_noise(const std::string &text) {
    const auto v = parse_list(text);
    if (v.size() != 3) throw Error(ErrorKind::InvalidArgument, "--noise expects g,l,e");
    NoiseParams n{v[0], v[1], v[2]};
    n.validate();
    return n;
}

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// Labels

/// Extended-space labels: bitstrings (reservoir bit first) when 2N is a power
/// of two, otherwise decimal Fock indices.
inline std::vector<std::string> extended_labels(std::size_t system_dim, bool fock) {
    const std::size_t total = 2 * system_dim;
    std::vector<std::string> out(total);
    const bool pow2 = (total & (total - 1)) == 0;
    const std::size_t width = embedding_qubits(total);
    for (std::size_t i = 0; i < total; ++i) {
        if (fock || !pow2) {
            out[i] = std::to_string(i);
        } else {
            std::string s(width, '0');
            for (std::size_t b = 0; b < width; ++b)
                if (i & (std::size_t{1} << (width - 1 - b))) s[b] = '1';
            out[i] = s;
        }
    }
    return out;
}

inline std::vector<std::string> system_labels(std::size_t system_dim, bool fock) {
    const bool pow2 = (system_dim & (system_dim - 1)) == 0;
    const std::size_t width = embedding_qubits(system_dim);
    std::vector<std::string> out(system_dim);
    for (std::size_t i = 0; i < system_dim; ++i) {
        if (fock || !pow2 || width == 0) {
            out[i] = std::to_string(i);
        } else {
            std::string s(width, '0');
            for (std::size_t b = 0; b < width; ++b)
                if (i & (std::size_t{1} << (width - 1 - b))) s[b] = '1';
            out[i] = s;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// run

struct RunConfig {
    HamiltonianSpec hamiltonian;
    double tau = 0.0;
    std::string et = "auto";
    std::string initial_state = "uniform";
    std::size_t repetitions = 1;
    std::uint64_t shots = 0;
    std::uint64_t seed = 42;
    std::string noise;  // empty = noiseless
    std::string out;    // empty = stdout
    std::string format = "json";
};

inline ojson config_echo(const RunConfig &c, const ResolvedHamiltonian &h) {
    ojson j;
    j["hamiltonian"] = {{"source", c.hamiltonian.source}, {"builder", h.builder}, {"params", h.params}};
    j["tau"] = c.tau;
    j["et"] = c.et;
    j["initial_state"] = c.initial_state;
    j["repetitions"] = c.repetitions;
    j["shots"] = c.shots;
    j["seed"] = c.seed;
    j["noise"] = c.noise.empty() ? ojson(nullptr) : ojson(c.noise);
    return j;
}

inline ojson record_to_json(const ExperimentRecord &rec, bool fock) {
    const auto ext = extended_labels(rec.system_dim, fock);
    const auto sys = system_labels(rec.system_dim, fock);
    ojson j;
    j["system_dim"] = rec.system_dim;
    j["trial_energy"] = rec.trial_energy;
    ojson probs = ojson::object(), norm = ojson::object(), counts = ojson::object();
    for (std::size_t i = 0; i < ext.size(); ++i) probs[ext[i]] = rec.extended_probs[i];
    for (std::size_t i = 0; i < sys.size(); ++i) norm[sys[i]] = rec.normalized_probs[i];
    for (std::size_t i = 0; i < ext.size(); ++i) counts[ext[i]] = rec.shot_counts[i];
    j["extended_probs"] = std::move(probs);
    j["p0"] = rec.postselect_prob;
    j["normalized_probs"] = std::move(norm);
    j["energy"] = rec.energy;
    j["ground_fidelity"] = rec.ground_fidelity;
    j["shots"] = rec.shots;
    j["shot_counts"] = std::move(counts);
    j["repetitions_completed"] = rec.repetitions_completed;
    return j;
}

inline std::string record_to_csv(const ExperimentRecord &rec, bool fock) {
    const auto ext = extended_labels(rec.system_dim, fock);
    std::ostringstream out;
    out << "label,alpha,beta,extended_prob,normalized_prob,shot_count\n";
    for (std::size_t i = 0; i < ext.size(); ++i) {
        const std::size_t a = i / rec.system_dim, b = i % rec.system_dim;
        out << ext[i] << ',' << a << ',' << b << ',' << format_double(rec.extended_probs[i]) << ','
            << (a == 0 ? format_double(rec.normalized_probs[b]) : std::string()) << ',' << rec.shot_counts[i] << '\n';
    }
    return out.str();
}

inline void write_output(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
    f << text;
}

/// Builds the experiment described by `c` and runs it.
inline std::pair<ExperimentRecord, ResolvedHamiltonian> execute_run(const RunConfig &c) {
    if (c.format != "json" && c.format != "csv") throw Error(ErrorKind::InvalidArgument, "--format must be json or csv");
    ResolvedHamiltonian h = resolve_hamiltonian(c.hamiltonian);
    const ItpParams p = parse_trial(c.et, c.tau);
    p.validate();
    const PureState psi0 = parse_initial_state(c.initial_state, h.op.dim());
    RunOptions opt;
    opt.repetitions = c.repetitions;
    opt.shots = c.shots;
    opt.seed = c.seed;
    if (!c.noise.empty()) opt.noise = parse_noise(c.noise);
    ExperimentRecord rec = run_itp(h.op, p, psi0, opt);
    return {std::move(rec), std::move(h)};
}

inline int cmd_run(const RunConfig &c, std::ostream &err = std::cerr) {
    try {
        auto [rec, h] = execute_run(c);
        if (c.format == "csv") {
            write_output(c.out, record_to_csv(rec, h.fock_labels));
        } else {
            ojson j;
            j["tool"] = kToolName;
            j["version"] = kToolVersion;
            j["config"] = config_echo(c, h);
            const ojson body = record_to_json(rec, h.fock_labels);
            for (const auto &[k, v] : body.items()) j[k] = v;
            write_output(c.out, j.dump(2) + "\n");
        }
        return kOk;
    } catch (const PostselectionImpossible &e) {
        err << "error: " << e.what()
            << "\npost-selection on the reservoir qubit failed: the trial energy is likely below the ground-state "
               "energy (E_T < E0), which drives the ancilla-0 probability to zero\n";
        return kPostselectionFailed;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

// ---------------------------------------------------------------------------
// sweep-et

inline const std::vector<double> &default_et_fractions() {
    static const std::vector<double> f = {0.5, 0.8, 0.9, 1.0, 1.1, 1.2, 1.5};
    return f;
}

struct SweepConfig {
    HamiltonianSpec hamiltonian;
    std::vector<double> taus = {5.0, 10.0, 20.0};
    std::vector<double> fractions = default_et_fractions();
    std::string initial_state = "uniform";
    std::size_t repetitions = 1;
    std::string out;
};

struct SweepRow {
    double tau = 0.0;
    double fraction = 0.0;
    double et = 0.0;
    double p0 = 0.0;
    double energy = 0.0;
    double fidelity = 0.0;
    bool failed = false;
};

inline std::vector<SweepRow> sweep_et(const HermitianOperator &h, const PureState &psi0, const std::vector<double> &taus,
                                      const std::vector<double> &fractions, std::size_t repetitions = 1) {
    for (double f : fractions)
        if (!(f > 0.0)) throw Error(ErrorKind::InvalidArgument, "trial-energy fractions must be positive");
    std::vector<SweepRow> rows;
    for (double tau : taus) {
        for (double f : fractions) {
            SweepRow row;
            row.tau = tau;
            row.fraction = f;
            const ItpParams p = ItpParams::fraction(tau, f);
            row.et = p.trial_energy(h);
            try {
                RunOptions opt;
                opt.repetitions = repetitions;
                const auto rec = run_itp(h, p, psi0, opt);
                row.p0 = rec.postselect_prob;
                row.energy = rec.energy;
                row.fidelity = rec.ground_fidelity;
            } catch (const PostselectionImpossible &e) {
                row.p0 = e.p0();
                row.failed = true;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

inline std::string sweep_to_csv(const std::vector<SweepRow> &rows) {
    std::ostringstream out;
    out << "tau,et_fraction,et_value,p0,energy,fidelity_to_ground,failed\n";
    for (const auto &r : rows) {
        out << format_double(r.tau) << ',' << format_double(r.fraction) << ',' << format_double(r.et) << ','
            << format_double(r.p0) << ',' << (r.failed ? std::string() : format_double(r.energy)) << ','
            << (r.failed ? std::string() : format_double(r.fidelity)) << ',' << (r.failed ? 1 : 0) << '\n';
    }
    return out.str();
}

inline int cmd_sweep_et(const SweepConfig &c, std::ostream &err = std::cerr) {
    try {
        const ResolvedHamiltonian h = resolve_hamiltonian(c.hamiltonian);
        const PureState psi0 = parse_initial_state(c.initial_state, h.op.dim());
        for (double t : c.taus)
            if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tau values must be >= 0");
        write_output(c.out, sweep_to_csv(sweep_et(h.op, psi0, c.taus, c.fractions, c.repetitions)));
        return kOk;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

// ---------------------------------------------------------------------------
// transpile

struct TranspileConfig {
    HamiltonianSpec hamiltonian;
    double tau = 0.0;
    std::string et = "auto";
    std::string out;     // circuit text
    std::string report;  // JSON report; empty = <out>.report.json (stdout when out is empty)
};

struct TranspileResult {
    Circuit circuit;
    double fidelity = 0.0;
    double max_abs_error = 0.0;
};

inline TranspileResult transpile_dilation(const HermitianOperator &h, const ItpParams &p) {
    const DilationUnitary u = build_dilation(h, p);
    TranspileResult r;
    r.circuit = kak_decompose(u.u());
    const ComplexMatrix v = circuit_unitary(r.circuit);
    r.fidelity = process_fidelity(v, u.u());
    r.max_abs_error = max_abs_diff(v, u.u());
    return r;
}

inline int cmd_transpile(const TranspileConfig &c, std::ostream &err = std::cerr) {
    try {
        const ResolvedHamiltonian h = resolve_hamiltonian(c.hamiltonian);
        if (h.op.dim() != 2) {
            err << "error: transpile supports only a 2-level system (a two-qubit extended space with the reservoir); "
                   "got system dimension "
                << h.op.dim() << "\n";
            return kOutOfScope;
        }
        const ItpParams p = parse_trial(c.et, c.tau);
        const TranspileResult r = transpile_dilation(h.op, p);
        ojson rep;
        rep["cz_count"] = r.circuit.count(GateKind::CZ);
        rep["rx_count"] = r.circuit.count(GateKind::RX);
        rep["rz_count"] = r.circuit.count(GateKind::RZ);
        rep["fidelity"] = r.fidelity;
        rep["max_abs_error"] = r.max_abs_error;
        rep["global_phase"] = r.circuit.global_phase;
        rep["tau"] = c.tau;
        rep["et"] = c.et;
        rep["tool"] = kToolName;
        rep["version"] = kToolVersion;
        write_output(c.out, emit_circuit_text(r.circuit));
        const std::string report_path = !c.report.empty() ? c.report : (c.out.empty() ? "" : c.out + ".report.json");
        write_output(report_path, rep.dump(2) + "\n");
        return kOk;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

// ---------------------------------------------------------------------------
// ham

struct HamConfig {
    std::string builder = "hydrogen-sto2g";
    HamiltonianSpec params;  // basis_path / couplings / a1 / a2
    std::string out;
};

inline int cmd_ham(const HamConfig &c, std::ostream &err = std::cerr) {
    try {
        if (c.builder != "hydrogen-sto2g" && c.builder != "two-neutron") {
            throw Error(ErrorKind::InvalidArgument, "unknown builder '" + c.builder + "'");
        }
        HamiltonianSpec spec = c.params;
        spec.source = c.builder;
        const ResolvedHamiltonian h = resolve_hamiltonian(spec);
        const nlohmann::json prov = {{"builder", h.builder}, {"params", h.params}, {"tool", kToolName},
                                     {"version", kToolVersion}};
        write_output(c.out, hamiltonian_to_json(h.op, prov).dump(2) + "\n");
        return kOk;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

}  // namespace qitp::cli
