#include "s7sim/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "s7sim/surface7.hpp"

namespace s7sim::circuits {

namespace {
constexpr double kPi = 3.14159265358979323846;

TimedInstruction rot(std::vector<std::string> sites, double t0, double theta, double phi,
                     int cycle = -1) {
    TimedInstruction ins;
    ins.kind = Kind::rotation;
    ins.sites = std::move(sites);
    ins.t_start_ns = t0;
    ins.duration_ns = kSingleQubitNs;
    ins.theta = theta;
    ins.phi = phi;
    ins.cycle_index = cycle;
    return ins;
}

TimedInstruction make_cz(const CzInfo& info, double t0, int cycle = -1) {
    TimedInstruction ins;
    ins.kind = Kind::cz;
    ins.sites = {info.ancilla, info.data};
    ins.t_start_ns = t0;
    ins.duration_ns = kTwoQubitNs;
    ins.fluxed_site = info.fluxed;
    ins.leak_swap_first = info.leak_swap_first;
    ins.cycle_index = cycle;
    return ins;
}

TimedInstruction make_park(const std::string& site, double t0, int cycle = -1) {
    TimedInstruction ins;
    ins.kind = Kind::park;
    ins.sites = {site};
    ins.t_start_ns = t0;
    ins.duration_ns = kTwoQubitNs;
    ins.cycle_index = cycle;
    return ins;
}

TimedInstruction make_measure(const std::string& site, double t0, int cycle = -1) {
    TimedInstruction ins;
    ins.kind = Kind::measure;
    ins.sites = {site};
    ins.t_start_ns = t0;
    ins.duration_ns = kReadoutNs;
    ins.condition_outcome = 0;
    ins.cycle_index = cycle;
    return ins;
}
}  // namespace

Scheme scheme_from_string(const std::string& name) {
    if (name == "pipelined") return Scheme::pipelined;
    if (name == "parallel") return Scheme::parallel;
    throw std::invalid_argument("unknown scheme: " + name);
}

std::string to_string(Scheme s) { return s == Scheme::pipelined ? "pipelined" : "parallel"; }

double TimedCircuit::total_duration_ns() const {
    double end = 0.0;
    for (const auto& ins : instructions) end = std::max(end, ins.t_end_ns());
    return end;
}

void TimedCircuit::append(TimedInstruction ins) { instructions.push_back(std::move(ins)); }

void TimedCircuit::validate() const {
    std::map<std::string, std::vector<std::pair<double, double>>> windows;
    for (const auto& ins : instructions)
        for (const auto& s : ins.sites) windows[s].emplace_back(ins.t_start_ns, ins.t_end_ns());
    for (auto& [site, w] : windows) {
        std::sort(w.begin(), w.end());
        for (std::size_t i = 1; i < w.size(); ++i)
            if (w[i].first < w[i - 1].second - 1e-9)
                throw std::logic_error("overlapping instructions on site " + site);
    }
}

std::string TimedCircuit::dump() const {
    std::vector<const TimedInstruction*> order;
    for (const auto& ins : instructions) order.push_back(&ins);
    std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
        if (a->t_start_ns != b->t_start_ns) return a->t_start_ns < b->t_start_ns;
        return a->sites < b->sites;
    });
    std::ostringstream out;
    for (const auto* ins : order) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%g %g", ins->t_start_ns, ins->duration_ns);
        out << buf;
        switch (ins->kind) {
            case Kind::rotation: out << " r"; break;
            case Kind::cz: out << " cz"; break;
            case Kind::park: out << " park"; break;
            case Kind::measure: out << " measure"; break;
            case Kind::idle: out << " idle"; break;
        }
        for (const auto& s : ins->sites) out << ' ' << s;
        if (ins->kind == Kind::rotation) {
            std::snprintf(buf, sizeof(buf), " theta=%.6f phi=%.6f", ins->theta, ins->phi);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

const std::vector<CzInfo>& cz_table() {
    static const std::vector<CzInfo> table = {
        // high-frequency data qubits are fluxed down to the ancilla; other
        // middle-frequency ancillas coupled to the same data qubit park
        {"A1", "D1", "D1", false, {"A2"}},
        {"A1", "D3", "A1", true, {}},  // |11>-|20> crossing: the ancilla leaks
        {"A3", "D2", "D2", false, {"A2"}},
        {"A3", "D4", "A3", false, {}},
        {"A2", "D1", "D1", false, {"A1"}},
        {"A2", "D2", "D2", false, {"A3"}},
        {"A2", "D3", "A2", false, {}},
        {"A2", "D4", "A2", false, {}},
    };
    return table;
}

const CzInfo& cz_info(const std::string& ancilla, const std::string& data) {
    for (const auto& info : cz_table())
        if (info.ancilla == ancilla && info.data == data) return info;
    throw std::invalid_argument("no CZ between " + ancilla + " and " + data);
}

TimedCircuit build_prep(const PrepAngles& angles) {
    if (angles.theta < 0.0 || angles.theta > kPi + 1e-12)
        throw std::invalid_argument("theta must be in [0, pi]");
    TimedCircuit c;
    c.site_labels = surface7::kAllLabels;
    c.append(rot({"D1"}, 0.0, angles.theta, 0.0));               // R_y^theta
    c.append(rot({"D3"}, 0.0, angles.theta, angles.phi));        // R_phi^theta
    return c;
}

TimedCircuit build_prep_plus_minus(bool minus) {
    TimedCircuit c;
    c.site_labels = surface7::kAllLabels;
    c.append(rot({"D1"}, 0.0, kPi / 2, 0.0));
    c.append(rot({"D2"}, 0.0, kPi / 2, 0.0));
    c.append(rot({"D3"}, 0.0, minus ? -kPi / 2 : kPi / 2, 0.0));
    c.append(rot({"D4"}, 0.0, minus ? -kPi / 2 : kPi / 2, 0.0));
    return c;
}

void append_cycle(TimedCircuit& circuit, Scheme scheme, int cycle_index, double t0,
                  double echo_axis_phi, bool a2_free_for_park) {
    const bool pipelined = scheme == Scheme::pipelined;

    // Z-type block: A1 measures Z1Z3, A3 measures Z2Z4, ascending data index.
    circuit.append(rot({"A1"}, t0, kPi / 2, 0.0, cycle_index));
    circuit.append(rot({"A3"}, t0, kPi / 2, 0.0, cycle_index));
    circuit.append(make_cz(cz_info("A1", "D1"), t0 + 20, cycle_index));
    circuit.append(make_cz(cz_info("A3", "D2"), t0 + 20, cycle_index));
    if (!pipelined || a2_free_for_park)
        circuit.append(make_park("A2", t0 + 20, cycle_index));
    circuit.append(make_cz(cz_info("A1", "D3"), t0 + 80, cycle_index));
    circuit.append(make_cz(cz_info("A3", "D4"), t0 + 80, cycle_index));
    circuit.append(rot({"A1"}, t0 + 140, -kPi / 2, 0.0, cycle_index));
    circuit.append(rot({"A3"}, t0 + 140, -kPi / 2, 0.0, cycle_index));
    if (pipelined) {
        circuit.append(make_measure("A1", t0 + 160, cycle_index));
        circuit.append(make_measure("A3", t0 + 160, cycle_index));
    }

    // X-type block on A2, CZ order D1, D3, D2, D4.
    circuit.append(rot({"A2"}, t0 + 160, kPi / 2, 0.0, cycle_index));
    for (const char* d : {"D1", "D2", "D3", "D4"})
        circuit.append(rot({d}, t0 + 160, -kPi / 2, 0.0, cycle_index));
    circuit.append(make_cz(cz_info("A2", "D1"), t0 + 180, cycle_index));
    if (!pipelined) circuit.append(make_park("A1", t0 + 180, cycle_index));
    circuit.append(make_cz(cz_info("A2", "D3"), t0 + 240, cycle_index));
    circuit.append(make_cz(cz_info("A2", "D2"), t0 + 300, cycle_index));
    if (!pipelined) circuit.append(make_park("A3", t0 + 300, cycle_index));
    circuit.append(make_cz(cz_info("A2", "D4"), t0 + 360, cycle_index));
    for (const char* d : {"D1", "D2", "D3", "D4"})
        circuit.append(rot({d}, t0 + 420, kPi / 2, 0.0, cycle_index));
    circuit.append(rot({"A2"}, t0 + 420, -kPi / 2, 0.0, cycle_index));

    if (pipelined) {
        // The ancilla chain sets the 840 ns period: readout starts after a
        // 20 ns buffer and ends exactly at the next cycle's A2 pulse.
        circuit.append(make_measure("A2", t0 + 460, cycle_index));
        circuit.append(rot({"D1", "D2", "D3", "D4"}, t0 + 640, kPi, echo_axis_phi, cycle_index));
    } else {
        circuit.append(make_measure("A1", t0 + 460, cycle_index));
        circuit.append(make_measure("A2", t0 + 460, cycle_index));
        circuit.append(make_measure("A3", t0 + 460, cycle_index));
        circuit.append(rot({"D1", "D2", "D3", "D4"}, t0 + 720, kPi, echo_axis_phi, cycle_index));
    }
}

TimedCircuit build_detection_circuit(const PrepAngles& angles, Scheme scheme, int cycles,
                                     double echo_axis_phi) {
    if (cycles < 0) throw std::invalid_argument("cycle count must be nonnegative");
    TimedCircuit c = build_prep(angles);
    c.cycle_period_ns = scheme == Scheme::pipelined ? kPipelinedPeriodNs : kParallelPeriodNs;
    c.num_cycles = cycles;
    for (int k = 0; k < cycles; ++k)
        append_cycle(c, scheme, k, kSingleQubitNs + k * c.cycle_period_ns, echo_axis_phi,
                     k == 0);
    c.validate();
    return c;
}

TimedCircuit build_cycle(Scheme scheme) {
    TimedCircuit c;
    c.site_labels = surface7::kAllLabels;
    c.cycle_period_ns = scheme == Scheme::pipelined ? kPipelinedPeriodNs : kParallelPeriodNs;
    c.num_cycles = 1;
    append_cycle(c, scheme, 0, 0.0);
    c.validate();
    return c;
}

Check check_from_string(const std::string& name) {
    if (name == "Z13") return Check::Z13;
    if (name == "Z1234") return Check::Z1234;
    if (name == "Z24") return Check::Z24;
    throw std::invalid_argument("unknown parity check: " + name);
}

const std::vector<std::string>& check_data_sites(Check c) {
    static const std::vector<std::string> z13 = {"D1", "D3"};
    static const std::vector<std::string> z1234 = {"D1", "D3", "D2", "D4"};  // CZ order
    static const std::vector<std::string> z24 = {"D2", "D4"};
    switch (c) {
        case Check::Z13: return z13;
        case Check::Z1234: return z1234;
        default: return z24;
    }
}

std::string check_ancilla(Check c) {
    switch (c) {
        case Check::Z13: return "A1";
        case Check::Z1234: return "A2";
        default: return "A3";
    }
}

TimedCircuit build_check_cz_block(Check check, double t0) {
    TimedCircuit c;
    c.site_labels = surface7::kAllLabels;
    const std::string anc = check_ancilla(check);
    double t = t0;
    for (const auto& d : check_data_sites(check)) {
        const auto& info = cz_info(anc, d);
        c.append(make_cz(info, t));
        for (const auto& p : info.parks) c.append(make_park(p, t));
        t += kTwoQubitNs;
    }
    return c;
}

TimedCircuit build_parity_check(Check check, const CheckBlockOptions& opt) {
    TimedCircuit c;
    c.site_labels = surface7::kAllLabels;
    const std::string anc = check_ancilla(check);
    double t = opt.t0;
    if (opt.ancilla_rotations) {
        c.append(rot({anc}, t, kPi / 2, 0.0));
        t += kSingleQubitNs;
    }
    TimedCircuit block = build_check_cz_block(check, t);
    for (auto& ins : block.instructions) c.append(std::move(ins));
    t += kTwoQubitNs * check_data_sites(check).size();
    if (opt.ancilla_rotations) {
        c.append(rot({anc}, t, -kPi / 2, 0.0));
        t += kSingleQubitNs;
    }
    if (opt.measure) c.append(make_measure(anc, t));
    c.validate();
    return c;
}

LogicalBasis basis_from_string(const std::string& name) {
    if (name == "Z" || name == "ZL") return LogicalBasis::Z;
    if (name == "X" || name == "XL") return LogicalBasis::X;
    if (name == "Y" || name == "YL") return LogicalBasis::Y;
    throw std::invalid_argument("unknown logical basis: " + name);
}

std::string to_string(LogicalBasis basis) {
    switch (basis) {
        case LogicalBasis::Z: return "Z";
        case LogicalBasis::X: return "X";
        default: return "Y";
    }
}

MeasurementAssembly build_logical_measurement(LogicalBasis basis) {
    MeasurementAssembly a;
    a.basis = basis;
    switch (basis) {
        case LogicalBasis::Z:
            a.site_basis = {'Z', 'Z', 'Z', 'Z'};
            a.value_sites = {0, 1};                      // Z1 Z2
            a.check_sets = {{0, 2}, {1, 3}};             // Z1Z3, Z2Z4
            break;
        case LogicalBasis::X:
            a.site_basis = {'X', 'X', 'X', 'X'};
            a.value_sites = {0, 2};                      // X1 X3
            a.check_sets = {{0, 1, 2, 3}};               // X1X2X3X4
            break;
        case LogicalBasis::Y:
            // Y_L = Y1 Z2 X3; D4 read in Z only to recover the Z2Z4 check.
            a.site_basis = {'Y', 'Z', 'X', 'Z'};
            a.value_sites = {0, 1, 2};
            a.check_sets = {{1, 3}};
            break;
    }
    return a;
}

TimedCircuit assembly_circuit(const MeasurementAssembly& assembly, double t0) {
    TimedCircuit c;
    c.site_labels = surface7::kAllLabels;
    for (int i = 0; i < 4; ++i) {
        const std::string site = surface7::kDataLabels[i];
        switch (assembly.site_basis[i]) {
            case 'Z':
                break;
            case 'X':
                c.append(rot({site}, t0, -kPi / 2, 0.0));  // R_y^{-pi/2}
                break;
            case 'Y':
                c.append(rot({site}, t0, kPi / 2, -kPi / 2));  // R_x^{pi/2}
                break;
            default:
                throw std::logic_error("bad assembly basis");
        }
    }
    for (int i = 0; i < 4; ++i) {
        auto m = make_measure(surface7::kDataLabels[i], t0 + kSingleQubitNs);
        m.condition_outcome = -1;  // recorded, not conditioned
        c.append(std::move(m));
    }
    return c;
}

LogicalGateSpec gate_from_string(const std::string& name) {
    if (name == "ZL") return {LogicalGate::Z, kPi};
    if (name == "XL") return {LogicalGate::X, kPi};
    if (name == "XL90") return {LogicalGate::Xhalf, kPi / 2};
    if (name == "TL") return {LogicalGate::Zrot, kPi / 4};
    if (name.rfind("ZL@", 0) == 0) return {LogicalGate::Zrot, std::stod(name.substr(3))};
    if (name.rfind("XL@", 0) == 0) return {LogicalGate::Xrot, std::stod(name.substr(3))};
    throw std::invalid_argument("unknown logical gate: " + name);
}

std::string gate_name(const LogicalGateSpec& spec) {
    char buf[48];
    switch (spec.gate) {
        case LogicalGate::Z: return "ZL";
        case LogicalGate::X: return "XL";
        case LogicalGate::Xhalf: return "XL90";
        case LogicalGate::Zrot:
            if (std::abs(spec.angle - kPi / 4) < 1e-12) return "TL";
            std::snprintf(buf, sizeof(buf), "ZL@%.6f", spec.angle);
            return buf;
        case LogicalGate::Xrot:
            std::snprintf(buf, sizeof(buf), "XL@%.6f", spec.angle);
            return buf;
    }
    return "?";
}

GateCircuit build_logical_gate(const LogicalGateSpec& spec, double t0) {
    GateCircuit g;
    g.circuit.site_labels = surface7::kAllLabels;
    const cplx i1(0.0, 1.0);
    switch (spec.gate) {
        case LogicalGate::Z:
            // transversal: Z on D1 and D2, compiled as R_x^pi then R_y^pi
            g.circuit.append(rot({"D1"}, t0, kPi, -kPi / 2));
            g.circuit.append(rot({"D2"}, t0, kPi, -kPi / 2));
            g.circuit.append(rot({"D1"}, t0 + 20, kPi, 0.0));
            g.circuit.append(rot({"D2"}, t0 + 20, kPi, 0.0));
            g.ideal_unitary = {1.0, 0.0, 0.0, -1.0};
            break;
        case LogicalGate::X:
            // transversal: X on D1 and D3
            g.circuit.append(rot({"D1"}, t0, kPi, kPi / 2));
            g.circuit.append(rot({"D3"}, t0, kPi, kPi / 2));
            g.ideal_unitary = {0.0, 1.0, 1.0, 0.0};
            break;
        case LogicalGate::Zrot: {
            // ancilla |A_theta>, CNOT with the logical qubit as control
            // (CZs to D1 and D2 inside an R_y sandwich on A2), post-select
            // the +1 outcome
            g.circuit.append(rot({"A2"}, t0, kPi / 2, spec.angle));
            g.circuit.append(rot({"A2"}, t0 + 20, -kPi / 2, 0.0));
            g.circuit.append(make_cz(cz_info("A2", "D1"), t0 + 40));
            g.circuit.append(make_cz(cz_info("A2", "D2"), t0 + 100));
            g.circuit.append(rot({"A2"}, t0 + 160, kPi / 2, 0.0));
            g.circuit.append(make_measure("A2", t0 + 180));
            g.post_selected = true;
            g.ideal_unitary = {1.0, 0.0, 0.0, std::exp(i1 * spec.angle)};
            break;
        }
        case LogicalGate::Xhalf:
        case LogicalGate::Xrot: {
            const double theta = spec.gate == LogicalGate::Xhalf ? kPi / 2 : spec.angle;
            // ancilla R_x^theta, CNOTs from A2 onto D1 and D3, X-basis
            // readout of A2, post-select the +1 outcome
            g.circuit.append(rot({"A2"}, t0, theta, -kPi / 2));
            g.circuit.append(rot({"D1"}, t0, -kPi / 2, 0.0));
            g.circuit.append(rot({"D3"}, t0, -kPi / 2, 0.0));
            g.circuit.append(make_cz(cz_info("A2", "D1"), t0 + 20));
            g.circuit.append(make_cz(cz_info("A2", "D3"), t0 + 80));
            g.circuit.append(rot({"D1"}, t0 + 140, kPi / 2, 0.0));
            g.circuit.append(rot({"D3"}, t0 + 140, kPi / 2, 0.0));
            g.circuit.append(rot({"A2"}, t0 + 140, -kPi / 2, 0.0));
            g.circuit.append(make_measure("A2", t0 + 160));
            g.post_selected = true;
            const cplx e = std::exp(i1 * theta);
            // diag(1, e^{i theta}) in the X_L eigenbasis
            g.ideal_unitary = {0.5 * (1.0 + e), 0.5 * (1.0 - e), 0.5 * (1.0 - e),
                               0.5 * (1.0 + e)};
            break;
        }
    }
    g.circuit.validate();
    return g;
}

}  // namespace s7sim::circuits
