#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "s7sim/density_matrix.hpp"

namespace s7sim::noise {

/// Amplitude damping over duration t: |1> decays at 1/t1, |2> decays to |1>
/// at twice that rate on a three-level site.
KrausChannel amplitude_damping(double t1, double duration, int dim, int site);
/// Phase damping: coherence (i,j) decays by exp(-(i-j)^2 t / t_phi).
KrausChannel phase_damping(double t_phi, double duration, int dim, int site);

/// Pure-dephasing rate at the sweetspot, 1/T_phi = 1/T2 - 1/(2 T1).
double pure_dephasing_rate(double t1, double t2);
/// Dephasing rate away from the sweetspot: fast flux noise adds
/// 2 pi sqrt(ln 2) sqrtA d_phi on top of the sweetspot rate.
double offsweetspot_dephasing_rate(double sqrt_a_phi0, double d_phi_hz_per_phi0,
                                   double t_phi_max);

/// Combined amplitude + phase damping for one idle window.
struct IdleChannel {
    KrausChannel amplitude;
    KrausChannel phase;
};
IdleChannel idle_channel(double t1, double t_phi, double duration, int dim, int site);

/// Per-transmon device parameters (times in seconds, frequencies in Hz).
struct TransmonParams {
    std::string label;
    double freq_ghz = 0.0;
    std::optional<double> anharmonicity_mhz;
    double readout_freq_ghz = 0.0;
    double t1 = 0.0;
    double t2_star = 0.0;
    double t2_echo = 0.0;
    double readout_fidelity = 1.0;  // average assignment fidelity
    double p_excited = 0.0;         // residual |1> population at prep
    // columns j = prepared state, rows i = declared outcome; column-stochastic
    std::vector<std::vector<double>> assignment;  // 3x3, filled from defaults if absent
    double d_phi_cz = 0.0;   // flux sensitivity at the CZ interaction point, Hz/Phi0
    double d_phi_park = 0.0; // flux sensitivity at the parking point, Hz/Phi0
};

struct DeviceParams {
    std::vector<TransmonParams> transmons;  // order D1..D4, A1..A3
    double sqrt_a_phi0 = 3e-6;              // flux-noise amplitude, Phi0 units
    std::vector<std::vector<double>> zz_coupling_hz;  // 7x7 residual-ZZ matrix
    // per-CZ dressing phases keyed by "Ax-Dy": {p01, p10, p11}
    std::map<std::string, std::array<double, 3>> cz_phase_table;

    const TransmonParams& by_label(const std::string& label) const;
    static DeviceParams from_json_file(const std::string& path);
    static DeviceParams from_json_text(const std::string& text);
    /// Idealized parameters: infinite coherence, perfect readout.
    static DeviceParams ideal();
};

/// Layered error model. Level k includes every channel of the levels below:
///   0 none, 1 relaxation/dephasing, 2 off-sweetspot dephasing during
///   CZ/parking, 3 SPAM, 4 residual-ZZ phase errors on CZs, 5 CZ leakage.
struct NoiseModel {
    int level = 0;
    double l1 = 0.0;  // leakage per CZ, level 5 only
    DeviceParams device;

    static NoiseModel make(int level, const DeviceParams& device, double l1 = 0.0);

    bool with_decoherence() const { return level >= 1; }
    bool with_flux_dephasing() const { return level >= 2; }
    bool with_spam() const { return level >= 3; }
    bool with_zz_phases() const { return level >= 4; }
    bool with_leakage() const { return level >= 5 && l1 > 0.0; }

    /// Site dimensions for the seven-transmon register under this model:
    /// three levels only where leakage can land.
    std::vector<int> register_dims() const;

    /// Initial-state mixer probability per site.
    double residual_excitation(int site) const;
    /// Readout POVM built from the assignment matrix; leaked states are
    /// declared per P(i|2) (default P(1|2)=1).
    Povm readout_povm(int site, int dim) const;

    /// Dephasing rate for a site busy with a CZ or parked.
    double dephasing_rate(int site, bool fluxed_cz, bool parked) const;
    double relaxation_time(int site) const;

    /// Dressing phases (p01, p10, p11) for a CZ between labeled sites.
    std::array<double, 3> cz_dressing(const std::string& ancilla, const std::string& data) const;
};

}  // namespace s7sim::noise
