#pragma once

#include "fdmec/rng.hpp"

namespace fdmec {

// Linear (not dB) power gain of a radio link.
struct LinkGain {
    double value = 0.0;
};

// Distance-based path loss L(d) = fixed_db + slope_db * log10(d / 1 km), in dB.
struct PathLossParams {
    double fixed_db = 128.1;
    double slope_db = 37.6;
    double min_distance_m = 1.0;
    bool rayleigh_fading = false;
    bool operator==(const PathLossParams&) const = default;
};

struct RadioParams {
    double sbs_tx_power_w = 0.1;     // small-cell downlink transmit power
    double mbs_total_power_w = 39.8107170553497; // macro-cell power budget shared by wireless backhaul
    double ue_tx_power_w = 0.2;      // handset uplink transmit power
    double noise_power_w = 7.96214341106994e-14; // thermal noise over the allocated band
    double residual_si_gain = 1e-12; // leakage of a cell's own transmission into its receiver
    double dl_bandwidth_hz = 20e6;
    double ul_bandwidth_hz = 20e6;
    bool operator==(const RadioParams&) const = default;
};

// One computation task: ship input_bits uplink, spend cpu_cycles, all before deadline_s.
struct TaskSpec {
    double input_bits = 1e6;
    double cpu_cycles = 1e9;
    double local_speed_cps = 1e9;  // cycles per second if executed on the handset
    double local_power_w = 0.5;
    double deadline_s = 0.9;
    double uplink_deadline_s = 0.3; // budget for the upload stage alone
    bool operator==(const TaskSpec&) const = default;
};

struct OffloadTimes {
    double upload_s = 0.0;
    double execute_s = 0.0;
    double total_s = 0.0;
};

// Spectral efficiency log2(1 + p h / sigma^2) of a direct link, bits/s/Hz.
double access_spectral_efficiency(double tx_power_w, LinkGain gain, double noise_power_w);

// Spectral efficiency of the wireless backhaul while the cell simultaneously
// transmits on the same band; the cell's own signal leaks back with gain
// si_gain and adds to the noise floor.
double backhaul_spectral_efficiency(double power_fraction, double mbs_power_w, LinkGain mbs_gain,
                                    double si_gain, double access_power_w, double noise_power_w);

// Linear gain from the path-loss model, distance clamped to min_distance_m.
double path_loss_gain(double distance_m, const PathLossParams& params);

// Unit-mean Rayleigh block-fading power multiplier.
double rayleigh_fading_gain(Rng& rng);

// Seconds to run the task on the handset.
double local_exec_time(const TaskSpec& task);

// Upload and remote-execution stages given a bandwidth share y of ul_bandwidth_hz
// with spectral efficiency r, and a compute share z of mec_speed_cps.
OffloadTimes offload_times(const TaskSpec& task, double y, double ul_bandwidth_hz, double r,
                           double z, double mec_speed_cps);

// Thermal noise power in watts for a -174 dBm/Hz floor over bandwidth_hz.
double thermal_noise_w(double bandwidth_hz);

double dbm_to_w(double dbm);

} // namespace fdmec
