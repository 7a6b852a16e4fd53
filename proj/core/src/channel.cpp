#include "fdmec/channel.hpp"

#include "fdmec/errors.hpp"

#include <cmath>

namespace fdmec {

double access_spectral_efficiency(double tx_power_w, LinkGain gain, double noise_power_w) {
    if (noise_power_w <= 0.0) throw ValidationError("access_spectral_efficiency: noise power must be positive");
    if (gain.value <= 0.0) throw ValidationError("access_spectral_efficiency: link gain must be positive");
    if (tx_power_w < 0.0) throw ValidationError("access_spectral_efficiency: negative transmit power");
    return std::log2(1.0 + tx_power_w * gain.value / noise_power_w);
}

double backhaul_spectral_efficiency(double power_fraction, double mbs_power_w, LinkGain mbs_gain,
                                    double si_gain, double access_power_w, double noise_power_w) {
    if (power_fraction < 0.0 || power_fraction > 1.0)
        throw ValidationError("backhaul_spectral_efficiency: power fraction outside [0, 1]");
    if (noise_power_w <= 0.0) throw ValidationError("backhaul_spectral_efficiency: noise power must be positive");
    if (mbs_gain.value <= 0.0) throw ValidationError("backhaul_spectral_efficiency: link gain must be positive");
    if (si_gain < 0.0) throw ValidationError("backhaul_spectral_efficiency: negative self-interference gain");
    const double interference = si_gain * access_power_w + noise_power_w;
    return std::log2(1.0 + power_fraction * mbs_power_w * mbs_gain.value / interference);
}

double path_loss_gain(double distance_m, const PathLossParams& params) {
    const double d = std::max(distance_m, params.min_distance_m);
    const double loss_db = params.fixed_db + params.slope_db * std::log10(d / 1000.0);
    return std::pow(10.0, -loss_db / 10.0);
}

double rayleigh_fading_gain(Rng& rng) {
    // power of a unit-variance complex Gaussian channel: Exp(1)
    double u = rng.uniform();
    if (u >= 1.0) u = std::nextafter(1.0, 0.0);
    return -std::log1p(-u);
}

double local_exec_time(const TaskSpec& task) {
    if (task.local_speed_cps <= 0.0) throw ValidationError("local_exec_time: local speed must be positive");
    return task.cpu_cycles / task.local_speed_cps;
}

OffloadTimes offload_times(const TaskSpec& task, double y, double ul_bandwidth_hz, double r,
                           double z, double mec_speed_cps) {
    if (y <= 0.0 || z <= 0.0)
        throw ValidationError("offload_times: zero bandwidth or compute share");
    if (ul_bandwidth_hz <= 0.0 || r <= 0.0 || mec_speed_cps <= 0.0)
        throw ValidationError("offload_times: non-positive rate parameter");
    OffloadTimes t;
    t.upload_s = task.input_bits / (y * ul_bandwidth_hz * r);
    t.execute_s = task.cpu_cycles / (z * mec_speed_cps);
    t.total_s = t.upload_s + t.execute_s;
    return t;
}

double thermal_noise_w(double bandwidth_hz) {
    if (bandwidth_hz <= 0.0) throw ValidationError("thermal_noise_w: bandwidth must be positive");
    return dbm_to_w(-174.0) * bandwidth_hz;
}

double dbm_to_w(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

} // namespace fdmec
