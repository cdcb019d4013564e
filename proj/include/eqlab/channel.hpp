#pragma once

#include <complex>
#include <vector>

#include "eqlab/constellation.hpp"
#include "eqlab/rng.hpp"

namespace eqlab::channel {

using cplx = std::complex<double>;

struct FiberParams {
    double attenuation_db_per_km = 0.21;
    double dispersion_ps_nm_km = 16.8;
    double gamma_per_w_km = 1.2;
    double center_wavelength_nm = 1550.0;
    // Manakov cross-polarization averaging factor applied to gamma.
    double manakov_factor = 8.0 / 9.0;

    void validate() const;
    double alpha_per_m() const;   // field power attenuation, 1/m
    double beta2_s2_per_m() const;
    double gamma_per_w_m() const { return gamma_per_w_km * 1e-3; }
    double carrier_freq_hz() const;
};

struct LinkConfig {
    double span_length_km = 50.0;
    int num_spans = 5;
    double step_km = 1.0;
    double edfa_noise_figure_db = 4.5;
    double launch_power_dbm = 0.0;

    void validate() const;
};

struct ShapingConfig {
    double rolloff = 0.1;
    int samples_per_symbol = 8;
    double symbol_rate_gbd = 34.4;
    int filter_span_symbols = 32;

    void validate() const;
    double symbol_rate_hz() const { return symbol_rate_gbd * 1e9; }
    double sample_rate_hz() const { return symbol_rate_hz() * samples_per_symbol; }
};

// Dual-polarization complex sample stream (sqrt(W) units).
struct OpticalField {
    std::vector<cplx> x, y;
    double sample_rate_hz = 0.0;
    double symbol_rate_hz = 0.0;

    std::size_t size() const { return x.size(); }
    double mean_power_w() const;  // both polarizations
};

// Odd-length, symmetric, unit-energy root-raised-cosine impulse response.
std::vector<double> rrc_taps(const ShapingConfig& cfg);

// Upsamples, RRC-filters (circularly, zero phase) and scales the dual-pol
// symbol stream so the total average power matches power_dbm.
OpticalField pulse_shape(const std::vector<cplx>& symbols_x, const std::vector<cplx>& symbols_y,
                         const ShapingConfig& cfg, double power_dbm);

// One fiber span via symmetrized split-step (half dispersion, nonlinearity
// with attenuation-aware effective length, half dispersion per step).
OpticalField ssfm_span(const OpticalField& field, const FiberParams& fiber, double span_km,
                       double step_km);

// Amplifier: applies gain_db and adds circular Gaussian ASE of
// per-polarization PSD (G-1)*F*h*nu/2 across the simulation bandwidth.
OpticalField edfa(const OpticalField& field, double gain_db, double noise_figure_db,
                  rng::Mt19937& gen, double carrier_wavelength_nm = 1550.0);

// Applies the accumulated linear dispersion of total_km of fiber (used to
// build the exact compensation inverse; negative length inverts).
OpticalField apply_dispersion(const OpticalField& field, const FiberParams& fiber, double total_km);

// Exact inverse of the accumulated all-linear dispersion operator.
OpticalField cdc(const OpticalField& field, const FiberParams& fiber, double total_km);

// Matched filter, symbol-rate decimation at the max-energy phase, and
// per-polarization complex least-squares normalization against the known
// transmit sequence.
struct RxSymbols {
    std::vector<cplx> x, y;
};
RxSymbols rx_frontend(const OpticalField& field, const ShapingConfig& cfg,
                      const std::vector<cplx>& tx_x, const std::vector<cplx>& tx_y);

// Full span-by-span link: pulse-shaped field through num_spans of fiber,
// each followed by a loss-compensating EDFA, then CDC.
OpticalField propagate_link(const OpticalField& tx_field, const FiberParams& fiber,
                            const LinkConfig& link, rng::Mt19937& noise_gen);

// Back-to-back AWGN channel calibrated by bisection on counted BER so the
// hard-decision Q-factor of the output equals target_q_db.
struct B2bResult {
    std::vector<cplx> x, y;
    double noise_sigma = 0.0;        // per complex dimension pair (E|n|^2 = sigma^2)
    double calibrated_q_db = 0.0;    // measured on the calibration block
};
B2bResult awgn_b2b(const std::vector<cplx>& tx_x, const std::vector<cplx>& tx_y, double target_q_db,
                   const data::QamConstellation& constellation, rng::Mt19937& gen);

}  // namespace eqlab::channel
