// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------
//
// Per-receiver channel metrics built from traced paths: total received power
// (non-coherent sum), power delay profile, delay spread, and the coherent
// baseband sum r = k * sum_i a_i exp(-j theta_i) exp(j 2 pi f_c tau_i) + n
// with the symbol k fixed to 1.
//
// theta_i is the bounce-induced phase only; propagation phase enters through
// 2 pi f_c tau_i.

#pragma once

#include "hypersim/raytrace.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace hypersim
{

struct ReceivedPower
{
    double dbm = 0.0;
    bool disconnected = false;
};

/// Non-coherent total in dBmW over connected paths; floor when nothing
/// reaches it.
ReceivedPower total_power_dbm(std::span<const PropagationPath> paths, double floor_dbm = -250.0);

/// Power-sum of raw dBmW values.
ReceivedPower total_power_dbm(std::span<const double> powers_dbm, double floor_dbm = -250.0);

struct Tap
{
    double delay = 0.0; // s
    double power = 0.0; // mW

    bool operator==(const Tap &) const = default;
};

struct PowerDelayProfile
{
    std::vector<Tap> taps; // sorted by delay, powers > 0

    static PowerDelayProfile from_paths(std::span<const PropagationPath> paths);
    static PowerDelayProfile from_taps(std::vector<Tap> taps);
    bool empty() const { return taps.empty(); }
};

/// Power-weighted RMS delay spread in seconds.
double delay_spread(const PowerDelayProfile &pdp);

/// Last tap delay minus first tap delay, in seconds.
double max_excess_delay(const PowerDelayProfile &pdp);

struct ReceivedSignal
{
    std::complex<double> amplitude;
    double noise_power = 0.0; // mW
    std::size_t path_count = 0;
};

ReceivedSignal received_signal(std::span<const PropagationPath> paths, double carrier_frequency,
                               double noise_power = 0.0, std::uint64_t seed = 0);

/// CSV with columns delay_ns, power_dbm.
void write_pdp_csv(std::ostream &out, const PowerDelayProfile &pdp);

} // namespace hypersim
