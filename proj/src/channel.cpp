// SPDX-License-Identifier: Apache-2.0
//
// hypersim - programmable indoor wireless environment simulator
// ------------------------------------------------------------------------

#include "hypersim/channel.hpp"

#include "hypersim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

namespace hypersim
{

ReceivedPower total_power_dbm(std::span<const double> powers_dbm, double floor_dbm)
{
    double mw = 0.0;
    for (double p : powers_dbm)
        mw += std::pow(10.0, p / 10.0);
    const double dbm = mw > 0.0 ? 10.0 * std::log10(mw) : floor_dbm;
    if (!(dbm > floor_dbm))
        return {floor_dbm, true};
    return {dbm, false};
}

ReceivedPower total_power_dbm(std::span<const PropagationPath> paths, double floor_dbm)
{
    std::vector<double> powers;
    powers.reserve(paths.size());
    for (const PropagationPath &p : paths)
        if (!p.disconnected)
            powers.push_back(p.rx_power_dbm);
    return total_power_dbm(std::span<const double>(powers), floor_dbm);
}

PowerDelayProfile PowerDelayProfile::from_taps(std::vector<Tap> taps)
{
    std::erase_if(taps, [](const Tap &t) { return !(t.power > 0.0); });
    std::stable_sort(taps.begin(), taps.end(), [](const Tap &a, const Tap &b) { return a.delay < b.delay; });
    return {std::move(taps)};
}

PowerDelayProfile PowerDelayProfile::from_paths(std::span<const PropagationPath> paths)
{
    std::vector<Tap> taps;
    for (const PropagationPath &p : paths)
        if (!p.disconnected)
            taps.push_back({p.delay, std::pow(10.0, p.rx_power_dbm / 10.0)});
    return from_taps(std::move(taps));
}

double delay_spread(const PowerDelayProfile &pdp)
{
    if (pdp.empty())
        throw UndefinedSpreadError("delay spread of an empty power delay profile");
    // Moments about the first tap keep the subtraction well conditioned.
    const double t0 = pdp.taps.front().delay;
    double p = 0.0, m1 = 0.0, m2 = 0.0;
    for (const Tap &t : pdp.taps)
    {
        const double d = t.delay - t0;
        p += t.power;
        m1 += t.power * d;
        m2 += t.power * d * d;
    }
    const double mean = m1 / p;
    return std::sqrt(std::max(0.0, m2 / p - mean * mean));
}

double max_excess_delay(const PowerDelayProfile &pdp)
{
    if (pdp.empty())
        throw UndefinedSpreadError("excess delay of an empty power delay profile");
    return pdp.taps.back().delay - pdp.taps.front().delay;
}

ReceivedSignal received_signal(std::span<const PropagationPath> paths, double carrier_frequency,
                               double noise_power, std::uint64_t seed)
{
    ReceivedSignal r;
    r.noise_power = noise_power;
    for (const PropagationPath &p : paths)
    {
        const double phase = -p.phase + 2.0 * kPi * std::fmod(carrier_frequency * p.delay, 1.0);
        r.amplitude += std::polar(p.attenuation, phase);
    }
    r.path_count = paths.size();
    if (noise_power > 0.0)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g(0.0, std::sqrt(noise_power / 2.0));
        const double re = g(rng);
        r.amplitude += std::complex<double>(re, g(rng));
    }
    return r;
}

void write_pdp_csv(std::ostream &out, const PowerDelayProfile &pdp)
{
    out << "delay_ns,power_dbm\n" << std::fixed;
    for (const Tap &t : pdp.taps)
        out << std::setprecision(6) << t.delay * 1e9 << ',' << std::setprecision(4) << 10.0 * std::log10(t.power)
            << '\n';
}

} // namespace hypersim
