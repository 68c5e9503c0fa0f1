// Synthetic c-VEP epochs with known ground truth.
//
// The evoked response is modeled as a fixed kernel circularly convolved
// with the character's +/-1 flash code; epochs tile that template over
// N repetitions and add white Gaussian noise. Everything is a pure
// function of (config, char_position, repetitions, trial_seed), so
// experiments replay bit-identically. Noise is drawn from
// Rng{rng_seed, trial_seed, char_position}, channel by channel.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cvep/code.hpp"
#include "cvep/dsp.hpp"
#include "cvep/errors.hpp"
#include "cvep/rng.hpp"

namespace cvep {

struct VepKernel {
    std::vector<double> impulse_response;
    double sampling_rate = 0.0;

    double duration_s() const {
        return sampling_rate > 0.0
                   ? static_cast<double>(impulse_response.size()) / sampling_rate
                   : 0.0;
    }
};

// Damped 7 Hz sinusoid, 80 ms decay, truncated at 0.25 s: a generic
// band-limited evoked-response shape inside the 1-15 Hz analysis band.
inline VepKernel default_vep_kernel(double sampling_rate) {
    VepKernel k;
    k.sampling_rate = sampling_rate;
    const int n = static_cast<int>(0.25 * sampling_rate);
    k.impulse_response.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = i / sampling_rate;
        k.impulse_response.push_back(std::exp(-t / 0.08) *
                                     std::sin(2.0 * 3.14159265358979323846 * 7.0 * t));
    }
    return k;
}

struct SynthConfig {
    Codebook codebook;
    int samples_per_bit = 4;
    int channels = 1;
    VepKernel kernel;
    double noise_sigma = 0.0;
    std::uint64_t rng_seed = 0;

    int period_samples() const {
        return codebook.base.length() * samples_per_bit;
    }
    double sampling_rate() const { return kernel.sampling_rate; }

    void validate() const {
        if (samples_per_bit < 1)
            throw ConfigError("samples_per_bit must be >= 1");
        if (channels < 1)
            throw ConfigError("channels must be >= 1");
        if (noise_sigma < 0.0)
            throw ConfigError("noise_sigma must be >= 0");
        if (codebook.codes.empty())
            throw ConfigError("codebook is empty");
        if (kernel.impulse_response.empty())
            throw ConfigError("kernel is empty");
        if (static_cast<int>(kernel.impulse_response.size()) > period_samples())
            throw ConfigError("kernel longer than one code period");
        double energy = 0.0;
        for (double v : kernel.impulse_response) {
            if (!std::isfinite(v))
                throw ConfigError("kernel contains non-finite value");
            energy += v * v;
        }
        if (energy == 0.0)
            throw ConfigError("kernel has zero energy");
    }
};

namespace detail {

// +/-1 code of one character, sample-and-hold upsampled.
inline std::vector<double> upsampled_code(const SynthConfig& config,
                                          int char_position) {
    const BitSeq& code =
        config.codebook.codes[static_cast<std::size_t>(char_position)];
    std::vector<double> out;
    out.reserve(code.size() * static_cast<std::size_t>(config.samples_per_bit));
    for (auto bit : code) {
        const double v = bit ? 1.0 : -1.0;
        for (int i = 0; i < config.samples_per_bit; ++i)
            out.push_back(v);
    }
    return out;
}

inline void check_position(const SynthConfig& config, int char_position) {
    if (char_position < 0 || char_position >= config.codebook.num_chars)
        throw PositionOutOfRangeError(
            "character position " + std::to_string(char_position) +
            " outside [0, " + std::to_string(config.codebook.num_chars) + ")");
}

} // namespace detail

// Noiseless one-period evoked template of one character: upsampled code
// circularly convolved with the kernel, identical on every channel.
inline AveragedResponse render_template(const SynthConfig& config,
                                        int char_position) {
    config.validate();
    detail::check_position(config, char_position);

    const std::vector<double> code = detail::upsampled_code(config, char_position);
    const auto& h = config.kernel.impulse_response;
    const int period = static_cast<int>(code.size());

    std::vector<double> channel(static_cast<std::size_t>(period), 0.0);
    for (int t = 0; t < period; ++t) {
        double acc = 0.0;
        for (int tau = 0; tau < static_cast<int>(h.size()); ++tau)
            acc += h[static_cast<std::size_t>(tau)] *
                   code[static_cast<std::size_t>((t - tau + period) % period)];
        channel[static_cast<std::size_t>(t)] = acc;
    }

    AveragedResponse out;
    out.data.assign(static_cast<std::size_t>(config.channels), channel);
    return out;
}

// Template tiled over `repetitions` periods plus i.i.d. Gaussian noise.
inline Epoch synth_epoch(const SynthConfig& config, int char_position,
                         int repetitions, std::uint64_t trial_seed) {
    config.validate();
    detail::check_position(config, char_position);
    if (repetitions < 1)
        throw ConfigError("repetitions must be >= 1");

    const AveragedResponse tmpl = render_template(config, char_position);
    const int period = config.period_samples();
    const std::size_t total = static_cast<std::size_t>(period) *
                              static_cast<std::size_t>(repetitions);

    Epoch epoch;
    epoch.sampling_rate = config.sampling_rate();
    epoch.period_samples = period;
    epoch.repetitions = repetitions;
    epoch.data.resize(static_cast<std::size_t>(config.channels));

    Rng rng({config.rng_seed, trial_seed,
             static_cast<std::uint64_t>(char_position)});
    for (int c = 0; c < config.channels; ++c) {
        auto& dst = epoch.data[static_cast<std::size_t>(c)];
        dst.resize(total);
        const auto& src = tmpl.data[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < total; ++i) {
            double v = src[i % static_cast<std::size_t>(period)];
            if (config.noise_sigma > 0.0)
                v += config.noise_sigma * rng.next_gaussian();
            dst[i] = v;
        }
    }
    return epoch;
}

} // namespace cvep
