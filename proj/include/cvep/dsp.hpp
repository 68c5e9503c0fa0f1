// Signal-level primitives: band-pass preprocessing, repetition
// averaging, circular sample shifts and Pearson correlation.
//
// The band-pass is a Butterworth realized as cascaded second-order
// sections (bilinear transform with prewarped edges) and applied
// forward then backward. Processing is offline, so the zero-phase
// double pass is the right choice: lag estimation is phase sensitive.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "cvep/errors.hpp"

namespace cvep {

// Raw multi-repetition window, one code period per repetition.
struct Epoch {
    std::vector<std::vector<double>> data; // [channel][sample]
    double sampling_rate = 0.0;
    int period_samples = 0;
    int repetitions = 0;

    int channels() const { return static_cast<int>(data.size()); }
    int samples() const {
        return data.empty() ? 0 : static_cast<int>(data.front().size());
    }

    void validate() const {
        if (data.empty())
            throw ShapeMismatchError("epoch has no channels");
        const std::size_t expect =
            static_cast<std::size_t>(repetitions) *
            static_cast<std::size_t>(period_samples);
        for (const auto& ch : data) {
            if (ch.size() != expect)
                throw ShapeMismatchError(
                    "epoch channel has " + std::to_string(ch.size()) +
                    " samples, expected repetitions*period = " +
                    std::to_string(expect));
            for (double v : ch)
                if (!std::isfinite(v))
                    throw ShapeMismatchError("epoch contains non-finite value");
        }
    }
};

// Per-period average; houses the correlation reference and its shifted
// copies during lag search.
struct AveragedResponse {
    std::vector<std::vector<double>> data; // [channel][period_sample]

    int channels() const { return static_cast<int>(data.size()); }
    int period_samples() const {
        return data.empty() ? 0 : static_cast<int>(data.front().size());
    }
    bool same_shape(const AveragedResponse& other) const {
        return channels() == other.channels() &&
               period_samples() == other.period_samples();
    }
};

struct FilterSpec {
    double low_cut_hz = 1.0;
    double high_cut_hz = 15.0;
    int order = 4; // band-pass order; order/2 second-order sections
    double sampling_rate = 240.0;
};

struct Biquad {
    double b0, b1, b2; // numerator
    double a1, a2;     // denominator (a0 normalized to 1)
};

namespace detail {

inline void validate_filter_spec(const FilterSpec& spec) {
    if (!(spec.sampling_rate > 0.0))
        throw InvalidBandError("sampling rate must be positive");
    if (!(spec.low_cut_hz > 0.0 && spec.low_cut_hz < spec.high_cut_hz &&
          spec.high_cut_hz < spec.sampling_rate / 2.0))
        throw InvalidBandError(
            "need 0 < low < high < fs/2, got [" + std::to_string(spec.low_cut_hz) +
            ", " + std::to_string(spec.high_cut_hz) + "] at fs=" +
            std::to_string(spec.sampling_rate));
    if (spec.order < 2 || spec.order % 2 != 0)
        throw InvalidBandError("filter order must be even and >= 2");
}

} // namespace detail

// Butterworth band-pass as second-order sections. The analog prototype
// of order/2 is band-transformed and mapped with the bilinear transform;
// edges are prewarped so the digital cutoffs land exactly on the spec.
inline std::vector<Biquad> design_butterworth_bandpass(const FilterSpec& spec) {
    detail::validate_filter_spec(spec);
    using cplx = std::complex<double>;
    const double pi = 3.14159265358979323846;
    const double fs2 = 2.0 * spec.sampling_rate;
    const double w1 = fs2 * std::tan(pi * spec.low_cut_hz / spec.sampling_rate);
    const double w2 = fs2 * std::tan(pi * spec.high_cut_hz / spec.sampling_rate);
    const double w0sq = w1 * w2;
    const double bw = w2 - w1;
    const int m = spec.order / 2; // analog low-pass prototype order

    // band transform of one prototype pole: s^2 - bw*p*s + w0^2 = 0
    auto bp_pair = [&](cplx p) {
        const cplx b = bw * p;
        const cplx d = std::sqrt(b * b - 4.0 * w0sq);
        return std::pair<cplx, cplx>{(b + d) / 2.0, (b - d) / 2.0};
    };
    auto to_digital = [&](cplx s) { return (fs2 + s) / (fs2 - s); };

    std::vector<Biquad> sections;
    sections.reserve(static_cast<std::size_t>(m));
    cplx pole_prod = 1.0; // product of (2fs - s_k) over all analog poles

    auto push_conjugate_pair = [&](cplx s) {
        pole_prod *= (fs2 - s) * (fs2 - std::conj(s));
        const cplx z = to_digital(s);
        sections.push_back({1.0, 0.0, -1.0, -2.0 * z.real(), std::norm(z)});
    };
    auto push_real_pair = [&](double s_a, double s_b) {
        pole_prod *= (fs2 - s_a) * (fs2 - s_b);
        const double za = to_digital(s_a).real();
        const double zb = to_digital(s_b).real();
        sections.push_back({1.0, 0.0, -1.0, -(za + zb), za * zb});
    };

    for (int k = 0; k < m; ++k) {
        const double angle = pi * (2.0 * k + m + 1.0) / (2.0 * m);
        const cplx proto{std::cos(angle), std::sin(angle)};
        if (proto.imag() <= 1e-12)
            continue; // conjugates handled together; real pole below
        auto [sa, sb] = bp_pair(proto);
        push_conjugate_pair(sa);
        push_conjugate_pair(sb);
    }
    if (m % 2 == 1) {
        // real prototype pole at -1; its quadratic may give a conjugate
        // pair (narrow band) or two real poles (wide band)
        auto [sa, sb] = bp_pair(cplx{-1.0, 0.0});
        if (std::abs(sa.imag()) > 1e-9 * std::abs(sa.real()))
            push_conjugate_pair(sa);
        else
            push_real_pair(sa.real(), sb.real());
    }

    const cplx gain = std::pow(cplx{bw, 0.0}, m) * std::pow(cplx{fs2, 0.0}, m) /
                      pole_prod;
    sections.front().b0 *= gain.real();
    sections.front().b2 *= gain.real();
    return sections;
}

// |H(e^{j 2 pi f / fs})| of the cascade; implementation-side response,
// used for reporting. Tests check it against the closed-form Butterworth
// magnitude computed independently.
inline double sos_gain(const std::vector<Biquad>& sections, double freq_hz,
                       double sampling_rate) {
    const double pi = 3.14159265358979323846;
    const std::complex<double> z =
        std::exp(std::complex<double>{0.0, -2.0 * pi * freq_hz / sampling_rate});
    std::complex<double> h = 1.0;
    for (const auto& s : sections) {
        h *= (s.b0 + s.b1 * z + s.b2 * z * z) /
             (1.0 + s.a1 * z + s.a2 * z * z);
    }
    return std::abs(h);
}

namespace detail {

// Direct form II transposed, one section over one pass.
// States start at the fixed point for a constant input equal to the
// first sample, which suppresses the start-up step transient.
inline void run_sos_pass(const std::vector<Biquad>& sections,
                         std::vector<double>& x) {
    if (x.empty()) return;
    for (const auto& s : sections) {
        const double xbar = x.front();
        const double denom = 1.0 + s.a1 + s.a2;
        const double ybar = (s.b0 + s.b1 + s.b2) / denom * xbar;
        double z2 = s.b2 * xbar - s.a2 * ybar;
        double z1 = ybar - s.b0 * xbar;
        for (double& v : x) {
            const double in = v;
            const double out = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * out + z2;
            z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
}

inline void filtfilt_channel(const std::vector<Biquad>& sections,
                             std::vector<double>& x) {
    run_sos_pass(sections, x);
    std::reverse(x.begin(), x.end());
    run_sos_pass(sections, x);
    std::reverse(x.begin(), x.end());
}

} // namespace detail

// Zero-phase band-pass over every channel. The warm-up region is not
// trimmed; edge transients stay in the output and are accounted for by
// the callers' tolerances.
inline Epoch bandpass_filter(const Epoch& signal, const FilterSpec& spec) {
    detail::validate_filter_spec(spec);
    if (spec.sampling_rate != signal.sampling_rate)
        throw InvalidBandError("filter sampling rate " +
                               std::to_string(spec.sampling_rate) +
                               " does not match epoch rate " +
                               std::to_string(signal.sampling_rate));
    const int min_samples = 3 * spec.order; // settle length of the cascade
    if (signal.samples() < min_samples)
        throw SignalTooShortError("epoch has " + std::to_string(signal.samples()) +
                                  " samples, filter needs at least " +
                                  std::to_string(min_samples));

    const auto sections = design_butterworth_bandpass(spec);
    Epoch out = signal;
    for (auto& channel : out.data)
        detail::filtfilt_channel(sections, channel);
    return out;
}

// output[c][t] = mean over repetitions of epoch[c][r*period + t]
inline AveragedResponse average_repetitions(const Epoch& epoch) {
    epoch.validate();
    if (epoch.repetitions < 1)
        throw ShapeMismatchError("epoch needs at least one repetition");
    AveragedResponse out;
    out.data.resize(static_cast<std::size_t>(epoch.channels()));
    const int period = epoch.period_samples;
    for (int c = 0; c < epoch.channels(); ++c) {
        auto& dst = out.data[static_cast<std::size_t>(c)];
        dst.assign(static_cast<std::size_t>(period), 0.0);
        const auto& src = epoch.data[static_cast<std::size_t>(c)];
        for (int r = 0; r < epoch.repetitions; ++r)
            for (int t = 0; t < period; ++t)
                dst[static_cast<std::size_t>(t)] +=
                    src[static_cast<std::size_t>(r * period + t)];
        for (double& v : dst) v /= epoch.repetitions;
    }
    return out;
}

// Same shift convention as the code bits: positive k = delay, applied
// identically to every channel.
inline AveragedResponse circular_shift_samples(const AveragedResponse& resp,
                                               long long k) {
    AveragedResponse out;
    out.data.reserve(resp.data.size());
    const long long n = resp.period_samples();
    for (const auto& ch : resp.data) {
        if (n == 0) { out.data.emplace_back(); continue; }
        const long long r = ((k % n) + n) % n;
        std::vector<double> shifted(ch.size());
        for (long long i = 0; i < n; ++i)
            shifted[static_cast<std::size_t>(i)] =
                ch[static_cast<std::size_t>((i - r + n) % n)];
        out.data.push_back(std::move(shifted));
    }
    return out;
}

// Pearson coefficient over the channel-concatenated vectors. A constant
// input has no defined correlation and would let a dead channel win or
// lose the lag argmax arbitrarily, hence the error.
inline double pearson_correlation(const AveragedResponse& x,
                                  const AveragedResponse& y) {
    if (!x.same_shape(y))
        throw ShapeMismatchError("correlation inputs differ in shape");
    const std::size_t total = static_cast<std::size_t>(x.channels()) *
                              static_cast<std::size_t>(x.period_samples());
    if (total < 2)
        throw ShapeMismatchError("correlation needs at least 2 samples");

    double mean_x = 0.0, mean_y = 0.0;
    for (int c = 0; c < x.channels(); ++c) {
        const auto& xc = x.data[static_cast<std::size_t>(c)];
        const auto& yc = y.data[static_cast<std::size_t>(c)];
        for (std::size_t t = 0; t < xc.size(); ++t) {
            mean_x += xc[t];
            mean_y += yc[t];
        }
    }
    mean_x /= static_cast<double>(total);
    mean_y /= static_cast<double>(total);

    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int c = 0; c < x.channels(); ++c) {
        const auto& xc = x.data[static_cast<std::size_t>(c)];
        const auto& yc = y.data[static_cast<std::size_t>(c)];
        for (std::size_t t = 0; t < xc.size(); ++t) {
            const double dx = xc[t] - mean_x;
            const double dy = yc[t] - mean_y;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
    }
    if (sxx == 0.0 || syy == 0.0)
        throw ZeroVarianceError("correlation input has zero variance");
    return sxy / std::sqrt(sxx * syy);
}

} // namespace cvep
