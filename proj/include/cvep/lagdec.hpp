// Lag estimation between averaged responses.
//
// Zero-calibration mode scores every candidate lag l by correlating the
// reference average against the new average advanced by l*s samples and
// takes the argmax; with the sign convention below the winning index is
// directly the position difference (new minus reference, mod L).
// Calibrated mode runs the same search against a template whose absolute
// position is known, so the winning index is the absolute position.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cvep/dsp.hpp"
#include "cvep/errors.hpp"

namespace cvep {

struct LagEstimate {
    int lag = 0;               // argmax index, ties break to the smallest
    double best_score = 0.0;   // scores[lag]
    std::vector<double> scores;
};

// Averaged response re-based to character position 0.
struct AbsoluteTemplate {
    AveragedResponse data;
    int source_count = 0; // how many character recordings were folded in
};

// X_l = x_new advanced by l*s samples; scores[l] = corr(x_ref, X_l).
// For noiseless templates of positions p1 (ref) and p2 (new) the result
// is (p2 - p1) mod L.
inline LagEstimate estimate_relative_lag(const AveragedResponse& x_ref,
                                         const AveragedResponse& x_new,
                                         int num_chars, int shift_samples) {
    if (!x_ref.same_shape(x_new))
        throw ShapeMismatchError("lag estimation inputs differ in shape");
    if (num_chars < 1 || shift_samples < 1)
        throw ConfigError("lag search needs num_chars >= 1 and shift >= 1");

    LagEstimate est;
    est.scores.reserve(static_cast<std::size_t>(num_chars));
    for (int l = 0; l < num_chars; ++l) {
        const AveragedResponse shifted = circular_shift_samples(
            x_new, -static_cast<long long>(l) * shift_samples);
        const double score = pearson_correlation(x_ref, shifted);
        est.scores.push_back(score);
        if (l == 0 || score > est.best_score) {
            est.best_score = score;
            est.lag = l;
        }
    }
    return est;
}

// Aligns each known-position response to position 0 and averages them.
inline AbsoluteTemplate build_calibration_template(
    const std::vector<std::pair<AveragedResponse, int>>& responses,
    int shift_samples) {
    if (responses.empty())
        throw EmptyInputError("calibration needs at least one response");

    AbsoluteTemplate tmpl;
    tmpl.source_count = static_cast<int>(responses.size());

    bool first = true;
    for (const auto& [resp, position] : responses) {
        const AveragedResponse aligned = circular_shift_samples(
            resp, -static_cast<long long>(position) * shift_samples);
        if (first) {
            tmpl.data = aligned;
            first = false;
            continue;
        }
        if (!tmpl.data.same_shape(aligned))
            throw ShapeMismatchError("calibration responses differ in shape");
        for (int c = 0; c < aligned.channels(); ++c)
            for (int t = 0; t < aligned.period_samples(); ++t)
                tmpl.data.data[static_cast<std::size_t>(c)]
                              [static_cast<std::size_t>(t)] +=
                    aligned.data[static_cast<std::size_t>(c)]
                                [static_cast<std::size_t>(t)];
    }
    for (auto& ch : tmpl.data.data)
        for (double& v : ch)
            v /= tmpl.source_count;
    return tmpl;
}

// Same search as estimate_relative_lag; with a position-0 reference the
// returned lag is the absolute character position.
inline LagEstimate decode_absolute(const AbsoluteTemplate& tmpl,
                                   const AveragedResponse& x, int num_chars,
                                   int shift_samples) {
    return estimate_relative_lag(tmpl.data, x, num_chars, shift_samples);
}

// Re-bases the zero-calibration reference to absolute position 0 once
// the first letter's position is known from word resolution.
inline AbsoluteTemplate promote_to_absolute(const AveragedResponse& x_ref,
                                            int resolved_first_position,
                                            int num_chars, int shift_samples) {
    if (resolved_first_position < 0 || resolved_first_position >= num_chars)
        throw PositionOutOfRangeError(
            "resolved position " + std::to_string(resolved_first_position) +
            " outside [0, " + std::to_string(num_chars) + ")");
    AbsoluteTemplate tmpl;
    tmpl.data = circular_shift_samples(
        x_ref, -static_cast<long long>(resolved_first_position) * shift_samples);
    tmpl.source_count = 1;
    return tmpl;
}

} // namespace cvep
