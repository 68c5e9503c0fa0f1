#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cvep/lagdec.hpp"
#include "cvep/rng.hpp"
#include "cvep/synth.hpp"

using namespace cvep;

namespace {

constexpr int kL = 63;
constexpr int kShift = 8; // bits_per_shift * samples_per_bit

SynthConfig synth_config(double sigma = 0.0) {
    SynthConfig cfg;
    cfg.codebook = build_codebook(generate_msequence(6), kL, 2);
    cfg.samples_per_bit = 4;
    cfg.kernel = default_vep_kernel(240.0);
    cfg.noise_sigma = sigma;
    cfg.rng_seed = 42;
    return cfg;
}

// Independent oracle: direct double loop with explicit index arithmetic
// and the one-pass computational correlation formula.
std::vector<double> naive_lag_scores(const AveragedResponse& ref,
                                     const AveragedResponse& neu, int num_chars,
                                     int shift) {
    const int period = ref.period_samples();
    const int chans = ref.channels();
    const double n = static_cast<double>(period) * chans;
    std::vector<double> scores;
    for (int l = 0; l < num_chars; ++l) {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        for (int c = 0; c < chans; ++c) {
            for (int t = 0; t < period; ++t) {
                // advance by l*shift: element t takes the value l*shift later
                const double x = ref.data[(std::size_t)c][(std::size_t)t];
                const double y =
                    neu.data[(std::size_t)c][(std::size_t)((t + l * shift) % period)];
                sx += x; sy += y;
                sxx += x * x; syy += y * y; sxy += x * y;
            }
        }
        scores.push_back((n * sxy - sx * sy) /
                         std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy)));
    }
    return scores;
}

AveragedResponse noisy_response(const SynthConfig& base, int pos, int reps,
                                std::uint64_t seed) {
    return average_repetitions(synth_epoch(base, pos, reps, seed));
}

} // namespace

TEST_CASE("identical input gives lag zero with score one") {
    const SynthConfig cfg = synth_config();
    const AveragedResponse x = render_template(cfg, 9);
    const LagEstimate est = estimate_relative_lag(x, x, kL, kShift);
    REQUIRE(est.lag == 0);
    REQUIRE(est.best_score == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("shifting the probe by l*s returns l") {
    const SynthConfig cfg = synth_config();
    const AveragedResponse ref = render_template(cfg, 0);
    for (int l = 0; l < kL; ++l) {
        const AveragedResponse probe =
            circular_shift_samples(ref, static_cast<long long>(l) * kShift);
        const LagEstimate est = estimate_relative_lag(ref, probe, kL, kShift);
        REQUIRE(est.lag == l);
        REQUIRE(est.best_score == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("positions 4 and 11 give relative lag 7, matching the oracle") {
    const SynthConfig cfg = synth_config();
    const AveragedResponse ref = render_template(cfg, 4);
    const AveragedResponse neu = render_template(cfg, 11);
    const LagEstimate est = estimate_relative_lag(ref, neu, kL, kShift);
    REQUIRE(est.lag == 7);

    const auto oracle = naive_lag_scores(ref, neu, kL, kShift);
    REQUIRE(est.scores.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i)
        REQUIRE(est.scores[i] == Catch::Approx(oracle[i]).margin(1e-12));
}

TEST_CASE("noiseless round trip over a position grid") {
    const SynthConfig cfg = synth_config();
    std::vector<AveragedResponse> templates;
    for (int p = 0; p < kL; ++p) templates.push_back(render_template(cfg, p));

    for (int p1 : {0, 3, 17, 31, 45, 62}) {
        for (int p2 : {0, 1, 7, 15, 16, 24, 31, 40, 55, 62}) {
            const LagEstimate est = estimate_relative_lag(
                templates[(std::size_t)p1], templates[(std::size_t)p2], kL, kShift);
            REQUIRE(est.lag == ((p2 - p1) % kL + kL) % kL);
            REQUIRE(est.best_score == Catch::Approx(1.0).margin(1e-9));
        }
    }
}

TEST_CASE("lag argmax is invariant to per-input gain and offset") {
    const SynthConfig cfg = synth_config(18.0);
    Rng rng(0xAF1E);
    for (int trial = 0; trial < 30; ++trial) {
        const int p1 = static_cast<int>(rng.next_below(kL));
        const int p2 = static_cast<int>(rng.next_below(kL));
        const AveragedResponse ref = noisy_response(cfg, p1, 2, 500 + trial);
        const AveragedResponse neu = noisy_response(cfg, p2, 2, 900 + trial);

        AveragedResponse ref2 = ref, neu2 = neu;
        const double a = 0.25 + 5.0 * rng.next_unit();
        const double c = 0.25 + 5.0 * rng.next_unit();
        const double b = 20.0 * rng.next_gaussian();
        const double d = 20.0 * rng.next_gaussian();
        for (auto& chan : ref2.data)
            for (auto& v : chan) v = a * v + b;
        for (auto& chan : neu2.data)
            for (auto& v : chan) v = c * v + d;

        REQUIRE(estimate_relative_lag(ref2, neu2, kL, kShift).lag ==
                estimate_relative_lag(ref, neu, kL, kShift).lag);
    }
}

TEST_CASE("score vectors match the oracle on noisy inputs") {
    const SynthConfig cfg = synth_config(18.0);
    Rng rng(0xBEA7);
    for (int trial = 0; trial < 20; ++trial) {
        const int p1 = static_cast<int>(rng.next_below(kL));
        const int p2 = static_cast<int>(rng.next_below(kL));
        const AveragedResponse ref = noisy_response(cfg, p1, 2, 100 + trial);
        const AveragedResponse neu = noisy_response(cfg, p2, 2, 300 + trial);
        const LagEstimate est = estimate_relative_lag(ref, neu, kL, kShift);
        const auto oracle = naive_lag_scores(ref, neu, kL, kShift);
        for (std::size_t i = 0; i < oracle.size(); ++i)
            REQUIRE(est.scores[i] == Catch::Approx(oracle[i]).margin(1e-12));
    }
}

TEST_CASE("exact ties break to the smaller lag index") {
    // probe periodic in 2*shift samples: lags l and l+2 score identically
    const int L = 4, s = 2, period = 8;
    AveragedResponse ref, probe;
    ref.data = {{3.0, 1.0, -2.0, 0.5, 3.0, 1.0, -2.0, 0.5}};
    probe.data = {{3.0, 1.0, -2.0, 0.5, 3.0, 1.0, -2.0, 0.5}};
    REQUIRE(ref.period_samples() == period);

    const LagEstimate est = estimate_relative_lag(ref, probe, L, s);
    REQUIRE(est.scores[0] == est.scores[2]);
    REQUIRE(est.scores[1] == est.scores[3]);
    REQUIRE(est.best_score == est.scores[0]);
    REQUIRE(est.lag == 0);
}

TEST_CASE("calibration template") {
    const SynthConfig cfg = synth_config();

    SECTION("single response at position zero is the template itself") {
        const AveragedResponse r0 = render_template(cfg, 0);
        const AbsoluteTemplate tmpl = build_calibration_template({{r0, 0}}, kShift);
        REQUIRE(tmpl.data.data == r0.data);
        REQUIRE(tmpl.source_count == 1);
    }

    SECTION("noiseless responses align exactly") {
        std::vector<std::pair<AveragedResponse, int>> responses;
        for (int p : {2, 5, 9})
            responses.emplace_back(render_template(cfg, p), p);
        const AbsoluteTemplate tmpl = build_calibration_template(responses, kShift);
        const AveragedResponse expect = render_template(cfg, 0);
        for (int t = 0; t < 252; ++t)
            REQUIRE(tmpl.data.data[0][(std::size_t)t] ==
                    Catch::Approx(expect.data[0][(std::size_t)t]).margin(1e-12));
    }

    SECTION("noisy residual follows sigma over sqrt(3N)") {
        SynthConfig noisy = synth_config(2.0);
        const int reps = 4, draws = 200;
        const AveragedResponse clean = render_template(noisy, 0);
        double acc = 0.0;
        std::size_t count = 0;
        for (int d = 0; d < draws; ++d) {
            std::vector<std::pair<AveragedResponse, int>> responses;
            int salt = 0;
            for (int p : {2, 5, 9})
                responses.emplace_back(
                    noisy_response(noisy, p, reps,
                                   static_cast<std::uint64_t>(7000 + 16 * d + salt++)),
                    p);
            const AbsoluteTemplate tmpl =
                build_calibration_template(responses, kShift);
            for (int t = 0; t < 252; ++t) {
                const double r = tmpl.data.data[0][(std::size_t)t] -
                                 clean.data[0][(std::size_t)t];
                acc += r * r;
                ++count;
            }
        }
        const double measured = std::sqrt(acc / static_cast<double>(count));
        const double expected = 2.0 / std::sqrt(3.0 * reps);
        REQUIRE(measured == Catch::Approx(expected).epsilon(0.15));
    }

    SECTION("errors") {
        REQUIRE_THROWS_AS(build_calibration_template({}, kShift), EmptyInputError);
        AveragedResponse a = render_template(cfg, 0);
        AveragedResponse b;
        b.data = {std::vector<double>(100, 1.0)};
        REQUIRE_THROWS_AS(build_calibration_template({{a, 0}, {b, 1}}, kShift),
                          ShapeMismatchError);
    }
}

TEST_CASE("absolute decoding") {
    const SynthConfig cfg = synth_config();
    AbsoluteTemplate tmpl;
    tmpl.data = render_template(cfg, 0);
    tmpl.source_count = 1;

    SECTION("template against itself decodes position zero") {
        REQUIRE(decode_absolute(tmpl, tmpl.data, kL, kShift).lag == 0);
    }
    SECTION("noiseless response decodes its true position") {
        REQUIRE(decode_absolute(tmpl, render_template(cfg, 13), kL, kShift).lag == 13);
    }
    SECTION("accuracy grows with repetitions at fixed noise") {
        // sigma 18 puts single-repetition accuracy near 70%
        SynthConfig noisy = synth_config(18.0);
        std::vector<double> acc;
        for (int reps : {1, 2, 4, 8}) {
            int ok = 0;
            const int trials = 500;
            for (int t = 0; t < trials; ++t) {
                const int pos = t % kL;
                const AveragedResponse avg =
                    noisy_response(noisy, pos, reps,
                                   static_cast<std::uint64_t>(1000 + t));
                ok += (decode_absolute(tmpl, avg, kL, kShift).lag == pos);
            }
            acc.push_back(static_cast<double>(ok) / trials);
        }
        REQUIRE(acc[0] > 0.55);
        REQUIRE(acc[0] < 0.85);
        for (std::size_t i = 1; i < acc.size(); ++i)
            REQUIRE(acc[i] >= acc[i - 1]);
        REQUIRE(acc.back() > acc.front());
    }
}

TEST_CASE("promotion to absolute template") {
    const SynthConfig cfg = synth_config();

    SECTION("resolved position zero is the identity") {
        const AveragedResponse x = render_template(cfg, 0);
        REQUIRE(promote_to_absolute(x, 0, kL, kShift).data.data == x.data);
    }
    SECTION("promote(render(p), p) equals render(0) exactly") {
        for (int p : {1, 8, 19, 45, 62})
            REQUIRE(promote_to_absolute(render_template(cfg, p), p, kL, kShift)
                        .data.data == render_template(cfg, 0).data);
    }
    SECTION("promote then decode recovers fresh positions") {
        for (int p : {0, 5, 20, 62}) {
            const AbsoluteTemplate tmpl =
                promote_to_absolute(render_template(cfg, p), p, kL, kShift);
            for (int q : {0, 3, 11, 49})
                REQUIRE(decode_absolute(tmpl, render_template(cfg, q), kL, kShift)
                            .lag == q);
        }
    }
    SECTION("position range is checked") {
        const AveragedResponse x = render_template(cfg, 0);
        REQUIRE_THROWS_AS(promote_to_absolute(x, -1, kL, kShift),
                          PositionOutOfRangeError);
        REQUIRE_THROWS_AS(promote_to_absolute(x, kL, kL, kShift),
                          PositionOutOfRangeError);
    }
}

TEST_CASE("lag estimation error paths") {
    const SynthConfig cfg = synth_config();
    const AveragedResponse x = render_template(cfg, 0);

    AveragedResponse small;
    small.data = {std::vector<double>(100, 0.0)};
    REQUIRE_THROWS_AS(estimate_relative_lag(x, small, kL, kShift),
                      ShapeMismatchError);

    AveragedResponse flat;
    flat.data = {std::vector<double>(252, 1.0)};
    REQUIRE_THROWS_AS(estimate_relative_lag(x, flat, kL, kShift),
                      ZeroVarianceError);
}
