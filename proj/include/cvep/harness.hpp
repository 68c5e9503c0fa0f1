// Experiment orchestration: full spelling trials in zero-calibration and
// calibrated mode, repetition sweeps, and report emission.
//
// Determinism contract: everything derives from master_seed via
// mix_seed. Per (repetition count N, trial index t):
//   cell_seed  = mix_seed(master_seed, N)
//   word_seed  = mix_seed(cell_seed, 2t),   word = Rng(word_seed) draw
//   trial_seed = mix_seed(cell_seed, 2t+1)
// and within a trial, letter i observes with mix_seed(trial_seed, i);
// calibrated mode reads its calibration characters with salts 0x100+i.
// Trials are independent and could run in parallel without changing any
// number in the report.

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvep/dsp.hpp"
#include "cvep/errors.hpp"
#include "cvep/io.hpp"
#include "cvep/lagdec.hpp"
#include "cvep/lexicon.hpp"
#include "cvep/rng.hpp"
#include "cvep/synth.hpp"

namespace cvep {

enum class DecodingMode { ZeroCalibration, Calibrated };

inline const char* to_string(DecodingMode mode) {
    return mode == DecodingMode::ZeroCalibration ? "zero_calibration"
                                                 : "calibrated";
}

struct ExperimentConfig {
    KeyboardLayout layout;
    SynthConfig synth;
    FilterSpec filter{1.0, 15.0, 4, 240.0};
    bool apply_filter = true;

    std::vector<int> repetitions_list{2, 4, 8, 12};
    int trials = 100;
    int word_length = 3;
    std::string dictionary_path = "data/words3.txt";
    DecodingMode mode = DecodingMode::ZeroCalibration;
    std::vector<int> calibration_chars{0, 10, 20};
    std::uint64_t master_seed = 0;
    // candidate filtering defaults to words of the experiment length;
    // switch off to allow any-length dictionary prefixes
    bool restrict_dict_to_word_length = true;

    int shift_samples() const {
        return synth.codebook.bits_per_shift * synth.samples_per_bit;
    }

    void validate() const {
        layout.validate();
        synth.validate();
        if (layout.num_chars() != synth.codebook.num_chars)
            throw ConfigError("layout has " + std::to_string(layout.num_chars()) +
                              " characters but codebook has " +
                              std::to_string(synth.codebook.num_chars));
        if (layout.shift_samples != shift_samples())
            throw ConfigError("layout shift_samples disagrees with codebook "
                              "bits_per_shift * samples_per_bit");
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if (word_length < 2) throw ConfigError("word_length must be >= 2");
        if (repetitions_list.empty())
            throw ConfigError("repetitions_list must not be empty");
        for (int n : repetitions_list)
            if (n < 1) throw ConfigError("repetitions must be >= 1");
        if (mode == DecodingMode::Calibrated && calibration_chars.empty())
            throw ConfigError("calibrated mode needs calibration characters");
        for (int c : calibration_chars)
            if (c < 0 || c >= synth.codebook.num_chars)
                throw ConfigError("calibration character " + std::to_string(c) +
                                  " outside the codebook");
        if (apply_filter && filter.sampling_rate != synth.sampling_rate())
            throw ConfigError("filter sampling rate disagrees with synth");
    }
};

// Paper-shaped defaults: order-6 code, 63-key layout, 240 Hz, 1-15 Hz
// zero-phase band-pass. noise_sigma 0 (see the CLI for the calibrated
// noisy default).
inline ExperimentConfig default_experiment_config() {
    ExperimentConfig cfg;
    cfg.synth.codebook = build_codebook(generate_msequence(6), 63, 2);
    cfg.synth.samples_per_bit = 4;
    cfg.synth.channels = 1;
    cfg.synth.kernel = default_vep_kernel(240.0);
    cfg.synth.noise_sigma = 0.0;
    cfg.layout = default_layout(cfg.shift_samples());
    return cfg;
}

enum class TrialOutcome { Resolved, Unresolved, Empty, SignalError };

inline const char* to_string(TrialOutcome outcome) {
    switch (outcome) {
        case TrialOutcome::Resolved: return "resolved";
        case TrialOutcome::Unresolved: return "unresolved";
        case TrialOutcome::Empty: return "empty";
        case TrialOutcome::SignalError: return "signal_error";
    }
    return "?";
}

struct TrialResult {
    std::string target_word;
    // zero-calibration: relative lags of letters 2..k w.r.t. letter 1;
    // calibrated: absolute positions of letters 1..k
    std::vector<int> true_signature;
    std::vector<int> estimated_signature;
    bool lags_all_correct = false;
    TrialOutcome outcome = TrialOutcome::Unresolved;
    std::string resolved_word; // set when outcome == Resolved
    bool word_correct = false;
    int letters_consumed = 0;
    std::vector<double> best_scores; // one per decoded letter event
    std::vector<std::vector<std::string>> feedback; // prefixes after each refine
};

namespace detail {

// synth -> band-pass -> per-period average, the per-letter pipeline
inline AveragedResponse observe_character(const ExperimentConfig& config,
                                          int position, int repetitions,
                                          std::uint64_t seed) {
    Epoch epoch = synth_epoch(config.synth, position, repetitions, seed);
    if (config.apply_filter)
        epoch = bandpass_filter(epoch, config.filter);
    return average_repetitions(epoch);
}

inline std::vector<int> word_positions(const std::string& word,
                                       const KeyboardLayout& layout) {
    std::vector<int> positions;
    positions.reserve(word.size());
    for (char c : word) positions.push_back(layout.position_of(c));
    return positions;
}

} // namespace detail

// One zero-calibration spelling trial. The first letter only pins the
// reference (nothing can be displayed for it); each further letter adds
// a relative lag, narrows the candidate words, and once a single word
// remains the reference is promoted to an absolute template for the
// rest of the word.
inline TrialResult run_trial_zero_calibration(const ExperimentConfig& config,
                                              const Dictionary& dict,
                                              const std::string& target_word,
                                              int repetitions,
                                              std::uint64_t trial_seed) {
    if (!dict.contains(target_word))
        throw WordNotInDictionaryError("target word '" + target_word +
                                       "' is not in the dictionary");
    const KeyboardLayout& layout = config.layout;
    const int L = layout.num_chars();
    const int s = config.shift_samples();
    const int k = static_cast<int>(target_word.size());
    const std::vector<int> positions =
        detail::word_positions(target_word, layout);

    TrialResult result;
    result.target_word = target_word;
    result.true_signature = signature_of_word(target_word, layout);

    try {
        const AveragedResponse x_ref = detail::observe_character(
            config, positions[0], repetitions, mix_seed(trial_seed, 0));
        result.letters_consumed = 1;

        CandidateSet candidates;
        bool resolved = false;
        AbsoluteTemplate absolute;

        for (int i = 1; i < k; ++i) {
            const AveragedResponse avg = detail::observe_character(
                config, positions[static_cast<std::size_t>(i)], repetitions,
                mix_seed(trial_seed, static_cast<std::uint64_t>(i)));
            result.letters_consumed = i + 1;

            if (!resolved) {
                const LagEstimate est = estimate_relative_lag(x_ref, avg, L, s);
                result.estimated_signature.push_back(est.lag);
                result.best_scores.push_back(est.best_score);

                candidates = (i == 1)
                                 ? filter_candidates(dict, layout, {est.lag})
                                 : refine(layout, candidates, est.lag);
                result.feedback.push_back(display_prefixes(candidates));

                const ResolutionResult res = resolution(candidates);
                if (res.kind == ResolutionResult::Kind::Empty) {
                    result.outcome = TrialOutcome::Empty;
                    break;
                }
                if (res.kind == ResolutionResult::Kind::Unique) {
                    result.outcome = TrialOutcome::Resolved;
                    result.resolved_word = res.word;
                    resolved = true;
                    absolute = promote_to_absolute(
                        x_ref, layout.position_of(res.word.front()), L, s);
                }
            } else {
                // word already known; decode the remaining letters against
                // the promoted absolute template
                const LagEstimate est = decode_absolute(absolute, avg, L, s);
                const int first = layout.position_of(result.resolved_word.front());
                result.estimated_signature.push_back(((est.lag - first) % L + L) % L);
                result.best_scores.push_back(est.best_score);
            }
        }
        if (result.outcome != TrialOutcome::Empty && !resolved)
            result.outcome = TrialOutcome::Unresolved;
    } catch (const ZeroVarianceError&) {
        result.outcome = TrialOutcome::SignalError;
    } catch (const ShapeMismatchError&) {
        result.outcome = TrialOutcome::SignalError;
    }

    result.lags_all_correct =
        (result.estimated_signature == result.true_signature);
    result.word_correct = (result.outcome == TrialOutcome::Resolved &&
                           result.resolved_word == target_word);
    return result;
}

// Calibrated baseline: an absolute template from known characters, then
// plain template decoding of every letter. No dictionary constraint.
inline TrialResult run_trial_calibrated(const ExperimentConfig& config,
                                        const Dictionary& dict,
                                        const std::string& target_word,
                                        int repetitions,
                                        std::uint64_t trial_seed) {
    if (!dict.contains(target_word))
        throw WordNotInDictionaryError("target word '" + target_word +
                                       "' is not in the dictionary");
    const KeyboardLayout& layout = config.layout;
    const int L = layout.num_chars();
    const int s = config.shift_samples();
    const std::vector<int> positions =
        detail::word_positions(target_word, layout);

    TrialResult result;
    result.target_word = target_word;
    result.true_signature = positions;

    try {
        std::vector<std::pair<AveragedResponse, int>> calibration;
        for (std::size_t i = 0; i < config.calibration_chars.size(); ++i) {
            const int c = config.calibration_chars[i];
            calibration.emplace_back(
                detail::observe_character(
                    config, c, repetitions,
                    mix_seed(trial_seed, 0x100 + static_cast<std::uint64_t>(i))),
                c);
        }
        const AbsoluteTemplate tmpl =
            build_calibration_template(calibration, s);

        std::string decoded;
        for (std::size_t i = 0; i < positions.size(); ++i) {
            const AveragedResponse avg = detail::observe_character(
                config, positions[i], repetitions,
                mix_seed(trial_seed, static_cast<std::uint64_t>(i)));
            result.letters_consumed = static_cast<int>(i) + 1;
            const LagEstimate est = decode_absolute(tmpl, avg, L, s);
            result.estimated_signature.push_back(est.lag);
            result.best_scores.push_back(est.best_score);
            decoded.push_back(
                layout.characters[static_cast<std::size_t>(est.lag)]);
        }
        result.outcome = TrialOutcome::Resolved;
        result.resolved_word = decoded;
    } catch (const ZeroVarianceError&) {
        result.outcome = TrialOutcome::SignalError;
    } catch (const ShapeMismatchError&) {
        result.outcome = TrialOutcome::SignalError;
    }

    result.lags_all_correct =
        (result.estimated_signature == result.true_signature);
    result.word_correct = (result.outcome == TrialOutcome::Resolved &&
                           result.resolved_word == target_word);
    return result;
}

struct ReportCell {
    std::string mode;
    int repetitions = 0;
    int trials = 0;
    double lag_accuracy = 0.0;
    double word_accuracy = 0.0;
    double mean_letters = 0.0;
    int words_correct = 0;
    int wrong_word = 0; // resolved to a different unique word
    int unresolved = 0;
    int empty = 0;
    int signal_errors = 0;
    std::vector<TrialResult> results; // kept so aggregation is auditable
};

struct Report {
    std::string mode;
    std::uint64_t master_seed = 0;
    int trials = 0;
    int word_length = 0;
    double noise_sigma = 0.0;
    std::string dictionary_path;
    std::size_t dictionary_words = 0;
    std::vector<int> repetitions_list;
    std::vector<ReportCell> cells;
};

inline Report run_experiment(const ExperimentConfig& config,
                             const Dictionary& dict) {
    config.validate();
    const Dictionary pool =
        dict.restricted_to_length(static_cast<std::size_t>(config.word_length));
    const Dictionary& filter_dict =
        config.restrict_dict_to_word_length ? pool : dict;

    Report report;
    report.mode = to_string(config.mode);
    report.master_seed = config.master_seed;
    report.trials = config.trials;
    report.word_length = config.word_length;
    report.noise_sigma = config.synth.noise_sigma;
    report.dictionary_path = config.dictionary_path;
    report.dictionary_words = dict.size();
    report.repetitions_list = config.repetitions_list;

    for (int reps : config.repetitions_list) {
        ReportCell cell;
        cell.mode = report.mode;
        cell.repetitions = reps;
        cell.trials = config.trials;

        const std::uint64_t cell_seed =
            mix_seed(config.master_seed, static_cast<std::uint64_t>(reps));
        long letters_total = 0;
        for (int t = 0; t < config.trials; ++t) {
            Rng word_rng(mix_seed(cell_seed, 2 * static_cast<std::uint64_t>(t)));
            const std::string& word =
                pool.words()[word_rng.next_below(pool.size())];
            const std::uint64_t trial_seed =
                mix_seed(cell_seed, 2 * static_cast<std::uint64_t>(t) + 1);

            TrialResult result =
                (config.mode == DecodingMode::ZeroCalibration)
                    ? run_trial_zero_calibration(config, filter_dict, word,
                                                 reps, trial_seed)
                    : run_trial_calibrated(config, filter_dict, word, reps,
                                           trial_seed);

            cell.words_correct += result.word_correct;
            cell.lag_accuracy += result.lags_all_correct;
            switch (result.outcome) {
                case TrialOutcome::Resolved:
                    cell.wrong_word += !result.word_correct;
                    break;
                case TrialOutcome::Unresolved: ++cell.unresolved; break;
                case TrialOutcome::Empty: ++cell.empty; break;
                case TrialOutcome::SignalError: ++cell.signal_errors; break;
            }
            letters_total += result.letters_consumed;
            cell.results.push_back(std::move(result));
        }
        cell.lag_accuracy /= config.trials;
        cell.word_accuracy =
            static_cast<double>(cell.words_correct) / config.trials;
        cell.mean_letters =
            static_cast<double>(letters_total) / config.trials;
        report.cells.push_back(std::move(cell));
    }
    return report;
}

inline Report run_experiment(const ExperimentConfig& config) {
    const DictionaryLoadResult loaded = load_dictionary(config.dictionary_path);
    return run_experiment(config, loaded.dictionary);
}

namespace detail {

// Both emitters round identically so CSV and JSON carry the same numbers.
inline double round6(double v) { return std::round(v * 1e6) / 1e6; }

inline std::string format6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", round6(v));
    return buf;
}

} // namespace detail

enum class ReportFormat { Csv, Json };

inline void write_report(const Report& report, const std::string& path,
                         ReportFormat format) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");

    if (format == ReportFormat::Csv) {
        out << "mode,N,trials,lag_accuracy,word_accuracy,mean_letters,seed\n";
        for (const auto& cell : report.cells)
            out << cell.mode << ',' << cell.repetitions << ',' << cell.trials
                << ',' << detail::format6(cell.lag_accuracy) << ','
                << detail::format6(cell.word_accuracy) << ','
                << detail::format6(cell.mean_letters) << ','
                << report.master_seed << "\n";
    } else {
        nlohmann::ordered_json j;
        j["mode"] = report.mode;
        j["seed"] = report.master_seed;
        j["trials"] = report.trials;
        j["word_length"] = report.word_length;
        j["noise_sigma"] = report.noise_sigma;
        j["dictionary_path"] = report.dictionary_path;
        j["dictionary_words"] = report.dictionary_words;
        j["repetitions_list"] = report.repetitions_list;
        j["cells"] = nlohmann::ordered_json::array();
        for (const auto& cell : report.cells) {
            nlohmann::ordered_json c;
            c["mode"] = cell.mode;
            c["N"] = cell.repetitions;
            c["trials"] = cell.trials;
            c["lag_accuracy"] = detail::round6(cell.lag_accuracy);
            c["word_accuracy"] = detail::round6(cell.word_accuracy);
            c["mean_letters"] = detail::round6(cell.mean_letters);
            c["words_correct"] = cell.words_correct;
            c["wrong_word"] = cell.wrong_word;
            c["unresolved"] = cell.unresolved;
            c["empty"] = cell.empty;
            c["signal_errors"] = cell.signal_errors;
            c["seed"] = report.master_seed;
            j["cells"].push_back(std::move(c));
        }
        out << j.dump(2) << "\n";
    }
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

} // namespace cvep
