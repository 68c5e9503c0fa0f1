// File ingestion and emission.
//
// Epoch files are line-oriented text, one block per epoch:
//   #cvep-epoch v1 fs=<Hz> period=<samples> reps=<count> channels=<count>
//   <reps*period comma-separated decimals>    (one line per channel)
// Values are written with 17 significant digits, so write -> load is an
// exact round trip for IEEE doubles.
//
// Dictionary files are one word per line; blank lines and lines starting
// with '#' are ignored, everything else is uppercased and must be A-Z.

#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cvep/dsp.hpp"
#include "cvep/errors.hpp"
#include "cvep/lexicon.hpp"

namespace cvep {

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(std::string_view token, int line_no) {
    double value = 0.0;
    const auto* begin = token.data();
    const auto* end = token.data() + token.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end)
        throw FormatError("line " + std::to_string(line_no) +
                          ": cannot parse value '" + std::string(token) + "'");
    if (!std::isfinite(value))
        throw FormatError("line " + std::to_string(line_no) +
                          ": non-finite value '" + std::string(token) + "'");
    return value;
}

inline long parse_count(std::string_view token, std::string_view name,
                        int line_no) {
    long value = 0;
    const auto* begin = token.data();
    const auto* end = token.data() + token.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end || value < 1)
        throw FormatError("line " + std::to_string(line_no) + ": bad " +
                          std::string(name) + " '" + std::string(token) + "'");
    return value;
}

inline std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    return s;
}

} // namespace detail

inline void write_epochs(const std::string& path,
                         const std::vector<Epoch>& epochs) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    for (const auto& e : epochs) {
        e.validate();
        out << "#cvep-epoch v1 fs=" << detail::format_double(e.sampling_rate)
            << " period=" << e.period_samples << " reps=" << e.repetitions
            << " channels=" << e.channels() << "\n";
        for (const auto& channel : e.data) {
            for (std::size_t i = 0; i < channel.size(); ++i) {
                if (i) out << ',';
                out << detail::format_double(channel[i]);
            }
            out << "\n";
        }
    }
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

inline std::vector<Epoch> load_epochs(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw FileNotFoundError("cannot open epoch file '" + path + "'");

    std::vector<Epoch> epochs;
    std::string line;
    int line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view header = detail::strip(line);
        if (header.empty()) continue;

        constexpr std::string_view magic = "#cvep-epoch v1 ";
        if (header.substr(0, magic.size()) != magic)
            throw FormatError("line " + std::to_string(line_no) +
                              ": expected '#cvep-epoch v1' header, got '" +
                              std::string(header.substr(0, 24)) + "...'");

        Epoch e;
        long channels = 0;
        std::istringstream fields{std::string(header.substr(magic.size()))};
        std::string field;
        bool saw_fs = false, saw_period = false, saw_reps = false,
             saw_channels = false;
        while (fields >> field) {
            const auto eq = field.find('=');
            if (eq == std::string::npos)
                throw FormatError("line " + std::to_string(line_no) +
                                  ": malformed header field '" + field + "'");
            const std::string key = field.substr(0, eq);
            const std::string value = field.substr(eq + 1);
            if (key == "fs") {
                e.sampling_rate = detail::parse_double(value, line_no);
                saw_fs = true;
            } else if (key == "period") {
                e.period_samples =
                    static_cast<int>(detail::parse_count(value, "period", line_no));
                saw_period = true;
            } else if (key == "reps") {
                e.repetitions =
                    static_cast<int>(detail::parse_count(value, "reps", line_no));
                saw_reps = true;
            } else if (key == "channels") {
                channels = detail::parse_count(value, "channels", line_no);
                saw_channels = true;
            } else {
                throw FormatError("line " + std::to_string(line_no) +
                                  ": unknown header field '" + key + "'");
            }
        }
        if (!saw_fs || !saw_period || !saw_reps || !saw_channels)
            throw FormatError("line " + std::to_string(line_no) +
                              ": header is missing fs/period/reps/channels");

        const std::size_t expect = static_cast<std::size_t>(e.period_samples) *
                                   static_cast<std::size_t>(e.repetitions);
        for (long c = 0; c < channels; ++c) {
            if (!std::getline(in, line))
                throw FormatError("line " + std::to_string(line_no) +
                                  ": file truncated, expected " +
                                  std::to_string(channels) + " channel lines");
            ++line_no;
            std::vector<double> samples;
            samples.reserve(expect);
            const std::string_view row = detail::strip(line);
            std::size_t start = 0;
            while (start <= row.size()) {
                const auto comma = row.find(',', start);
                const auto end = (comma == std::string_view::npos) ? row.size() : comma;
                samples.push_back(detail::parse_double(
                    detail::strip(row.substr(start, end - start)), line_no));
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
            if (samples.size() != expect)
                throw FormatError("line " + std::to_string(line_no) + ": got " +
                                  std::to_string(samples.size()) +
                                  " samples, header promises reps*period = " +
                                  std::to_string(expect));
            e.data.push_back(std::move(samples));
        }
        epochs.push_back(std::move(e));
    }
    return epochs;
}

struct DictionaryLoadResult {
    Dictionary dictionary;
    std::vector<std::string> rejected; // offending lines, for warnings
    std::size_t accepted_lines = 0;
};

inline DictionaryLoadResult load_dictionary(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw FileNotFoundError("cannot open dictionary '" + path + "'");

    std::vector<std::string> words;
    std::vector<std::string> rejected;
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view entry = detail::strip(line);
        if (entry.empty() || entry.front() == '#') continue;
        std::string word;
        bool ok = true;
        for (char c : entry) {
            const char up =
                static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            if (up < 'A' || up > 'Z') { ok = false; break; }
            word.push_back(up);
        }
        if (ok)
            words.push_back(std::move(word));
        else
            rejected.emplace_back(entry);
    }
    if (words.empty())
        throw EmptyDictionaryError("dictionary '" + path +
                                   "' has no valid words after normalization");
    DictionaryLoadResult result{Dictionary(std::move(words)),
                                std::move(rejected), 0};
    result.accepted_lines = result.dictionary.size();
    return result;
}

} // namespace cvep
