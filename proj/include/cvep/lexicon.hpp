// Dictionary-side decoding: lag signatures of words and the candidate
// filtering that turns a stream of relative lags into word hypotheses.
//
// A word's signature is the sequence of modular position offsets of its
// letters 2..k against letter 1. Words sharing a signature (one being a
// constant modular offset of the other) are indistinguishable to the
// relative-lag decoder; that ambiguity is surfaced, never guessed away.

#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "cvep/errors.hpp"

namespace cvep {

using LagSignature = std::vector<int>;

struct KeyboardLayout {
    std::string characters; // position = index, pairwise distinct
    int shift_samples = 8;  // s: sample lag between adjacent positions

    int num_chars() const { return static_cast<int>(characters.size()); }

    bool contains(char c) const {
        return characters.find(c) != std::string::npos;
    }
    int position_of(char c) const {
        const auto idx = characters.find(c);
        if (idx == std::string::npos)
            throw UnknownCharacterError(std::string("character '") + c +
                                        "' is not on the keyboard");
        return static_cast<int>(idx);
    }
    // words may only use the letter subset of the keyboard
    bool is_word_char(char c) const {
        return c >= 'A' && c <= 'Z' && contains(c);
    }

    void validate() const {
        if (characters.empty())
            throw ConfigError("keyboard layout has no characters");
        if (shift_samples < 1)
            throw ConfigError("layout shift_samples must be >= 1");
        std::string sorted = characters;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ConfigError("keyboard layout repeats a character");
    }
};

// 63 keys (an 8x8 speller matrix minus one cell): the alphabet, digits
// and filler symbols. One key per available circular code lag.
inline KeyboardLayout default_layout(int shift_samples = 8) {
    KeyboardLayout layout;
    layout.characters =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789.,;:!?'\"()[]{}<>-_+=*/\\@#&%";
    layout.shift_samples = shift_samples;
    layout.validate();
    return layout;
}

class Dictionary {
public:
    explicit Dictionary(std::vector<std::string> word_list)
        : words_(std::move(word_list)) {
        for (const auto& w : words_) {
            if (w.empty())
                throw ConfigError("dictionary contains an empty word");
            for (char c : w)
                if (c < 'A' || c > 'Z')
                    throw ConfigError("dictionary word '" + w +
                                      "' is not uppercase A-Z");
        }
        std::sort(words_.begin(), words_.end());
        words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
        if (words_.empty())
            throw EmptyDictionaryError("dictionary has no words");
    }

    std::size_t size() const { return words_.size(); }
    const std::vector<std::string>& words() const { return words_; }

    bool contains(const std::string& w) const {
        return std::binary_search(words_.begin(), words_.end(), w);
    }

    // sorted range of words starting with `prefix`
    std::vector<std::string> with_prefix(std::string_view prefix) const {
        std::vector<std::string> out;
        auto it = std::lower_bound(words_.begin(), words_.end(), prefix,
                                   [](const std::string& w, std::string_view p) {
                                       return std::string_view(w) < p;
                                   });
        for (; it != words_.end() && it->compare(0, prefix.size(), prefix) == 0;
             ++it)
            out.push_back(*it);
        return out;
    }

    bool has_prefix(std::string_view prefix) const {
        auto it = std::lower_bound(words_.begin(), words_.end(), prefix,
                                   [](const std::string& w, std::string_view p) {
                                       return std::string_view(w) < p;
                                   });
        return it != words_.end() && it->compare(0, prefix.size(), prefix) == 0;
    }

    Dictionary restricted_to_length(std::size_t length) const {
        std::vector<std::string> kept;
        for (const auto& w : words_)
            if (w.size() == length) kept.push_back(w);
        return Dictionary(std::move(kept));
    }

private:
    std::vector<std::string> words_; // sorted, unique, uppercase
};

// l_i = (pos(word[i]) - pos(word[0])) mod L for i = 1..k-1
inline LagSignature signature_of_word(std::string_view word,
                                      const KeyboardLayout& layout) {
    if (word.empty())
        throw EmptyInputError("cannot compute the signature of an empty word");
    const int L = layout.num_chars();
    const int first = layout.position_of(word.front());
    LagSignature sig;
    sig.reserve(word.size() - 1);
    for (std::size_t i = 1; i < word.size(); ++i)
        sig.push_back(((layout.position_of(word[i]) - first) % L + L) % L);
    return sig;
}

// Words still consistent with the observed relative lags.
struct CandidateSet {
    int observed_length = 0; // k: letters observed so far
    LagSignature signature;  // lags of letters 2..k
    std::vector<std::string> words; // sorted; subset of the dictionary
};

// Exactly the dictionary words whose first (|signature|+1)-letter
// signature equals `signature`: the union over feasible first letters of
// the prefix-consistent words. A brute-force full scan is the oracle
// this must agree with.
inline CandidateSet filter_candidates(const Dictionary& dict,
                                      const KeyboardLayout& layout,
                                      const LagSignature& signature) {
    if (signature.empty())
        throw EmptyInputError("signature must contain at least one lag");
    const int L = layout.num_chars();

    CandidateSet out;
    out.observed_length = static_cast<int>(signature.size()) + 1;
    out.signature = signature;

    for (char first = 'A'; first <= 'Z'; ++first) {
        if (!layout.is_word_char(first)) continue;
        const int base = layout.position_of(first);
        std::string prefix(1, first);
        bool feasible = true;
        for (int lag : signature) {
            const int pos = (base + lag) % L;
            const char c = layout.characters[static_cast<std::size_t>(pos)];
            if (!layout.is_word_char(c)) { feasible = false; break; }
            prefix.push_back(c);
        }
        if (!feasible) continue;
        for (auto& w : dict.with_prefix(prefix))
            out.words.push_back(std::move(w));
    }
    std::sort(out.words.begin(), out.words.end());
    return out;
}

// One more observed lag; never adds words. Equivalent to re-running
// filter_candidates on the extended signature, since candidates already
// hold every word consistent with the shorter one.
inline CandidateSet refine(const KeyboardLayout& layout,
                           const CandidateSet& candidates, int next_lag) {
    const int L = layout.num_chars();
    if (next_lag < 0 || next_lag >= L)
        throw LagOutOfRangeError("lag " + std::to_string(next_lag) +
                                 " outside [0, " + std::to_string(L) + ")");

    CandidateSet out;
    out.observed_length = candidates.observed_length + 1;
    out.signature = candidates.signature;
    out.signature.push_back(next_lag);

    const std::size_t index = static_cast<std::size_t>(candidates.observed_length);
    for (const auto& w : candidates.words) {
        if (w.size() < index + 1) continue;
        const int base = layout.position_of(w.front());
        const int pos = layout.position_of(w[index]);
        if (((pos - base) % L + L) % L == next_lag)
            out.words.push_back(w);
    }
    return out;
}

struct ResolutionResult {
    enum class Kind { Unresolved, Unique, Empty };
    Kind kind = Kind::Unresolved;
    std::string word; // set when kind == Unique
};

inline ResolutionResult resolution(const CandidateSet& candidates) {
    ResolutionResult r;
    if (candidates.words.empty()) {
        r.kind = ResolutionResult::Kind::Empty;
    } else if (candidates.words.size() == 1) {
        r.kind = ResolutionResult::Kind::Unique;
        r.word = candidates.words.front();
    }
    return r;
}

// The k-letter word beginnings a live system would display as feedback.
inline std::vector<std::string> display_prefixes(const CandidateSet& candidates) {
    std::vector<std::string> prefixes;
    prefixes.reserve(candidates.words.size());
    for (const auto& w : candidates.words)
        prefixes.push_back(
            w.substr(0, static_cast<std::size_t>(candidates.observed_length)));
    std::sort(prefixes.begin(), prefixes.end());
    prefixes.erase(std::unique(prefixes.begin(), prefixes.end()),
                   prefixes.end());
    return prefixes;
}

} // namespace cvep
