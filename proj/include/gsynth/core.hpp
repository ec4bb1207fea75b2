#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsynth {

using Token = std::string;
using Word = std::vector<Token>;
using StateId = std::uint64_t;

// state -> token -> successor; determinism is structural
using TransitionMap = std::map<StateId, std::map<Token, StateId>>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InapplicableRuleError : Error {
    using Error::Error;
};
struct BudgetExceededError : Error {
    using Error::Error;
};
struct DistributionUnproductiveError : Error {
    using Error::Error;
};
struct RestrictionError : Error {
    using Error::Error;
};

// Fresh state ids come from a process-wide monotonic counter so that
// separately built automata never share ids.
inline StateId fresh_state_id() {
    static std::atomic<StateId> next{1};
    return next.fetch_add(1, std::memory_order_relaxed);
}

inline Word word_from_chars(const std::string& chars) {
    Word w;
    w.reserve(chars.size());
    for (char c : chars) w.emplace_back(1, c);
    return w;
}

inline std::string chars_from_word(const Word& w) {
    std::string s;
    for (const auto& t : w) s += t;
    return s;
}

// shortlex: by length first, then lexicographic
inline bool shortlex_less(const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

struct ShortlexLess {
    bool operator()(const Word& a, const Word& b) const { return shortlex_less(a, b); }
};

}  // namespace gsynth
