#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fiberwalk {

// Two waveguide species. A is the stronger-contrast guide, B the weaker; a
// periodic ring uses B only.
enum class Species : unsigned char { A = 0, B = 1 };

inline char species_char(Species s) { return s == Species::A ? 'A' : 'B'; }

inline Species species_from_char(char c) {
    if (c == 'A') return Species::A;
    if (c == 'B') return Species::B;
    throw std::domain_error(std::string("unknown species '") + c + "'");
}

// Ordered list of species tags, optionally remembering the Fibonacci order it
// was built from.
struct SequenceWord {
    std::vector<Species> letters;
    std::optional<int> order;

    std::size_t size() const { return letters.size(); }

    std::string str() const {
        std::string s;
        s.reserve(letters.size());
        for (Species l : letters) s.push_back(species_char(l));
        return s;
    }

    bool is_palindrome() const {
        return std::equal(letters.begin(), letters.end(), letters.rbegin());
    }
};

enum class ChainMode { Literal, Palindromic };

// Fibonacci element of order j: the recurrence over words with the two seeds
// being the single letters A and B. Lengths follow the Fibonacci numbers
// 1, 1, 2, 3, 5, 8, ...
inline SequenceWord fibonacci_element(int order) {
    if (order < 1) throw std::domain_error("fibonacci_element: order must be >= 1");
    std::vector<Species> prev{Species::A};  // order 1
    std::vector<Species> cur{Species::B};   // order 2
    if (order == 1) return {prev, 1};
    for (int j = 3; j <= order; ++j) {
        std::vector<Species> next;
        next.reserve(prev.size() + cur.size());
        next.insert(next.end(), prev.begin(), prev.end());
        next.insert(next.end(), cur.begin(), cur.end());
        prev = std::move(cur);
        cur = std::move(next);
    }
    return {cur, order};
}

// Fibonacci chain of order j: two arms built from all elements of order 2..j
// around a central A.
//
// Literal mode concatenates the element blocks in descending order, the
// single-letter center, then the same blocks ascending. The result is block-
// symmetric but generally not a letter-level palindrome.
//
// Palindromic mode takes the ascending concatenation T = E2 E3 ... Ej as one
// arm and mirrors it letter by letter: reverse(T) + A + T. Both modes have
// the same length and the same letter multiset; the center letter is A.
inline SequenceWord fibonacci_chain(int order, ChainMode mode) {
    if (order < 2) throw std::domain_error("fibonacci_chain: order must be >= 2");
    std::vector<Species> arm;  // T = E2 E3 ... Ej
    for (int j = 2; j <= order; ++j) {
        SequenceWord e = fibonacci_element(j);
        arm.insert(arm.end(), e.letters.begin(), e.letters.end());
    }
    std::vector<Species> out;
    out.reserve(2 * arm.size() + 1);
    if (mode == ChainMode::Palindromic) {
        out.insert(out.end(), arm.rbegin(), arm.rend());
        out.push_back(Species::A);
        out.insert(out.end(), arm.begin(), arm.end());
    } else {
        // Descending blocks: Ej E(j-1) ... E2.
        for (int j = order; j >= 2; --j) {
            SequenceWord e = fibonacci_element(j);
            out.insert(out.end(), e.letters.begin(), e.letters.end());
        }
        out.push_back(Species::A);
        out.insert(out.end(), arm.begin(), arm.end());
    }
    return {std::move(out), order};
}

// n identical single-mode cores of species B. n must be odd so that a center
// core exists.
inline SequenceWord periodic_word(int n) {
    if (n < 1) throw std::domain_error("periodic_word: count must be positive");
    if (n % 2 == 0) throw std::domain_error("periodic_word: count must be odd (no central core otherwise)");
    return {std::vector<Species>(static_cast<std::size_t>(n), Species::B), std::nullopt};
}

} // namespace fiberwalk
