#pragma once

// Subshifts given by families of sample words, window approximations of them, shift-invariant
// measures on sequences, and the free-group geodesic combinatorics (embedding of strings as
// geodesics, shifts, axes).

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace irslab::symdyn {

/// Letters are the characters '0'..'9'; a word over {0,...,n} is a string.
using Word = std::string;

inline int letter_value(char c) { return c - '0'; }
inline char letter_char(int v) { return static_cast<char>('0' + v); }

struct SubshiftFamily {
    int alphabetSize = 2;
    std::vector<Word> samples;

    void validate() const;
};

/// Prefix of length n of the Thue-Morse sequence 0110100110010110...
Word thue_morse(std::size_t n);
/// Family of Thue-Morse prefixes of the given lengths.
SubshiftFamily thue_morse_family(const std::vector<std::size_t>& lengths);

std::set<Word> factor_set(const SubshiftFamily& fam, int L);
bool admits(const Word& w, const SubshiftFamily& fam);

/// Window-L graph: vertices are admissible (L-1)-blocks, edges admissible L-blocks.
struct BlockGraph {
    std::vector<Word> nodes;                       // sorted
    std::vector<std::vector<std::pair<int, char>>> out;  // (target, appended letter), sorted by letter
};
BlockGraph block_graph(const SubshiftFamily& fam, int L);

/// True iff the window-L shift of finite type is nonempty (its block graph has a cycle).
bool sft_nonempty(const SubshiftFamily& fam, int L);

/// Least (lexicographically) word of minimal period <= Pmax whose bi-infinite repetition has
/// only admissible length-L factors; nullopt if there is none. A nullopt is relative to the
/// window L: the window shift contains the true subshift.
std::optional<Word> find_periodic(const SubshiftFamily& fam, int L, int Pmax);

/// Every length-<=L factor of the periodic word w^infinity is admissible.
bool periodic_admissible(const Word& w, const SubshiftFamily& fam, int L);

struct WindowWord {
    Word letters;
    int offsetOfZero = 0;

    WindowWord() = default;
    WindowWord(Word w, int offset);
    /// Window with the conventional anchor floor(length/2).
    static WindowWord centered(Word w);

    int size() const { return static_cast<int>(letters.size()); }
    /// Letter at position i (relative to position 0).
    char at(int i) const;
    int first() const { return -offsetOfZero; }
    int last() const { return size() - 1 - offsetOfZero; }

    friend bool operator==(const WindowWord&, const WindowWord&) = default;
};

struct Bernoulli {
    std::vector<double> p;
};
struct Markov {
    std::vector<std::vector<double>> P;
    std::vector<double> pi;
};
struct PeriodicOrbit {
    Word word;
};
using ShiftMeasure = std::variant<Bernoulli, Markov, PeriodicOrbit>;

void validate(const ShiftMeasure& m);
/// Probability that position 0 carries letter a.
double marginal(const ShiftMeasure& m, int a);

WindowWord sample_window(const ShiftMeasure& m, int length, std::uint64_t seed);

/// sigma^k: position 0 of the result is position k of w. OutOfWindow if k leaves the window.
WindowWord shift(const WindowWord& w, int k);

/// Reduced word in a free group; letter +(i+1) is generator i, -(i+1) its inverse.
class FreeWord {
public:
    FreeWord() = default;
    explicit FreeWord(std::vector<int> letters);

    static FreeWord generator(int i) { return FreeWord({i + 1}); }

    const std::vector<int>& letters() const { return letters_; }
    int length() const { return static_cast<int>(letters_.size()); }
    bool is_identity() const { return letters_.empty(); }
    FreeWord inverse() const;
    FreeWord power(int k) const;

    friend FreeWord operator*(const FreeWord& a, const FreeWord& b);
    friend bool operator==(const FreeWord&, const FreeWord&) = default;
    friend bool operator<(const FreeWord& a, const FreeWord& b) { return a.letters_ < b.letters_; }

    std::string str() const;

private:
    std::vector<int> letters_;
};

/// Inverse of FreeWord::str: "f0 f1^-1 f2^3", or "1" for the identity.
FreeWord parse_free_word(const std::string& text);

/// w = conjugator * core * conjugator^-1 with core cyclically reduced.
struct CyclicReduction {
    FreeWord conjugator;
    FreeWord core;
};
CyclicReduction cyclic_reduce(const FreeWord& w);

/// Finite window of a geodesic gamma: Z -> F. steps[offsetOfZero + i] = gamma(i)^-1 gamma(i+1).
class GeodesicWindow {
public:
    GeodesicWindow(std::vector<int> steps, int offsetOfZero, FreeWord anchor);

    const std::vector<int>& steps() const { return steps_; }
    int offset() const { return offset_; }
    const FreeWord& anchor() const { return anchor_; }
    int first() const { return -offset_; }
    /// Last position with a defined vertex gamma(i).
    int last() const { return static_cast<int>(steps_.size()) - offset_; }
    int step_at(int i) const;
    FreeWord at(int i) const;

    friend bool operator==(const GeodesicWindow&, const GeodesicWindow&) = default;

private:
    std::vector<int> steps_;
    int offset_;
    FreeWord anchor_;
};

/// Shift: position 0 of the result is position k of gamma, anchored at gamma(k).
GeodesicWindow shift(const GeodesicWindow& g, int k);

/// Same geodesic modulo the left action of F on the overlapping positions.
bool same_class(const GeodesicWindow& a, const GeodesicWindow& b);

/// gamma_e with gamma_e(0) = 1 and gamma_e(i)^-1 gamma_e(i+1) = phi_{e_i}.
GeodesicWindow embed_string(const WindowWord& e);

struct Axis {
    FreeWord conjugator;
    FreeWord core;
    int period = 0;

    /// The axis on positions [-m, m): gamma(j |c| + r) = u c^j c_1...c_r, gamma(0) = u.
    GeodesicWindow window(int m) const;
};
Axis axis_of(const FreeWord& g);

/// True iff g gamma(i) = gamma(i+k) on every testable i for some k != 0, |k| <= |g|.
bool is_axis(const GeodesicWindow& gamma, const FreeWord& g);

nlohmann::json to_json(const SubshiftFamily& fam);
SubshiftFamily family_from_json(const nlohmann::json& j);
/// Newline-delimited words; the alphabet size is inferred as max letter + 1 (at least 2).
SubshiftFamily family_from_lines(const std::string& text);
nlohmann::json to_json(const WindowWord& w);
nlohmann::json to_json(const GeodesicWindow& g);

}  // namespace irslab::symdyn
