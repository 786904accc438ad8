#pragma once

// Depth-first enumeration of reduced words in a finitely generated group given by
// matrix generators. Letters are signed: +(i+1) is generator i, -(i+1) its inverse.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "irslab/error.hpp"
#include "irslab/hyp2.hpp"

namespace irslab::words {

inline constexpr std::size_t kDefaultWordCap = 2'000'000;

inline bool cyclically_reduced(const std::vector<int>& w) { return w.size() < 2 || w.front() != -w.back(); }

std::string format_word(const std::vector<int>& w);

class WordSearch {
public:
    explicit WordSearch(std::vector<hyp2::Isometry> gens, std::size_t cap = kDefaultWordCap);

    std::size_t rank() const { return gens_.size(); }
    const hyp2::Isometry& letter(int l) const { return l > 0 ? gens_[l - 1] : inv_[-l - 1]; }

    // Calls visit(element, word) for every nontrivial reduced word of length 1..W, in a
    // fixed depth-first order (letters +1, -1, +2, -2, ...). When visit returns false the
    // extensions of that word are skipped. Throws Budget once more than cap words are seen.
    template <class Visit>
    std::size_t run(int W, Visit&& visit) const {
        require(W >= 1, ErrorKind::InvalidArgument, "word length bound must be at least 1");
        std::vector<int> word;
        word.reserve(static_cast<std::size_t>(W));
        std::size_t count = 0;
        descend(hyp2::Isometry(), word, W, count, visit);
        return count;
    }

private:
    template <class Visit>
    void descend(const hyp2::Isometry& g, std::vector<int>& word, int W, std::size_t& count, Visit& visit) const {
        const int n = static_cast<int>(gens_.size());
        for (int k = 0; k < 2 * n; ++k) {
            const int l = (k % 2 == 0) ? k / 2 + 1 : -(k / 2 + 1);
            if (!word.empty() && word.back() == -l) continue;
            if (++count > cap_)
                fail(ErrorKind::Budget, "word enumeration exceeded cap of " + std::to_string(cap_) + " words");
            const hyp2::Isometry h = g * letter(l);
            word.push_back(l);
            if (visit(h, static_cast<const std::vector<int>&>(word)) && static_cast<int>(word.size()) < W)
                descend(h, word, W, count, visit);
            word.pop_back();
        }
    }

    std::vector<hyp2::Isometry> gens_;
    std::vector<hyp2::Isometry> inv_;
    std::size_t cap_;
};

hyp2::Isometry evaluate(const std::vector<hyp2::Isometry>& gens, const std::vector<int>& word);

/// Free reduction of a signed-letter word.
std::vector<int> reduce(const std::vector<int>& w);

}  // namespace irslab::words
