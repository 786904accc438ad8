#include "irslab/group_words.hpp"

#include <cstdlib>

namespace irslab::words {

std::string format_word(const std::vector<int>& w) {
    if (w.empty()) return "1";
    std::string s;
    for (int l : w) {
        if (!s.empty()) s += ' ';
        s += 'g' + std::to_string(std::abs(l) - 1);
        if (l < 0) s += "^-1";
    }
    return s;
}

WordSearch::WordSearch(std::vector<hyp2::Isometry> gens, std::size_t cap) : gens_(std::move(gens)), cap_(cap) {
    require(!gens_.empty(), ErrorKind::InvalidArgument, "word search needs at least one generator");
    require(cap_ > 0, ErrorKind::InvalidArgument, "word cap must be positive");
    inv_.reserve(gens_.size());
    for (const auto& g : gens_) inv_.push_back(g.inverse());
}

hyp2::Isometry evaluate(const std::vector<hyp2::Isometry>& gens, const std::vector<int>& word) {
    hyp2::Isometry g;
    for (int l : word) {
        const int i = std::abs(l) - 1;
        require(l != 0 && i < static_cast<int>(gens.size()), ErrorKind::InvalidArgument, "letter out of range");
        g = g * (l > 0 ? gens[i] : gens[i].inverse());
    }
    return g;
}

std::vector<int> reduce(const std::vector<int>& w) {
    std::vector<int> out;
    out.reserve(w.size());
    for (int l : w) {
        if (!out.empty() && out.back() == -l)
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

}  // namespace irslab::words
