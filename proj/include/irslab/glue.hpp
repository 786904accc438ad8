#pragma once

// Gluing blocks N0, N1 along a binary sequence: the volume-reweighted measure, chunks and the
// covering obstruction for the glued manifold, and a two-dimensional realization of the gluing
// as a chain of pants.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "irslab/pantsurf.hpp"
#include "irslab/rational.hpp"
#include "irslab/symdyn.hpp"

namespace irslab::glue {

using symdyn::ShiftMeasure;
using symdyn::WindowWord;
using symdyn::Word;

struct BlockGeometry {
    Rational vol0 = 1, vol1 = 1, volSigma = 1;

    BlockGeometry() = default;
    BlockGeometry(Rational v0, Rational v1, Rational vs);
    /// From decimal strings, e.g. {"1", "3", "0.5"}.
    static BlockGeometry parse(const std::string& v0, const std::string& v1, const std::string& vs);
    /// From "v0,v1,vs".
    static BlockGeometry parse(const std::string& csv);

    const Rational& vol(int label) const { return label == 0 ? vol0 : vol1; }
};

/// Probability of alpha_0 = 1 under the measure reweighted by vol(N_{alpha_0}).
double nu_prime_weight(const BlockGeometry& geom, const ShiftMeasure& m);
/// Rejection sampling from sample_window draws with acceptance vol(N_{alpha_0}) / max vol.
WindowWord sample_nu_prime(const BlockGeometry& geom, const ShiftMeasure& m, int length, std::uint64_t seed);

/// Run-length encoding: (label, run length).
std::vector<std::pair<int, int>> chunks(const Word& alpha);
Word decode_chunks(const std::vector<std::pair<int, int>>& runs);

/// 2 volSigma volC / (vol_label * boundaryCount * volSigma).
Rational blocks_per_chunk(const BlockGeometry& geom, const Rational& volC, int boundaryCount, int label);

enum class Arrangement { Cycle, Segment };
std::string to_string(Arrangement a);

struct Component {
    int label = 0;
    Rational volC = 1;
    int boundaryCount = 2;
};

struct CoverHypothesis {
    Arrangement arrangement = Arrangement::Cycle;
    std::vector<Component> components;

    /// Alternating labels; Segment endpoints have one boundary component, all others two.
    void validate() const;
};

/// Components chosen so that their block counts are exactly `counts`.
CoverHypothesis hypothesis_from_counts(Arrangement a, int firstLabel, const std::vector<int>& counts,
                                       const BlockGeometry& geom);

/// Cyclic word read off the covered quotient; nullopt if some block count is not a positive integer.
std::optional<Word> infer_period(const CoverHypothesis& h, const BlockGeometry& geom);

/// Cycle hypothesis whose components are the cyclic runs of w.
CoverHypothesis induced_hypothesis(const Word& w, const BlockGeometry& geom);

/// Cyclic run-length encoding (first and last runs merged when they share a label).
std::vector<std::pair<int, int>> cyclic_chunks(const Word& w);

/// alpha's window occurs in the bi-infinite repetition of some phase of w.
bool factor_of_periodic(const Word& alpha, const Word& w);
bool cover_consistent(const WindowWord& alpha, const CoverHypothesis& h, const BlockGeometry& geom);

struct SearchBudget {
    int maxComponents = 8;
    int maxCount = 16;
    std::uint64_t maxNodes = 50'000'000;  // search nodes before Budget is raised
};

struct SearchResult {
    std::optional<CoverHypothesis> hypothesis;
    std::optional<Word> period;
    std::uint64_t nodes = 0;       // partial hypotheses visited
    std::uint64_t leaves = 0;      // complete hypotheses checked
    long double gridSize = 0;      // complete hypotheses in the grid
};

/// First consistent hypothesis in the grid (Cycle before Segment, fewer components first,
/// first label 0 before 1, counts lexicographic). Branches are cut only when no placement of
/// alpha in the run cycle agrees with the counts fixed so far, so the search is exhaustive.
SearchResult search_hypotheses(const WindowWord& alpha, const BlockGeometry& geom, const SearchBudget& budget);
/// Same answer by checking every grid point; for cross-checks on small grids.
SearchResult search_hypotheses_brute(const WindowWord& alpha, const BlockGeometry& geom, const SearchBudget& budget);

struct ChainOptions {
    bool closed = false;         // glue the last block back to the first
    bool randomTwists = false;   // twist-randomized chains; zero twists otherwise
    std::uint64_t seed = 0;
};

/// Block a = two pants P_L(sigma, L_a, sigma) and P_R(L_a, sigma, sigma) glued along L_a; blocks
/// glued right to left along sigma. Pants 2i and 2i+1 form block i; the root is P_L of the block
/// at position 0 of the window (block 0 for closed chains).
struct ChainRealization {
    pantsurf::SurfaceGroupApprox group;
    double L0 = 0, L1 = 0, sigma = 0;
    Word alpha;
    int rootBlock = 0;
    bool closed = false;

    int blocks() const { return static_cast<int>(alpha.size()); }
    /// Translation length of block i's internal curve.
    double internal_length(int block) const;
    /// Placement of P_L of block i in the root frame.
    const hyp2::Isometry& block_placement(int block) const { return group.placements[2 * block]; }
};

ChainRealization realize_chain(const WindowWord& alpha, double L0, double L1, double sigma,
                               const ChainOptions& opt = {});

nlohmann::json to_json(const CoverHypothesis& h);
nlohmann::json to_json(const SearchResult& r, const SearchBudget& b);

}  // namespace irslab::glue
