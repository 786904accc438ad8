#pragma once

// Finite windows onto discrete subgroups of PSL(2,R): operator-norm balls of short words, a
// Hausdorff-type distance between such windows, the lattice-limit experiment for chain
// closings and an angular-gap proxy for limit-set density.

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "irslab/glue.hpp"
#include "irslab/group_words.hpp"
#include "irslab/hyp2.hpp"

namespace irslab::chabauty {

using hyp2::HPoint;
using hyp2::Isometry;

inline constexpr double kDedupeTol = 1e-9;
inline constexpr double kBoundaryBand = 1e-6;

struct BallSet {
    std::vector<Isometry> elements;
    double radiusR = 0.0;
    int wordDepth = 0;
};

struct BallOptions {
    std::size_t cap = words::kDefaultWordCap;
    /// Stop extending a word once its displacement of i exceeds 2 ln R + pruneSlack. Off means
    /// every reduced word of length <= W is evaluated.
    bool prune = false;
    double pruneSlack = 6.0;
};

/// Distinct elements of norm <= R among the identity and the reduced words of length <= W,
/// deduplicated within 1e-9 and sorted by their entries rounded to 1e-9.
BallSet ball_set(const std::vector<Isometry>& gens, double R, int W, const BallOptions& opt = {});

/// Number of elements of `inner` that have a partner in `outer` within tol.
std::size_t count_contained(const BallSet& inner, const BallSet& outer, double tol = kDedupeTol);

/// Hausdorff distance in the sup-norm metric (modulo sign) after adjoining a common point
/// "outside the window" at distance max(0, R (1 - 1e-6) - |g|) / 2 from g. Elements near the
/// norm sphere are therefore matched for free, and the result is a pseudometric.
double proxy_distance(const BallSet& a, const BallSet& b);

struct ChainGeometry {
    double L0 = 1.0, L1 = 1.0, sigma = 1.0;
};

struct LatticeLimitOptions {
    std::vector<int> ks{1, 2, 4, 8, 16};
    double R = 5.0;
    int W = 6;
    /// The long chain covers this many periods on each side of the root.
    int windowPeriods = 4;
    BallOptions ball{words::kDefaultWordCap, true, 6.0};
};

struct LatticeLimitResult {
    std::vector<int> ks;
    std::vector<double> distances;
    std::vector<std::size_t> closedSizes;
    std::size_t longSize = 0;
};

/// proxy_distance between the closing of `period` repeated k times and an open chain on the
/// periodic window, both rooted at the first block of the period.
LatticeLimitResult lattice_limit_experiment(const glue::Word& period, const ChainGeometry& geom,
                                            const LatticeLimitOptions& opt = {});

struct DirectionSample {
    std::vector<double> angles;  // sorted, in [0, 2 pi)
};

DirectionSample orbit_directions(const std::vector<Isometry>& gens, const HPoint& base, int W,
                                 std::size_t cap = words::kDefaultWordCap);
/// Largest gap between cyclically consecutive directions (2 pi when fewer than two).
double max_angular_gap(const DirectionSample& s);
double direction_density(const std::vector<Isometry>& gens, const HPoint& base, int W,
                         std::size_t cap = words::kDefaultWordCap);

nlohmann::json to_json(const BallSet& s);
BallSet ballset_from_json(const nlohmann::json& j);
/// Accepts {"generators": [...]}, a bare array of matrices, or a BallSet's "elements".
std::vector<Isometry> generators_from_json(const nlohmann::json& j);
std::string lattice_limit_csv(const LatticeLimitResult& r);

}  // namespace irslab::chabauty
