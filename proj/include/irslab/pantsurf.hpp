#pragma once

// Pairs of pants, Fenchel-Nielsen gluing along graphs of pants, the random tree-of-pants
// sampler, injectivity-radius bounds and a word-enumeration systole oracle.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "irslab/group_words.hpp"
#include "irslab/hyp2.hpp"
#include "irslab/rng.hpp"

namespace irslab::pantsurf {

using hyp2::Frame2;
using hyp2::HPoint;
using hyp2::Isometry;

struct PantsLengths {
    double l1 = 1.0, l2 = 1.0, l3 = 1.0;

    PantsLengths() = default;
    PantsLengths(double a, double b, double c);
    double operator[](int slot) const { return slot == 0 ? l1 : slot == 1 ? l2 : l3; }
};

/// Free rank-2 group of a pair of pants. The cuffs are A, B and C = (AB)^-1, and the pants
/// lies to the right of each cuff axis oriented from repelling to attracting point.
struct PantsGroup {
    Isometry A, B;
    PantsLengths lengths;

    Isometry C() const { return (A * B).inverse(); }
    Isometry cuff(int slot) const { return slot == 0 ? A : slot == 1 ? B : C(); }
};

PantsGroup pants_group(const PantsLengths& l);

/// Two right-angled hexagons H1 (bounded by the three cuff axes and the common
/// perpendiculars) and H2 (H1 reflected across the seam between cuffs A and B).
struct PantsDomain {
    std::array<HPoint, 6> hexagon1;  // aB, bA, bC, cB, cA, aC
    std::array<HPoint, 6> hexagon2;
    HPoint center;                   // midpoint of the seam aB-bA
    double radius = 0.0;             // max distance from center to a hexagon vertex
    std::array<hyp2::cplx, 6> klein1, klein2;  // vertices in Klein coordinates centred at `center`

    bool contains(const HPoint& z) const;
};

PantsDomain pants_domain(const PantsGroup& p);

/// Rejection sampler for a uniform (hyperbolic area) point of the pants plus a uniform direction.
Frame2 sample_base_frame(const PantsGroup& p, std::uint64_t seed);

/// Monte Carlo area of the fundamental domain: acceptance fraction times the area of the
/// sampling disk. Gauss-Bonnet gives 2 pi for every pants.
double estimate_domain_area(const PantsGroup& p, int samples, std::uint64_t seed);

/// Rooted 3-regular tree truncated at radius R. Vertices are numbered breadth first; the
/// center (0) uses slots 0..2 for its children, every other vertex has its parent at slot 0
/// and children at slots 1, 2. Vertices of depth <= R carry pants; edge e joins vertex e+1 to
/// its parent, and edges reaching depth R+1 are free cuffs.
struct TreeSpec {
    int radius = 0;
    std::vector<int> parent;
    std::vector<int> depth;
    std::vector<int> parent_slot;  // slot in the parent that leads to this vertex
    std::vector<std::array<int, 3>> children;  // -1 where a slot has no child

    static TreeSpec make(int R);
    int pants_count() const;
    int edge_count() const { return static_cast<int>(parent.size()) - 1; }
    /// Edge at slot s of pants v.
    int edge_at(int v, int slot) const;
};

struct EdgeFN {
    double length = 1.0;
    double twist = 0.0;  // fraction of the length, in [0, 1)
};

struct FNAssignment {
    std::vector<EdgeFN> edges;
};

struct PointMass {
    double l;
};
struct Uniform {
    double a, b;
};
struct LogNormal {
    double m, s;
};
struct TruncatedExp {
    double rate, cap;
};
using LengthLaw = std::variant<PointMass, Uniform, LogNormal, TruncatedExp>;

void validate(const LengthLaw& law);
double draw_length(const LengthLaw& law, Rng& rng);
std::string describe(const LengthLaw& law);
/// Parses "point:5", "uniform:4,5", "lognormal:1.1,0.5", "texp:0.5,20".
LengthLaw parse_law(const std::string& text);

/// i.i.d. draws per edge; edge e uses the stream derive_seed(seed, e), so trees of
/// different radius sampled with the same seed agree on their common edges.
FNAssignment sample_fn(const TreeSpec& tree, const LengthLaw& law, std::uint64_t seed);

/// General graph of pants: vertex v carries cuff lengths, edges pair cuff slots.
struct PantsGraph {
    struct Edge {
        int u, su, v, sv;
        double twist;
    };
    std::vector<PantsLengths> pants;
    std::vector<Edge> edges;
};

PantsGraph tree_graph(const TreeSpec& tree, const FNAssignment& fn);

struct SurfaceGroupApprox {
    std::vector<Isometry> generators;
    std::vector<std::string> labels;  // "v<i>.s<j>" for cuff generators, "e<k>" for HNN ones
    Frame2 baseFrame;
    TreeSpec tree;        // empty for graphs that are not trees of pants
    FNAssignment fn;
    PantsGraph graph;
    std::vector<Isometry> placements;             // chart of pants v in the root frame
    std::vector<std::array<Isometry, 3>> cuffs;   // cuff elements of pants v in the root frame
    std::vector<HPoint> centers;                  // placed pants centers
    std::vector<double> radii;                    // pants domain radii
    double max_residual = 0.0;                    // worst axis-matching residual

    /// Euler characteristic of the glued surface: -(number of pants).
    int euler_characteristic() const { return -static_cast<int>(graph.pants.size()); }
};

/// Breadth-first gluing from `root`. Tree edges place the child pants across the shared
/// cuff with displacement twist*length; every other edge contributes an HNN generator.
SurfaceGroupApprox build_graph_group(const PantsGraph& graph, int root = 0);

SurfaceGroupApprox build_group(const TreeSpec& tree, const FNAssignment& fn);

double star_bound(double l, int R);
/// Variant of the bound with the collar radius arcsinh(1/sinh l) in place of sinh(1/sinh l).
double star_bound_arcsinh(double l, int R);

struct SegmentBounds {
    double sinhBound;     // sinh(1/sinh l)
    double halfBound;     // max(0, (l-1)/2)
    double arcsinhBound;  // arcsinh(1/sinh l), diagnostic
};
SegmentBounds pants_segment_bounds(double l);

struct SearchOptions {
    std::size_t cap = words::kDefaultWordCap;
    /// Skip extensions of prefixes whose orbit displacement exceeds the current best by more
    /// than twice the pants radius. Off means the plain exhaustive enumeration.
    bool prune = false;
};

struct SystoleResult {
    double value = 0.0;
    std::vector<int> word;
    std::size_t words = 0;
    std::size_t classes = 0;  // distinct |trace| values among cyclically reduced words
};

SystoleResult systole_search(const SurfaceGroupApprox& g, int W, const SearchOptions& opt = {});
double systole_oracle(const SurfaceGroupApprox& g, int W, const SearchOptions& opt = {});

struct InjResult {
    double value = 0.0;
    std::vector<int> word;
    std::size_t words = 0;
};
InjResult inj_radius_search(const SurfaceGroupApprox& g, const Frame2& frame, int W, const SearchOptions& opt = {});
double inj_radius_at(const SurfaceGroupApprox& g, const Frame2& frame, int W, const SearchOptions& opt = {});

nlohmann::json to_json(const SurfaceGroupApprox& g);
std::string systole_csv_header();
std::string systole_csv_row(std::uint64_t seed, double l, int R, int W, double star, double oracle);

}  // namespace irslab::pantsurf
