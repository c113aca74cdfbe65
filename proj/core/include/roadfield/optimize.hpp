#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "roadfield/analysis.hpp"
#include "roadfield/meshing.hpp"
#include "roadfield/network.hpp"

namespace roadfield {

enum class RoadFamily { SegmentBundle, Cross, Comb, Tree, UserList };

RoadFamily road_family_from_string(const std::string& name);
std::string to_string(RoadFamily f);

/// Search space description. Parametric families are enumerated on a uniform
/// coarse grid; local search moves on the fine grid (coarse step divided by
/// fine_factor). Candidates must be connected, stay inside the domain, keep
/// total length within the budget, and contain every required point.
struct RoadFamilySpec {
    RoadFamily family = RoadFamily::SegmentBundle;
    DomainGeometry domain;
    Parameters params;
    double budget = 1.0;
    double min_length = 0.05;
    int grid = 8;
    int fine_factor = 4;
    std::vector<Point2> required_points;
    double required_tol = 1e-9;
    double h = 1.0 / 16.0;
    MeshingOptions mesh_options;
    int eigen_k = 1;
    double eigen_tol = 1e-8;
    double band = 1e-3;
    double corner_clearance = 0.08;  // boundary-anchored endpoints keep away from corners
    std::uint64_t seed = 0x6f7074ULL;
    std::vector<RoadNetwork> user_candidates;
    int local_iterations = 64;
};

struct Candidate {
    int id = 0;
    RoadNetwork net;
    std::vector<double> parameters;  // family coordinates, empty for user lists
    std::string label;
};

struct CandidateEvaluation {
    Candidate candidate;
    double length = 0.0;
    double lambda1 = 0.0;
    double gamma1 = 0.0;
    double ratio = 0.0;
    Classification classification = Classification::Neutral;
    bool ok = false;
    std::string error;
};

struct SearchResult {
    std::vector<CandidateEvaluation> ranked;  // feasible candidates, best first
    std::vector<std::string> rejections;      // infeasible parameter points with reasons
    std::vector<std::string> notes;           // refinement re-checks and search events
    int evaluations = 0;
    int gamma_cache_hits = 0;

    const CandidateEvaluation& best() const;
};

/// Deterministic coarse-grid enumeration of the family.
std::vector<Candidate> enumerate_candidates(const RoadFamilySpec& spec);

/// gamma1 shared across all candidates of one search: the first evaluated
/// candidate's mesh becomes the reference for its (h, a) key. Thread safe,
/// single-writer insertion.
class Gamma1Cache {
public:
    double get_or_compute(const Mesh& mesh, const Parameters& params, double h, double tol);
    int hits() const { return hits_; }

private:
    struct Entry {
        double h;
        double a;
        double gamma1;
    };
    std::vector<Entry> entries_;
    std::mutex mutex_;
    int hits_ = 0;
};

/// triangulate -> build_system -> lambda1 -> cached gamma1 -> ratio. Meshing
/// or solver failures are captured in `ok`/`error`, not thrown.
CandidateEvaluation evaluate_candidate(const RoadFamilySpec& spec, const Candidate& cand,
                                       Gamma1Cache& cache);

/// Stable sort by ratio descending, ties by length ascending then id.
void rank(std::vector<CandidateEvaluation>& evals);

/// Greedy first-class search: full coarse enumeration, then steepest-ascent
/// local refinement from the best coarse point using fine-grid steps
/// (parametric families) or vertex nudges with budget projection (user
/// lists). Deterministic for a fixed spec.
SearchResult run_search(const RoadFamilySpec& spec, int threads = 1);

/// Local refinement only, starting from the given candidate.
SearchResult local_search(const RoadFamilySpec& spec, const Candidate& seed, int iterations,
                          int threads = 1);

} // namespace roadfield
