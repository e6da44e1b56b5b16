#pragma once

#include <string>
#include <vector>

#include "relight/image.hpp"
#include "relight/quality.hpp"
#include "relight/refgen.hpp"

namespace relight {

/// Ordered fusion candidates. For enhancement runs the order is fixed by
/// build_candidate_set: [input, previous output, darker refs, brighter refs],
/// giving 2N+2 entries; fuse itself accepts any nonempty same-size list.
struct CandidateSet {
    std::vector<ImageF> candidates;
    std::vector<std::string> labels;
};

/// Assemble the enhancement candidate set. A null prev means "first epoch":
/// the input stands in for the previous output.
CandidateSet build_candidate_set(const ImageF& input, const ImageF* prev,
                                 const std::vector<ReferenceImage>& refs);

struct FusionResult {
    ImageF pseudo_gt;               // winner pixels copied verbatim
    std::vector<int> winner_index;  // per-pixel selected candidate
    PlaneF winning_score;           // composite score of the winner
};

/// Per-pixel argmax selection over the candidates' composite scores. Ties go to
/// the lowest candidate index, so the input (index 0) wins when nothing beats it.
FusionResult fuse(const CandidateSet& set, const QualityConfig& cfg);

/// Comparison baseline: per-pixel score-weighted average of the candidates
/// (weights normalized per pixel; uniform when all scores are zero).
ImageF fuse_weighted(const CandidateSet& set, const QualityConfig& cfg);

}  // namespace relight
