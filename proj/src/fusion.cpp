#include "relight/fusion.hpp"

#include <stdexcept>

namespace relight {

namespace {

void check_same_size(const CandidateSet& set) {
    if (set.candidates.empty()) throw std::invalid_argument("candidate set is empty");
    const ImageF& first = set.candidates.front();
    for (std::size_t i = 1; i < set.candidates.size(); ++i) {
        if (!set.candidates[i].same_size(first)) {
            throw std::invalid_argument("candidate " + std::to_string(i) + " is " +
                                        std::to_string(set.candidates[i].width) + "x" +
                                        std::to_string(set.candidates[i].height) +
                                        ", expected " + std::to_string(first.width) + "x" +
                                        std::to_string(first.height));
        }
    }
}

}  // namespace

CandidateSet build_candidate_set(const ImageF& input, const ImageF* prev,
                                 const std::vector<ReferenceImage>& refs) {
    if (refs.empty() || refs.size() % 2 != 0) {
        throw std::invalid_argument("reference list must be nonempty with an even count");
    }
    CandidateSet set;
    set.candidates.reserve(refs.size() + 2);
    set.labels.reserve(refs.size() + 2);
    set.candidates.push_back(input);
    set.labels.emplace_back("input");
    // First epoch: the previous output is defined to be the input itself.
    set.candidates.push_back(prev ? *prev : input);
    set.labels.emplace_back(prev ? "previous_output" : "previous_output(=input)");
    for (const ReferenceImage& r : refs) {
        set.candidates.push_back(r.image);
        set.labels.push_back(r.label);
    }
    check_same_size(set);
    return set;
}

FusionResult fuse(const CandidateSet& set, const QualityConfig& cfg) {
    check_same_size(set);
    const int w = set.candidates.front().width;
    const int h = set.candidates.front().height;
    const std::size_t n = static_cast<std::size_t>(w) * h;

    std::vector<PlaneF> scores;
    scores.reserve(set.candidates.size());
    for (const ImageF& c : set.candidates) scores.push_back(composite_score(c, cfg).composite);

    FusionResult res;
    res.pseudo_gt = ImageF(w, h);
    res.winner_index.assign(n, 0);
    res.winning_score = PlaneF(w, h);

    for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        double best_score = scores[0].data[i];
        for (std::size_t j = 1; j < scores.size(); ++j) {
            if (scores[j].data[i] > best_score) {
                best_score = scores[j].data[i];
                best = static_cast<int>(j);
            }
        }
        res.winner_index[i] = best;
        res.winning_score.data[i] = best_score;
        const double* src = &set.candidates[best].data[i * 3];
        double* dst = &res.pseudo_gt.data[i * 3];
        dst[0] = src[0];
        dst[1] = src[1];
        dst[2] = src[2];
    }
    return res;
}

ImageF fuse_weighted(const CandidateSet& set, const QualityConfig& cfg) {
    check_same_size(set);
    const int w = set.candidates.front().width;
    const int h = set.candidates.front().height;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    const std::size_t m = set.candidates.size();

    std::vector<PlaneF> scores;
    scores.reserve(m);
    for (const ImageF& c : set.candidates) scores.push_back(composite_score(c, cfg).composite);

    ImageF out(w, h);
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) total += scores[j].data[i];
        for (int c = 0; c < 3; ++c) {
            double acc = 0.0;
            if (total > 0.0) {
                for (std::size_t j = 0; j < m; ++j) {
                    acc += scores[j].data[i] / total * set.candidates[j].data[i * 3 + c];
                }
            } else {
                for (std::size_t j = 0; j < m; ++j) acc += set.candidates[j].data[i * 3 + c];
                acc /= static_cast<double>(m);
            }
            out.data[i * 3 + c] = acc;
        }
    }
    return out;
}

}  // namespace relight
