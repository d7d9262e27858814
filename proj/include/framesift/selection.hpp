#pragma once

#include "framesift/ingest.hpp"
#include "framesift/signals.hpp"

namespace framesift::selection {

struct CandidateFrame {
    std::int64_t frame_index = 0;
    double time_s = 0.0;
    double c_ratio = 0.0;
    double b_ratio = 0.0;
    double sharpness = 0.0;
    double cbt_value = 0.0;
    bool kept = false;

    bool operator==(const CandidateFrame&) const = default;
};

struct SelectionSpec {
    bool refine = true;
    int step = 7;
    int count = 7;
    /// Gates use strict `>`; a threshold of 0 disables that gate.
    double sharpness_threshold = 111.0;
    double cbt_threshold = 0.0;

    void validate() const;
};

/// sqrt(c_ratio^2 * b_ratio).
double cbt_metric(double c_ratio, double b_ratio);

/// Window offsets k*step for the `count` refinement frames, centred on 0.
/// Odd counts are symmetric; even counts put the extra frame before the peak.
std::vector<int> refinement_offsets(int step, int count);

/// Sharpest position among the refinement window around `peak_pos`, using
/// precomputed per-position sharpness. Offsets outside the sequence are
/// skipped. Ties prefer the peak itself, then the smallest position.
std::size_t refine_by_sharpness(std::size_t peak_pos, std::span<const double> sharpness,
                                int step = 7, int count = 7);

/// Same as above, measuring sharpness of the preprocessed frames on demand.
/// Returns a frame index.
std::int64_t refine_by_sharpness(std::int64_t peak, const ingest::FrameSequence& seq,
                                 const ingest::PreprocessSpec& preprocess, int step = 7,
                                 int count = 7);

/// Refines each distinct peak, scores the refined frame and applies the
/// gates. Returns every evaluated candidate (kept or not), sorted by frame
/// index without duplicates.
std::vector<CandidateFrame> select_candidates(const signals::FrameMetrics& metrics,
                                              std::span<const std::int64_t> peaks,
                                              const SelectionSpec& spec);

std::vector<CandidateFrame> select_candidates(const ingest::FrameSequence& seq,
                                              std::span<const std::int64_t> peaks,
                                              const ingest::PreprocessSpec& preprocess,
                                              const SelectionSpec& spec, unsigned jobs = 0);

}  // namespace framesift::selection
