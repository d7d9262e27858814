#pragma once

#include "framesift/adapters.hpp"
#include "framesift/config.hpp"
#include "framesift/ingest.hpp"
#include "framesift/selection.hpp"
#include "framesift/signals.hpp"
#include "framesift/smoothing.hpp"

namespace framesift::detect {

struct Detection {
    std::string video_id;
    int class_id = 0;
    std::int64_t frame_index = 0;
    double time_s = 0.0;
    double confidence = 1.0;  // carried through, not used for decisions

    bool operator==(const Detection&) const = default;
};

struct Adapters {
    adapters::SegmenterAdapter product = adapters::SegmenterAdapter::null(true);
    adapters::SegmenterAdapter hand = adapters::SegmenterAdapter::null(false);
    adapters::ClassifierAdapter classifier = adapters::ClassifierAdapter::constant(1);

    bool reentrant() const
    {
        return product.reentrant() && hand.reentrant() && classifier.reentrant();
    }
};

/// Builds adapters from config settings. A null hand segmenter marks no
/// pixel as hand; a null product segmenter marks every pixel as product.
Adapters make_adapters(const PipelineConfig& cfg);

struct PipelineResult {
    signals::FrameMetrics metrics;
    signals::SignalSeries peak_series;
    signals::SignalSeries smoothed;
    std::vector<smoothing::Peak> peaks;
    std::vector<selection::CandidateFrame> candidates;
    std::vector<Detection> raw;         // sorted by frame index
    std::vector<Detection> detections;  // raw, deduplicated when enabled
};

/// Masks one ROI frame and returns the crops that go to the classifier.
/// Empty when no foreground component survives.
std::vector<FramePixels> candidate_crops(const FramePixels& roi, const std::string& frame_key,
                                         const PipelineConfig& cfg, const Adapters& adapters);

/// Every stage with its intermediate products.
PipelineResult detect_video(const ingest::FrameSequence& seq, const PipelineConfig& cfg,
                            const Adapters& adapters);

/// Frame selection through classification; raw (non-deduplicated)
/// detections sorted by frame index.
std::vector<Detection> run_pipeline(const ingest::FrameSequence& seq, const PipelineConfig& cfg,
                                    const Adapters& adapters);

/// Drops a detection when a kept detection of the same video and class lies
/// within `window_s` before it. Only kept detections anchor the window.
std::vector<Detection> dedupe(const std::vector<Detection>& detections, double window_s);

}  // namespace framesift::detect
