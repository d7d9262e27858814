#pragma once

#include "framesift/core.hpp"
#include "framesift/ingest.hpp"

#include <array>
#include <string>
#include <string_view>

namespace framesift::signals {

/// One real value per frame index of a video.
struct SignalSeries {
    std::string video_id;
    double frame_rate = 0.0;
    std::vector<std::int64_t> frame_index;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    void validate() const;
    bool operator==(const SignalSeries&) const = default;
};

using Histogram = std::array<std::uint64_t, 256>;

Histogram histogram(const FramePixels& gray);

/// Otsu's global threshold. Class 0 is `v <= t`. Ties resolve to the
/// smallest t; a single-valued image returns that value.
int otsu_threshold(const FramePixels& gray);
int otsu_threshold(const Histogram& hist);

/// dst = 0 where src > thresh, maxval otherwise; the mask keeps the
/// "maxval" side as true.
BinaryMask binarize_inverse(const FramePixels& gray, int thresh);

/// Fraction of pixels left on by inverse Otsu binarization.
double binarization_ratio(const FramePixels& gray);

/// Opponent-channel colorfulness: sigma_rgyb + 0.3 * mu_rgyb with
/// population statistics.
double colorfulness(const FramePixels& rgb);

/// Mean 3x3 Sobel gradient magnitude over interior pixels.
double sharpness(const FramePixels& gray);
double sharpness(std::span<const double> samples, int width, int height);

enum class Metric { binarization_ratio, colorfulness, sharpness };

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric m);

/// All three signals for one preprocessed frame.
struct FrameSignals {
    double colorfulness = 0.0;
    double b_ratio = 0.0;
    double sharpness = 0.0;
};

/// Evaluates signals on an already preprocessed frame. Colorfulness is 0 for
/// gray input.
FrameSignals measure(const FramePixels& preprocessed);

/// Column-oriented per-frame signals, position-aligned with the sequence.
struct FrameMetrics {
    std::string video_id;
    double frame_rate = 0.0;
    std::vector<std::int64_t> frame_index;
    std::vector<double> colorfulness;
    std::vector<double> b_ratio;
    std::vector<double> sharpness;

    std::size_t size() const { return frame_index.size(); }
    SignalSeries series(Metric m) const;
};

/// Preprocesses every frame once and measures all signals. `jobs` caps the
/// worker count (0 = hardware concurrency). Output order never depends on it.
FrameMetrics compute_frame_metrics(const ingest::FrameSequence& seq,
                                   const ingest::PreprocessSpec& preprocess, unsigned jobs = 0);

SignalSeries compute_series(const ingest::FrameSequence& seq, Metric metric,
                            const ingest::PreprocessSpec& preprocess, unsigned jobs = 0);

}  // namespace framesift::signals
