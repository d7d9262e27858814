#include "framesift/detect.hpp"

#include "framesift/masking.hpp"
#include "framesift/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>

namespace framesift::detect {

namespace {

adapters::SegmenterAdapter make_segmenter(const AdapterSettings& s, bool null_fill)
{
    if (s.kind == "null")
        return adapters::SegmenterAdapter::null(null_fill);
    if (s.kind == "manifest")
        return adapters::SegmenterAdapter::manifest(s.manifest);
    if (s.kind == "external_command")
        return adapters::SegmenterAdapter::command(s.command, s.reentrant);
    throw Error(fmt::format("unknown segmenter kind '{}'", s.kind));
}

struct Masked {
    FramePixels crop;
    BinaryMask product;  // adapter masks restricted to the crop
    BinaryMask hand;
};

BinaryMask crop_mask(const BinaryMask& m, const Rect& r)
{
    BinaryMask out(r.width, r.height);
    for (int y = 0; y < r.height; ++y)
        for (int x = 0; x < r.width; ++x)
            out.set(x, y, m.at(r.x + x, r.y + y));
    return out;
}

// Masks `image` and returns crops of the selected contours. Precomputed
// adapter masks (from an earlier pass) replace the adapter calls.
std::vector<Masked> mask_and_crop(const FramePixels& image, const std::string& key,
                                  const PipelineConfig& cfg, const Adapters& ad,
                                  masking::ContourMode mode, const BinaryMask* product_in = nullptr,
                                  const BinaryMask* hand_in = nullptr)
{
    const auto product = product_in ? *product_in : ad.product.segment(image, key);
    const auto hand = hand_in ? *hand_in : ad.hand.segment(image, key);
    const auto entropy = cfg.entropy_masking
                             ? masking::entropy_mask(ingest::to_grayscale(image), cfg.entropy)
                             : BinaryMask(image.width(), image.height(), true);
    const auto combined = masking::combine_masks(product, hand, entropy);
    std::vector<Masked> out;
    for (const auto& c : masking::select_contours(masking::find_contours(combined), mode)) {
        const auto r = masking::contour_rect(c, cfg.crop_pad, image.width(), image.height());
        out.push_back({ingest::crop(image, r), crop_mask(product, r), crop_mask(hand, r)});
    }
    return out;
}

}  // namespace

Adapters make_adapters(const PipelineConfig& cfg)
{
    Adapters a;
    a.product = make_segmenter(cfg.product, true);
    a.hand = make_segmenter(cfg.hand, false);
    if (cfg.classifier.kind == "constant")
        a.classifier = adapters::ClassifierAdapter::constant(cfg.classifier.class_id);
    else if (cfg.classifier.kind == "manifest")
        a.classifier = adapters::ClassifierAdapter::manifest(cfg.classifier.manifest, cfg.classifier.skip_missing);
    else if (cfg.classifier.kind == "external_command")
        a.classifier = adapters::ClassifierAdapter::command(cfg.classifier.command, cfg.classifier.reentrant);
    else
        throw Error(fmt::format("unknown classifier kind '{}'", cfg.classifier.kind));
    return a;
}

std::vector<FramePixels> candidate_crops(const FramePixels& roi, const std::string& frame_key,
                                         const PipelineConfig& cfg, const Adapters& adapters)
{
    if (!cfg.segment)
        return {roi};
    auto first = mask_and_crop(roi, frame_key, cfg, adapters, cfg.contour_mode);
    std::vector<FramePixels> out;
    for (auto& m : first) {
        if (!cfg.re_segment) {
            out.push_back(std::move(m.crop));
            continue;
        }
        // Manifest masks are keyed by frame, so the second pass reuses the
        // stored mask under the crop; model-backed adapters see the crop.
        using Kind = adapters::SegmenterAdapter::Kind;
        const bool reuse_product = adapters.product.kind() == Kind::manifest;
        const bool reuse_hand = adapters.hand.kind() == Kind::manifest;
        auto again = mask_and_crop(m.crop, frame_key, cfg, adapters, masking::ContourMode::max,
                                   reuse_product ? &m.product : nullptr, reuse_hand ? &m.hand : nullptr);
        out.push_back(again.empty() ? std::move(m.crop) : std::move(again.front().crop));
    }
    return out;
}

PipelineResult detect_video(const ingest::FrameSequence& seq, const PipelineConfig& cfg,
                            const Adapters& adapters)
{
    cfg.validate();
    PipelineResult r;
    r.metrics = signals::compute_frame_metrics(seq, cfg.preprocess, cfg.jobs);
    r.peak_series = r.metrics.series(cfg.peak_signal);
    if (cfg.smoothing.method == smoothing::Method::savgol &&
        r.peak_series.size() < static_cast<std::size_t>(cfg.smoothing.window))
        r.smoothed = r.peak_series;  // too short to smooth; keep raw values
    else if (cfg.smoothing.method == smoothing::Method::fft && r.peak_series.size() < 2)
        r.smoothed = r.peak_series;
    else
        r.smoothed = smoothing::smooth(r.peak_series, cfg.smoothing);
    r.peaks = smoothing::find_peaks(r.smoothed, cfg.min_prominence);

    std::vector<std::int64_t> peak_frames;
    for (const auto& p : r.peaks)
        peak_frames.push_back(p.frame_index);
    r.candidates = selection::select_candidates(r.metrics, peak_frames, cfg.selection);

    std::vector<const selection::CandidateFrame*> kept;
    for (const auto& c : r.candidates)
        if (c.kept)
            kept.push_back(&c);

    std::vector<std::vector<Detection>> per_candidate(kept.size());
    const unsigned jobs = adapters.reentrant() ? cfg.jobs : 1;
    parallel_for(kept.size(), jobs, [&](std::size_t i) {
        const auto& cand = *kept[i];
        const auto pos = seq.position_of(cand.frame_index);
        const std::string key = adapters::frame_key(seq.video_id(), cand.frame_index);
        try {
            const auto roi = ingest::roi_frame(seq.frame(*pos), cfg.preprocess);
            for (const auto& crop : candidate_crops(roi, key, cfg, adapters)) {
                const auto pred = adapters.classifier.predict(crop, key);
                if (pred)
                    per_candidate[i].push_back(
                        {seq.video_id(), pred->class_id, cand.frame_index, cand.time_s, pred->confidence});
            }
        } catch (const Error& e) {
            throw Error(fmt::format("video '{}' frame {}: {}", seq.video_id(), cand.frame_index, e.what()));
        }
    });
    for (auto& d : per_candidate)
        r.raw.insert(r.raw.end(), d.begin(), d.end());
    r.detections = cfg.dedupe ? dedupe(r.raw, cfg.dedupe_window_s) : r.raw;
    return r;
}

std::vector<Detection> run_pipeline(const ingest::FrameSequence& seq, const PipelineConfig& cfg,
                                    const Adapters& adapters)
{
    return detect_video(seq, cfg, adapters).raw;
}

std::vector<Detection> dedupe(const std::vector<Detection>& detections, double window_s)
{
    if (!(window_s >= 0.0))
        throw Error("dedupe window must be >= 0");
    for (std::size_t i = 1; i < detections.size(); ++i)
        if (detections[i].time_s < detections[i - 1].time_s)
            throw Error("dedupe expects detections sorted by time");
    std::map<std::pair<std::string, int>, double> anchor;
    std::vector<Detection> out;
    for (const auto& d : detections) {
        const auto key = std::make_pair(d.video_id, d.class_id);
        const auto it = anchor.find(key);
        if (it != anchor.end() && d.time_s - it->second <= window_s)
            continue;
        anchor[key] = d.time_s;
        out.push_back(d);
    }
    return out;
}

}  // namespace framesift::detect
