#include "framesift/selection.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace framesift::selection {

void SelectionSpec::validate() const
{
    if (step < 1)
        throw Error("selection.step must be >= 1");
    if (count < 1)
        throw Error("selection.count must be >= 1");
    if (sharpness_threshold < 0.0 || cbt_threshold < 0.0)
        throw Error("selection thresholds must be >= 0");
}

double cbt_metric(double c_ratio, double b_ratio)
{
    if (c_ratio < 0.0 || b_ratio < 0.0)
        throw Error(fmt::format("cbt_metric needs non-negative inputs, got ({}, {})", c_ratio, b_ratio));
    return c_ratio * std::sqrt(b_ratio);
}

std::vector<int> refinement_offsets(int step, int count)
{
    std::vector<int> out;
    const int lo = -(count / 2);
    for (int k = lo; k < lo + count; ++k)
        out.push_back(k * step);
    return out;
}

std::size_t refine_by_sharpness(std::size_t peak_pos, std::span<const double> sharpness, int step,
                                int count)
{
    if (step < 1 || count < 1)
        throw Error("refinement step and count must be >= 1");
    if (peak_pos >= sharpness.size())
        throw Error(fmt::format("peak position {} outside sequence of {}", peak_pos, sharpness.size()));
    std::size_t best = peak_pos;
    double best_value = sharpness[peak_pos];
    for (int off : refinement_offsets(step, count)) {
        const auto pos = static_cast<std::int64_t>(peak_pos) + off;
        if (pos < 0 || pos >= static_cast<std::int64_t>(sharpness.size()) || off == 0)
            continue;
        const double v = sharpness[static_cast<std::size_t>(pos)];
        // Offsets are visited in increasing order, so strict > keeps the peak
        // on ties and otherwise the smallest position.
        if (v > best_value) {
            best = static_cast<std::size_t>(pos);
            best_value = v;
        }
    }
    return best;
}

std::int64_t refine_by_sharpness(std::int64_t peak, const ingest::FrameSequence& seq,
                                 const ingest::PreprocessSpec& preprocess, int step, int count)
{
    const auto pos = seq.position_of(peak);
    if (!pos)
        throw Error(fmt::format("peak frame {} not in sequence", peak));
    std::vector<double> sharp(seq.size(), 0.0);
    for (int off : refinement_offsets(step, count)) {
        const auto p = static_cast<std::int64_t>(*pos) + off;
        if (p < 0 || p >= static_cast<std::int64_t>(seq.size()))
            continue;
        const auto px = ingest::preprocess(seq.frame(static_cast<std::size_t>(p)), preprocess);
        sharp[static_cast<std::size_t>(p)] = signals::sharpness(ingest::to_grayscale(px));
    }
    // Positions outside the window stay at 0 and are never visited.
    return seq.frame_index(refine_by_sharpness(*pos, sharp, step, count));
}

std::vector<CandidateFrame> select_candidates(const signals::FrameMetrics& metrics,
                                              std::span<const std::int64_t> peaks,
                                              const SelectionSpec& spec)
{
    spec.validate();
    std::set<std::int64_t> unique(peaks.begin(), peaks.end());
    std::set<std::size_t> refined;
    for (auto peak : unique) {
        auto it = std::lower_bound(metrics.frame_index.begin(), metrics.frame_index.end(), peak);
        if (it == metrics.frame_index.end() || *it != peak)
            throw Error(fmt::format("peak frame {} not in sequence", peak));
        const auto pos = static_cast<std::size_t>(it - metrics.frame_index.begin());
        refined.insert(spec.refine ? refine_by_sharpness(pos, metrics.sharpness, spec.step, spec.count)
                                   : pos);
    }
    std::vector<CandidateFrame> out;
    out.reserve(refined.size());
    for (auto pos : refined) {
        CandidateFrame c;
        c.frame_index = metrics.frame_index[pos];
        c.time_s = static_cast<double>(c.frame_index) / metrics.frame_rate;
        c.c_ratio = metrics.colorfulness[pos];
        c.b_ratio = metrics.b_ratio[pos];
        c.sharpness = metrics.sharpness[pos];
        c.cbt_value = cbt_metric(c.c_ratio, c.b_ratio);
        const bool sharp_ok = spec.sharpness_threshold <= 0.0 || c.sharpness > spec.sharpness_threshold;
        const bool cbt_ok = spec.cbt_threshold <= 0.0 || c.cbt_value > spec.cbt_threshold;
        c.kept = sharp_ok && cbt_ok;
        out.push_back(c);
    }
    return out;
}

std::vector<CandidateFrame> select_candidates(const ingest::FrameSequence& seq,
                                              std::span<const std::int64_t> peaks,
                                              const ingest::PreprocessSpec& preprocess,
                                              const SelectionSpec& spec, unsigned jobs)
{
    return select_candidates(signals::compute_frame_metrics(seq, preprocess, jobs), peaks, spec);
}

}  // namespace framesift::selection
