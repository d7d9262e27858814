#include "framesift/signals.hpp"

#include "framesift/parallel.hpp"

#include <fmt/format.h>

#include <cmath>

namespace framesift::signals {

namespace {

void require_gray(const FramePixels& img, const char* op)
{
    if (img.channels() != 1)
        throw Error(fmt::format("{} expects a single-channel image", op));
}

}  // namespace

void SignalSeries::validate() const
{
    if (frame_index.size() != values.size())
        throw Error("signal series index/value length mismatch");
    for (std::size_t i = 1; i < frame_index.size(); ++i)
        if (frame_index[i] <= frame_index[i - 1])
            throw Error("signal series frame indices not strictly increasing");
    for (double v : values)
        if (!std::isfinite(v))
            throw Error("signal series contains a non-finite value");
}

Histogram histogram(const FramePixels& gray)
{
    require_gray(gray, "histogram");
    Histogram h{};
    for (auto s : gray.samples())
        ++h[s];
    return h;
}

int otsu_threshold(const Histogram& hist)
{
    std::uint64_t n = 0;
    std::uint64_t sum = 0;
    int distinct = 0;
    int only = 0;
    for (int v = 0; v < 256; ++v) {
        n += hist[v];
        sum += hist[v] * static_cast<std::uint64_t>(v);
        if (hist[v] != 0) {
            ++distinct;
            only = v;
        }
    }
    if (n == 0)
        throw Error("otsu_threshold on an empty image");
    if (distinct == 1)
        return only;

    // Between-class variance up to the constant factor 1/N^2:
    // (S0*N - S*N0)^2 / (N0*N1). Built from exact integer class sums.
    const double total = static_cast<double>(n);
    const double total_sum = static_cast<double>(sum);
    std::uint64_t n0 = 0;
    std::uint64_t s0 = 0;
    double best = -1.0;
    int best_t = 0;
    for (int t = 0; t < 256; ++t) {
        n0 += hist[t];
        s0 += hist[t] * static_cast<std::uint64_t>(t);
        const std::uint64_t n1 = n - n0;
        double score = 0.0;
        if (n0 != 0 && n1 != 0) {
            const double diff = static_cast<double>(s0) * total - total_sum * static_cast<double>(n0);
            score = diff * diff / (static_cast<double>(n0) * static_cast<double>(n1));
        }
        if (score > best) {
            best = score;
            best_t = t;
        }
    }
    return best_t;
}

int otsu_threshold(const FramePixels& gray)
{
    return otsu_threshold(histogram(gray));
}

BinaryMask binarize_inverse(const FramePixels& gray, int thresh)
{
    require_gray(gray, "binarize_inverse");
    if (thresh < 0 || thresh > 255)
        throw Error(fmt::format("threshold {} outside [0,255]", thresh));
    BinaryMask mask(gray.width(), gray.height());
    const auto src = gray.samples();
    for (std::size_t i = 0; i < src.size(); ++i)
        mask.set(i, src[i] <= thresh);
    return mask;
}

double binarization_ratio(const FramePixels& gray)
{
    const auto hist = histogram(gray);
    const int t = otsu_threshold(hist);
    std::uint64_t on = 0;
    for (int v = 0; v <= t; ++v)
        on += hist[v];
    return static_cast<double>(on) / static_cast<double>(gray.pixel_count());
}

double colorfulness(const FramePixels& rgb)
{
    if (rgb.channels() != 3)
        throw Error("colorfulness expects a 3-channel image");
    // rg and 2*yb are integers, so the running sums are exact.
    std::int64_t sum_rg = 0, sum_rg2 = 0, sum_yb2x = 0, sum_yb2x2 = 0;
    const auto s = rgb.samples();
    for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
        const int r = s[3 * i], g = s[3 * i + 1], b = s[3 * i + 2];
        const std::int64_t rg = r - g;
        const std::int64_t yb2 = r + g - 2 * b;
        sum_rg += rg;
        sum_rg2 += rg * rg;
        sum_yb2x += yb2;
        sum_yb2x2 += yb2 * yb2;
    }
    const double n = static_cast<double>(rgb.pixel_count());
    const double mean_rg = static_cast<double>(sum_rg) / n;
    const double mean_yb = static_cast<double>(sum_yb2x) / (2.0 * n);
    const double var_rg = std::max(
        0.0, (static_cast<double>(sum_rg2) - static_cast<double>(sum_rg) * mean_rg) / n);
    const double var_yb = std::max(
        0.0, (static_cast<double>(sum_yb2x2) / 4.0 - static_cast<double>(sum_yb2x) / 2.0 * mean_yb) / n);
    const double sigma = std::sqrt(var_rg + var_yb);
    const double mu = std::sqrt(mean_rg * mean_rg + mean_yb * mean_yb);
    return sigma + 0.3 * mu;
}

namespace {

template <typename Sample>
double sobel_mean(const Sample* px, int width, int height)
{
    if (width < 3 || height < 3)
        throw Error(fmt::format("sharpness needs at least 3x3 pixels, got {}x{}", width, height));
    auto v = [&](int x, int y) { return static_cast<double>(px[static_cast<std::size_t>(y) * width + x]); };
    double acc = 0.0;
    for (int y = 1; y < height - 1; ++y) {
        for (int x = 1; x < width - 1; ++x) {
            const double gx = (v(x + 1, y - 1) + 2.0 * v(x + 1, y) + v(x + 1, y + 1)) -
                              (v(x - 1, y - 1) + 2.0 * v(x - 1, y) + v(x - 1, y + 1));
            const double gy = (v(x - 1, y + 1) + 2.0 * v(x, y + 1) + v(x + 1, y + 1)) -
                              (v(x - 1, y - 1) + 2.0 * v(x, y - 1) + v(x + 1, y - 1));
            acc += std::sqrt(gx * gx + gy * gy);
        }
    }
    return acc / (static_cast<double>(width - 2) * (height - 2));
}

}  // namespace

double sharpness(const FramePixels& gray)
{
    require_gray(gray, "sharpness");
    return sobel_mean(gray.samples().data(), gray.width(), gray.height());
}

double sharpness(std::span<const double> samples, int width, int height)
{
    if (samples.size() != static_cast<std::size_t>(width) * height)
        throw Error("sharpness: sample count does not match dimensions");
    return sobel_mean(samples.data(), width, height);
}

Metric parse_metric(std::string_view name)
{
    if (name == "binarization_ratio" || name == "binarization")
        return Metric::binarization_ratio;
    if (name == "colorfulness")
        return Metric::colorfulness;
    if (name == "sharpness")
        return Metric::sharpness;
    throw Error(fmt::format("unknown metric '{}'", name));
}

std::string_view to_string(Metric m)
{
    switch (m) {
    case Metric::binarization_ratio:
        return "binarization_ratio";
    case Metric::colorfulness:
        return "colorfulness";
    case Metric::sharpness:
        return "sharpness";
    }
    return "?";
}

FrameSignals measure(const FramePixels& preprocessed)
{
    FrameSignals out;
    const auto gray = ingest::to_grayscale(preprocessed);
    out.colorfulness = preprocessed.channels() == 3 ? colorfulness(preprocessed) : 0.0;
    out.b_ratio = binarization_ratio(gray);
    out.sharpness = sharpness(gray);
    return out;
}

SignalSeries FrameMetrics::series(Metric m) const
{
    SignalSeries s;
    s.video_id = video_id;
    s.frame_rate = frame_rate;
    s.frame_index = frame_index;
    switch (m) {
    case Metric::binarization_ratio:
        s.values = b_ratio;
        break;
    case Metric::colorfulness:
        s.values = colorfulness;
        break;
    case Metric::sharpness:
        s.values = sharpness;
        break;
    }
    return s;
}

FrameMetrics compute_frame_metrics(const ingest::FrameSequence& seq,
                                   const ingest::PreprocessSpec& preprocess, unsigned jobs)
{
    preprocess.validate();
    const std::size_t n = seq.size();
    FrameMetrics m;
    m.video_id = seq.video_id();
    m.frame_rate = seq.frame_rate();
    m.frame_index.resize(n);
    m.colorfulness.resize(n);
    m.b_ratio.resize(n);
    m.sharpness.resize(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        m.frame_index[i] = seq.frame_index(i);
        try {
            const auto s = measure(ingest::preprocess(seq.frame(i), preprocess));
            m.colorfulness[i] = s.colorfulness;
            m.b_ratio[i] = s.b_ratio;
            m.sharpness[i] = s.sharpness;
        } catch (const Error& e) {
            throw Error(fmt::format("frame {}: {}", seq.frame_index(i), e.what()));
        }
    });
    return m;
}

SignalSeries compute_series(const ingest::FrameSequence& seq, Metric metric,
                            const ingest::PreprocessSpec& preprocess, unsigned jobs)
{
    preprocess.validate();
    const std::size_t n = seq.size();
    SignalSeries s;
    s.video_id = seq.video_id();
    s.frame_rate = seq.frame_rate();
    s.frame_index.resize(n);
    s.values.resize(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        s.frame_index[i] = seq.frame_index(i);
        try {
            const auto px = ingest::preprocess(seq.frame(i), preprocess);
            switch (metric) {
            case Metric::colorfulness:
                s.values[i] = colorfulness(px);
                break;
            case Metric::binarization_ratio:
                s.values[i] = binarization_ratio(ingest::to_grayscale(px));
                break;
            case Metric::sharpness:
                s.values[i] = sharpness(ingest::to_grayscale(px));
                break;
            }
        } catch (const Error& e) {
            throw Error(fmt::format("frame {}: {}", seq.frame_index(i), e.what()));
        }
    });
    return s;
}

}  // namespace framesift::signals
