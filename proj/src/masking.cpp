#include "framesift/masking.hpp"

#include "framesift/ingest.hpp"
#include "framesift/signals.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <deque>

namespace framesift::masking {

void EntropySpec::validate() const
{
    if (radius < 1)
        throw Error("entropy radius must be >= 1");
    if (bins < 2 || bins > 256)
        throw Error("entropy bins must be in [2, 256]");
}

Binarize parse_binarize(std::string_view name)
{
    if (name == "otsu")
        return Binarize::otsu;
    if (name == "fixed")
        return Binarize::fixed;
    throw Error(fmt::format("unknown entropy binarization '{}'", name));
}

std::string_view to_string(Binarize b)
{
    return b == Binarize::otsu ? "otsu" : "fixed";
}

RealMap local_entropy(const FramePixels& gray, const EntropySpec& spec)
{
    spec.validate();
    if (gray.channels() != 1)
        throw Error("local_entropy expects a single-channel image");
    const int w = gray.width();
    const int h = gray.height();
    const int r = spec.radius;
    const int side = 2 * r + 1;

    std::vector<double> clog(static_cast<std::size_t>(side) * side + 1, 0.0);
    for (std::size_t c = 1; c < clog.size(); ++c)
        clog[c] = static_cast<double>(c) * std::log2(static_cast<double>(c));

    std::array<int, 256> bin_of{};
    for (int v = 0; v < 256; ++v)
        bin_of[v] = v * spec.bins / 256;

    const double max_entropy = std::log2(static_cast<double>(spec.bins));
    RealMap out{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
    std::vector<int> hist(spec.bins);

    for (int y = 0; y < h; ++y) {
        const int ya = std::max(0, y - r);
        const int yb = std::min(h - 1, y + r);
        std::fill(hist.begin(), hist.end(), 0);
        double s = 0.0;  // sum of c*log2(c) over bins
        int n = 0;
        auto add_column = [&](int x, int delta) {
            for (int yy = ya; yy <= yb; ++yy) {
                int& c = hist[bin_of[gray.at(x, yy)]];
                s -= clog[c];
                c += delta;
                s += clog[c];
            }
            n += delta * (yb - ya + 1);
        };
        for (int x = 0; x <= std::min(w - 1, r); ++x)
            add_column(x, +1);
        for (int x = 0; x < w; ++x) {
            const double e = std::log2(static_cast<double>(n)) - s / n;
            out.values[static_cast<std::size_t>(y) * w + x] = std::clamp(e, 0.0, max_entropy);
            if (x + 1 + r < w)
                add_column(x + 1 + r, +1);
            if (x - r >= 0)
                add_column(x - r, -1);
        }
    }
    // Round-off from the running sum can leave ~1e-13 residue on flat
    // regions; snap it to exact zero.
    for (auto& e : out.values)
        if (e < 1e-9)
            e = 0.0;
    return out;
}

BinaryMask entropy_mask(const FramePixels& gray, const EntropySpec& spec)
{
    const auto ent = local_entropy(gray, spec);
    BinaryMask mask(ent.width, ent.height);
    if (spec.binarize == Binarize::fixed) {
        for (std::size_t i = 0; i < ent.values.size(); ++i)
            mask.set(i, ent.values[i] > spec.fixed_threshold);
        return mask;
    }
    const double max_entropy = std::log2(static_cast<double>(spec.bins));
    FramePixels quant(ent.width, ent.height, 1);
    auto q = quant.samples();
    for (std::size_t i = 0; i < ent.values.size(); ++i)
        q[i] = saturate_u8(ent.values[i] / max_entropy * 255.0);
    const int t = signals::otsu_threshold(quant);
    for (std::size_t i = 0; i < q.size(); ++i)
        mask.set(i, q[i] > t);
    return mask;
}

BinaryMask combine_masks(const BinaryMask& product, const BinaryMask& hand, const BinaryMask& entropy)
{
    if (!product.same_shape(hand) || !product.same_shape(entropy))
        throw Error(fmt::format("mask dimension mismatch: product {}x{}, hand {}x{}, entropy {}x{}",
                                product.width(), product.height(), hand.width(), hand.height(),
                                entropy.width(), entropy.height()));
    BinaryMask out(product.width(), product.height());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.set(i, product[i] && !hand[i] && entropy[i]);
    return out;
}

namespace {

// Clockwise with y pointing down, starting east.
constexpr std::array<Point, 8> kDirs{{{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

int dir_index(Point from, Point to)
{
    const Point d{to.x - from.x, to.y - from.y};
    for (int i = 0; i < 8; ++i)
        if (kDirs[i] == d)
            return i;
    return -1;
}

std::vector<Point> moore_trace(const Labels& labels, int id, Point start)
{
    auto inside = [&](Point p) {
        return p.x >= 0 && p.y >= 0 && p.x < labels.width && p.y < labels.height &&
               labels.ids[static_cast<std::size_t>(p.y) * labels.width + p.x] == id;
    };
    // One clockwise step from p, searching after the backtrack pixel.
    // Returns false for an isolated pixel.
    auto step = [&](Point& p, Point& back) {
        const int k = dir_index(p, back);
        for (int i = 1; i <= 8; ++i) {
            const Point& d = kDirs[(k + i) % 8];
            const Point c{p.x + d.x, p.y + d.y};
            if (inside(c)) {
                const Point& pd = kDirs[(k + i - 1) % 8];
                back = Point{p.x + pd.x, p.y + pd.y};
                p = c;
                return true;
            }
        }
        return false;
    };

    std::vector<Point> path{start};
    Point p = start;
    Point back{start.x - 1, start.y};  // start is topmost-leftmost, so west is outside
    if (!step(p, back))
        return path;
    const Point second = p;
    // Stop once the trace leaves the start pixel towards the same second
    // pixel again; start may be passed several times on thin shapes.
    const std::size_t limit = 4 * static_cast<std::size_t>(labels.width) * labels.height + 8;
    while (path.size() < limit) {
        const Point here = p;
        path.push_back(here);
        step(p, back);
        if (here == start && p == second) {
            path.pop_back();
            break;
        }
    }
    return path;
}

}  // namespace

Labels label_components(const BinaryMask& mask)
{
    Labels labels{mask.width(), mask.height(), 0, std::vector<int>(mask.size(), 0)};
    std::deque<Point> queue;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            const auto idx = static_cast<std::size_t>(y) * mask.width() + x;
            if (!mask[idx] || labels.ids[idx] != 0)
                continue;
            const int id = ++labels.count;
            labels.ids[idx] = id;
            queue.push_back({x, y});
            while (!queue.empty()) {
                const Point p = queue.front();
                queue.pop_front();
                for (const auto& d : kDirs) {
                    const Point q{p.x + d.x, p.y + d.y};
                    if (q.x < 0 || q.y < 0 || q.x >= mask.width() || q.y >= mask.height())
                        continue;
                    const auto qi = static_cast<std::size_t>(q.y) * mask.width() + q.x;
                    if (mask[qi] && labels.ids[qi] == 0) {
                        labels.ids[qi] = id;
                        queue.push_back(q);
                    }
                }
            }
        }
    }
    return labels;
}

std::vector<Contour> find_contours(const BinaryMask& mask)
{
    const auto labels = label_components(mask);
    std::vector<Contour> contours(static_cast<std::size_t>(labels.count));
    std::vector<bool> seen(contours.size(), false);
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            const int id = labels.ids[static_cast<std::size_t>(y) * labels.width + x];
            if (id == 0)
                continue;
            auto& c = contours[static_cast<std::size_t>(id - 1)];
            if (!seen[static_cast<std::size_t>(id - 1)]) {
                seen[static_cast<std::size_t>(id - 1)] = true;
                c.region_id = id;
                c.x0 = c.x1 = x;
                c.y0 = c.y1 = y;
                c.boundary = moore_trace(labels, id, {x, y});
            }
            ++c.area;
            c.x0 = std::min(c.x0, x);
            c.x1 = std::max(c.x1, x);
            c.y1 = std::max(c.y1, y);
        }
    }
    return contours;
}

ContourMode parse_contour_mode(std::string_view name)
{
    if (name == "max")
        return ContourMode::max;
    if (name == "rms")
        return ContourMode::rms;
    throw Error(fmt::format("unknown contour mode '{}'", name));
}

std::string_view to_string(ContourMode m)
{
    return m == ContourMode::max ? "max" : "rms";
}

std::vector<Contour> select_contours(const std::vector<Contour>& contours, ContourMode mode)
{
    if (contours.empty())
        return {};
    auto largest = [&] {
        const Contour* best = &contours.front();
        for (const auto& c : contours)
            if (c.area > best->area || (c.area == best->area && c.region_id < best->region_id))
                best = &c;
        return std::vector<Contour>{*best};
    };
    if (mode == ContourMode::max)
        return largest();

    double sum_sq = 0.0;
    for (const auto& c : contours)
        sum_sq += static_cast<double>(c.area) * static_cast<double>(c.area);
    const double rms = std::sqrt(sum_sq / static_cast<double>(contours.size()));
    std::vector<Contour> out;
    for (const auto& c : contours)
        if (static_cast<double>(c.area) > rms)
            out.push_back(c);
    if (out.empty())
        return largest();
    return out;
}

Rect contour_rect(const Contour& contour, int pad, int frame_width, int frame_height)
{
    if (pad < 0)
        throw Error("crop pad must be >= 0");
    const int x0 = std::max(0, contour.x0 - pad);
    const int y0 = std::max(0, contour.y0 - pad);
    const int x1 = std::min(frame_width - 1, contour.x1 + pad);
    const int y1 = std::min(frame_height - 1, contour.y1 + pad);
    return Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

FramePixels crop_to_contour(const FramePixels& frame, const Contour& contour, int pad)
{
    if (contour.x0 < 0 || contour.y0 < 0 || contour.x1 >= frame.width() || contour.y1 >= frame.height() ||
        contour.x0 > contour.x1 || contour.y0 > contour.y1)
        throw Error("contour bounding box outside frame");
    return ingest::crop(frame, contour_rect(contour, pad, frame.width(), frame.height()));
}

}  // namespace framesift::masking
