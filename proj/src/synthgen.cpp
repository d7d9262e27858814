#include "framesift/synthgen.hpp"

#include "framesift/adapters.hpp"
#include "framesift/csv.hpp"
#include "framesift/image_io.hpp"
#include "framesift/ingest.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace framesift::synthgen {

namespace fs = std::filesystem;

namespace {

constexpr Rgb kSurround{110, 110, 110};
constexpr Rgb kTray{232, 230, 226};
constexpr Rgb kHand{150, 150, 150};
constexpr std::size_t kNoiseSlack = 1 << 16;

Rect tray_rect(int w, int h)
{
    const int x0 = static_cast<int>(std::floor(0.06 * w));
    const int y0 = static_cast<int>(std::floor(0.05 * h));
    const int x1 = static_cast<int>(std::ceil(0.94 * w));
    const int y1 = static_cast<int>(std::ceil(0.95 * h));
    return {x0, y0, x1 - x0, y1 - y0};
}

Rect intersect(const Rect& a, const Rect& b)
{
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.x + a.width, b.x + b.width);
    const int y1 = std::min(a.y + a.height, b.y + b.height);
    if (x1 <= x0 || y1 <= y0)
        return {};
    return {x0, y0, x1 - x0, y1 - y0};
}

// Times of one pass: [start, start + duration]. Travel covers the distance
// between off-screen and the rest position.
struct PassTiming {
    double duration = 0.0;
    double travel = 0.0;
};

PassTiming pass_timing(const ScenarioSpec& s, const EventSpec& e)
{
    PassTiming p;
    p.duration = (e.exit_t - e.enter_t - (e.passes - 1) * e.gap_s) / e.passes;
    p.travel = (s.width + e.width) / (2.0 * e.speed);
    return p;
}

Rgb parse_rgb(const std::string& s)
{
    std::istringstream in(s);
    int r, g, b;
    if (!(in >> r >> g >> b) || r < 0 || g < 0 || b < 0 || r > 255 || g > 255 || b > 255)
        throw Error(fmt::format("invalid color '{}'", s));
    return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

bool parse_bool(const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw Error(fmt::format("not a boolean: '{}'", v));
}

void box_blur_rows(FramePixels& img, const Rect& region, int length)
{
    if (length < 2 || region.width <= 0 || region.height <= 0)
        return;
    const int ch = img.channels();
    const int lo = -(length / 2);
    std::vector<double> prefix(static_cast<std::size_t>(region.width) + 1);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(region.width));
    for (int y = region.y; y < region.y + region.height; ++y) {
        for (int c = 0; c < ch; ++c) {
            prefix[0] = 0.0;
            for (int i = 0; i < region.width; ++i)
                prefix[i + 1] = prefix[i] + img.at(region.x + i, y, c);
            for (int i = 0; i < region.width; ++i) {
                const int a = std::clamp(i + lo, 0, region.width - 1);
                const int b = std::clamp(i + lo + length - 1, 0, region.width - 1);
                row[i] = saturate_u8((prefix[b + 1] - prefix[a]) / (b - a + 1));
            }
            for (int i = 0; i < region.width; ++i)
                img.at(region.x + i, y, c) = row[i];
        }
    }
}

}  // namespace

int ScenarioSpec::frame_count() const
{
    return static_cast<int>(std::floor(duration_s * frame_rate + 1e-9));
}

void ScenarioSpec::validate() const
{
    if (width < 16 || height < 16)
        throw Error("scenario frame must be at least 16x16");
    if (!(frame_rate > 0.0) || !(duration_s > 0.0))
        throw Error("scenario frame_rate and duration_s must be positive");
    if (noise < 0.0 || blur < 0.0)
        throw Error("scenario noise and blur must be >= 0");
    if (format != "png" && format != "ppm")
        throw Error(fmt::format("unsupported frame format '{}'", format));
    ingest::roi_rect(width, height, roi_crop_fraction);
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (e.class_id < 1 || e.class_id > adapters::kNumClasses)
            throw Error(fmt::format("event {}: class id outside 1..116", i + 1));
        if (!(e.enter_t >= 0.0 && e.enter_t < e.exit_t && e.exit_t <= duration_s))
            throw Error(fmt::format("event {}: need 0 <= enter_t < exit_t <= duration", i + 1));
        if (e.width < 4 || e.height < 4 || e.width > width || e.height > height)
            throw Error(fmt::format("event {}: object size out of range", i + 1));
        if (!(e.speed > 0.0) || e.passes < 1 || e.gap_s < 0.0 || e.texture < 0.0 || e.texture_cell < 1)
            throw Error(fmt::format("event {}: invalid motion parameters", i + 1));
        const auto p = pass_timing(*this, e);
        if (p.duration < 2.0 * p.travel)
            throw Error(fmt::format("event {}: window too short for {} pass(es) at speed {}", i + 1,
                                    e.passes, e.speed));
        for (std::size_t j = 0; j < i; ++j) {
            const auto& o = events[j];
            if (o.class_id == e.class_id && e.enter_t < o.exit_t && o.enter_t < e.exit_t)
                throw Error(fmt::format("events {} and {} of class {} overlap in time", j + 1, i + 1,
                                        e.class_id));
        }
    }
}

ScenarioSpec default_scenario()
{
    ScenarioSpec s;
    auto ev = [](int cls, double a, double b, Rgb color) {
        EventSpec e;
        e.class_id = cls;
        e.enter_t = a;
        e.exit_t = b;
        e.color = color;
        return e;
    };
    s.events = {
        ev(7, 1.0, 5.0, {205, 40, 45}),
        ev(23, 6.5, 10.5, {40, 80, 200}),
        ev(42, 12.0, 16.0, {45, 170, 60}),
        ev(68, 17.5, 21.5, {230, 150, 20}),
        ev(101, 23.5, 28.0, {140, 50, 170}),
    };
    return s;
}

ScenarioSpec duplicate_prone_scenario()
{
    ScenarioSpec s = default_scenario();
    s.video_id = "synthdup";
    s.seed = 2;
    for (std::size_t i : {0u, 2u, 4u}) {
        s.events[i].passes = 2;
        s.events[i].gap_s = 1.0;
    }
    s.events[0].exit_t = 5.5;
    s.events[2].exit_t = 16.5;
    s.events[4].exit_t = 28.5;
    return s;
}

ScenarioSpec load_scenario(const fs::path& ini)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(ini.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(fmt::format("scenario '{}': {}", ini.string(), e.what()));
    }
    ScenarioSpec s;
    for (const auto& [section, body] : tree) {
        if (section == "scenario") {
            for (const auto& [key, node] : body) {
                const auto v = node.get_value<std::string>();
                if (key == "video_id") s.video_id = v;
                else if (key == "width") s.width = static_cast<int>(csv::to_int(v));
                else if (key == "height") s.height = static_cast<int>(csv::to_int(v));
                else if (key == "frame_rate") s.frame_rate = csv::to_double(v);
                else if (key == "duration_s") s.duration_s = csv::to_double(v);
                else if (key == "noise") s.noise = csv::to_double(v);
                else if (key == "blur") s.blur = csv::to_double(v);
                else if (key == "seed") s.seed = static_cast<std::uint64_t>(csv::to_int(v));
                else if (key == "roi_crop_fraction") s.roi_crop_fraction = csv::to_double(v);
                else if (key == "hands") s.hands = parse_bool(v);
                else if (key == "format") s.format = v;
                else if (key == "masks") s.masks = parse_bool(v);
                else throw Error(fmt::format("scenario '{}': unknown key '{}'", ini.string(), key));
            }
        } else if (section.rfind("event", 0) == 0) {
            EventSpec e;
            for (const auto& [key, node] : body) {
                const auto v = node.get_value<std::string>();
                if (key == "class_id") e.class_id = static_cast<int>(csv::to_int(v));
                else if (key == "enter_t") e.enter_t = csv::to_double(v);
                else if (key == "exit_t") e.exit_t = csv::to_double(v);
                else if (key == "color") e.color = parse_rgb(v);
                else if (key == "texture") e.texture = csv::to_double(v);
                else if (key == "texture_cell") e.texture_cell = static_cast<int>(csv::to_int(v));
                else if (key == "speed") e.speed = csv::to_double(v);
                else if (key == "passes") e.passes = static_cast<int>(csv::to_int(v));
                else if (key == "gap_s") e.gap_s = csv::to_double(v);
                else if (key == "width") e.width = static_cast<int>(csv::to_int(v));
                else if (key == "height") e.height = static_cast<int>(csv::to_int(v));
                else if (key == "y_offset") e.y_offset = static_cast<int>(csv::to_int(v));
                else throw Error(fmt::format("scenario '{}': unknown event key '{}'", ini.string(), key));
            }
            s.events.push_back(e);
        } else {
            throw Error(fmt::format("scenario '{}': unknown section '{}'", ini.string(), section));
        }
    }
    s.validate();
    return s;
}

std::string to_ini(const ScenarioSpec& s)
{
    std::string out = "[scenario]\n";
    out += fmt::format("video_id = {}\nwidth = {}\nheight = {}\nframe_rate = {}\nduration_s = {}\n",
                       s.video_id, s.width, s.height, csv::num(s.frame_rate), csv::num(s.duration_s));
    out += fmt::format("noise = {}\nblur = {}\nseed = {}\nroi_crop_fraction = {}\n", csv::num(s.noise),
                       csv::num(s.blur), s.seed, csv::num(s.roi_crop_fraction));
    out += fmt::format("hands = {}\nformat = {}\nmasks = {}\n", s.hands, s.format, s.masks);
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        const auto& e = s.events[i];
        out += fmt::format("\n[event.{}]\nclass_id = {}\nenter_t = {}\nexit_t = {}\n", i + 1, e.class_id,
                           csv::num(e.enter_t), csv::num(e.exit_t));
        out += fmt::format("color = {} {} {}\ntexture = {}\ntexture_cell = {}\nspeed = {}\npasses = {}\ngap_s = {}\n",
                           e.color[0], e.color[1], e.color[2], csv::num(e.texture), e.texture_cell,
                           csv::num(e.speed),
                           e.passes, csv::num(e.gap_s));
        out += fmt::format("width = {}\nheight = {}\ny_offset = {}\n", e.width, e.height, e.y_offset);
    }
    return out;
}

Renderer::Renderer(ScenarioSpec spec) : spec_(std::move(spec))
{
    spec_.validate();
    roi_ = ingest::roi_rect(spec_.width, spec_.height, spec_.roi_crop_fraction);

    background_ = FramePixels(spec_.width, spec_.height, 3);
    const Rect tray = tray_rect(spec_.width, spec_.height);
    for (int y = 0; y < spec_.height; ++y)
        for (int x = 0; x < spec_.width; ++x) {
            const bool on_tray = x >= tray.x && x < tray.x + tray.width && y >= tray.y &&
                                 y < tray.y + tray.height;
            const Rgb& c = on_tray ? kTray : kSurround;
            for (int k = 0; k < 3; ++k)
                background_.at(x, y, k) = c[k];
        }

    for (std::size_t i = 0; i < spec_.events.size(); ++i) {
        const auto& e = spec_.events[i];
        std::mt19937_64 rng(spec_.seed * 1000003u + i);
        std::uniform_real_distribution<double> tex(-e.texture, e.texture);
        FramePixels sprite(e.width, e.height, 3);
        const int cell = e.texture_cell;
        const int cols = (e.width + cell - 1) / cell;
        std::vector<double> offsets(static_cast<std::size_t>(cols) * ((e.height + cell - 1) / cell));
        for (auto& o : offsets)
            o = tex(rng);
        for (int y = 0; y < e.height; ++y)
            for (int x = 0; x < e.width; ++x) {
                const double t = offsets[static_cast<std::size_t>(y / cell) * cols + x / cell];
                for (int k = 0; k < 3; ++k)
                    sprite.at(x, y, k) = saturate_u8(e.color[k] + t);
            }
        sprites_.push_back(std::move(sprite));
    }

    const std::size_t n = static_cast<std::size_t>(spec_.width) * spec_.height * 3 + kNoiseSlack;
    noise_pool_.resize(n);
    if (spec_.noise > 0.0) {
        std::mt19937_64 rng(spec_.seed ^ 0x5eedf00dULL);
        std::normal_distribution<double> gauss(0.0, spec_.noise);
        for (auto& v : noise_pool_)
            v = static_cast<std::int8_t>(std::clamp(std::round(gauss(rng)), -127.0, 127.0));
    }
}

std::optional<Rect> Renderer::object_rect(std::size_t idx, double t) const
{
    const auto& e = spec_.events.at(idx);
    if (t < e.enter_t || t > e.exit_t)
        return std::nullopt;
    const auto p = pass_timing(spec_, e);
    const double period = p.duration + e.gap_s;
    const int pass = std::min(e.passes - 1, static_cast<int>(std::floor((t - e.enter_t) / period)));
    const double local = t - e.enter_t - pass * period;
    if (local > p.duration)
        return std::nullopt;  // resting off-screen between passes
    const int dir = pass % 2 == 0 ? 1 : -1;
    const double rest_x = (spec_.width - e.width) / 2.0;
    const double start_x = dir > 0 ? -static_cast<double>(e.width) : static_cast<double>(spec_.width);
    double x = rest_x;
    if (local < p.travel)
        x = start_x + dir * e.speed * local;
    else if (local > p.duration - p.travel)
        x = rest_x + dir * e.speed * (local - (p.duration - p.travel));
    const int xi = static_cast<int>(std::lround(x));
    const int yi = (spec_.height - e.height) / 2 + e.y_offset;
    if (xi + e.width <= 0 || xi >= spec_.width)
        return std::nullopt;
    return Rect{xi, yi, e.width, e.height};
}

double Renderer::velocity(std::size_t idx, double t) const
{
    const auto& e = spec_.events.at(idx);
    if (t < e.enter_t || t > e.exit_t)
        return 0.0;
    const auto p = pass_timing(spec_, e);
    const double period = p.duration + e.gap_s;
    const int pass = std::min(e.passes - 1, static_cast<int>(std::floor((t - e.enter_t) / period)));
    const double local = t - e.enter_t - pass * period;
    if (local > p.duration || (local >= p.travel && local <= p.duration - p.travel))
        return 0.0;
    return (pass % 2 == 0 ? 1.0 : -1.0) * e.speed;
}

std::vector<std::pair<std::size_t, int>> Renderer::present(int frame) const
{
    const double t = frame / spec_.frame_rate;
    std::vector<std::pair<std::size_t, int>> out;
    for (std::size_t i = 0; i < spec_.events.size(); ++i) {
        const auto r = object_rect(i, t);
        if (!r)
            continue;
        const Rect in = intersect(*r, roi_);
        if (in.width > 0)
            out.emplace_back(i, in.width * in.height);
    }
    return out;
}

FramePixels Renderer::render(int frame) const
{
    FramePixels img = background_;
    const Rect full{0, 0, spec_.width, spec_.height};
    const double t = frame / spec_.frame_rate;
    for (std::size_t i = 0; i < spec_.events.size(); ++i) {
        const auto r = object_rect(i, t);
        if (!r)
            continue;
        Rect blur_region = *r;
        if (spec_.hands) {
            // Flat gray ellipse under the lower edge, as if holding the item.
            const double cx = r->x + r->width / 2.0;
            const double cy = r->y + r->height;
            const double ax = r->width * 0.3;
            const double ay = r->height * 0.3;
            for (int y = static_cast<int>(cy - ay); y <= static_cast<int>(cy + ay); ++y)
                for (int x = static_cast<int>(cx - ax); x <= static_cast<int>(cx + ax); ++x) {
                    if (x < 0 || y < 0 || x >= spec_.width || y >= spec_.height)
                        continue;
                    const double u = (x - cx) / ax, v = (y - cy) / ay;
                    if (u * u + v * v <= 1.0)
                        for (int k = 0; k < 3; ++k)
                            img.at(x, y, k) = kHand[k];
                }
            blur_region.height += static_cast<int>(ay) + 1;
        }
        const Rect vis = intersect(*r, full);
        const auto& sprite = sprites_[i];
        for (int y = vis.y; y < vis.y + vis.height; ++y)
            for (int x = vis.x; x < vis.x + vis.width; ++x)
                for (int k = 0; k < 3; ++k)
                    img.at(x, y, k) = sprite.at(x - r->x, y - r->y, k);

        const double v = velocity(i, t);
        const int length = static_cast<int>(std::lround(spec_.blur * std::abs(v) / spec_.frame_rate));
        if (length >= 2) {
            blur_region.x -= length;
            blur_region.width += 2 * length;
            box_blur_rows(img, intersect(blur_region, full), length);
        }
    }
    if (spec_.noise > 0.0) {
        std::mt19937_64 rng(spec_.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(frame));
        const std::size_t offset = rng() % kNoiseSlack;
        auto s = img.samples();
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = static_cast<std::uint8_t>(std::clamp(s[i] + noise_pool_[offset + i], 0, 255));
    }
    return img;
}

std::vector<evaluation::GroundTruthEvent> ground_truth(const Renderer& renderer)
{
    const auto& s = renderer.spec();
    std::vector<int> first(s.events.size(), -1), last(s.events.size(), -1);
    for (int f = 0; f < s.frame_count(); ++f)
        for (const auto& [e, area] : renderer.present(f)) {
            if (first[e] < 0)
                first[e] = f;
            last[e] = f;
        }
    std::vector<evaluation::GroundTruthEvent> gt;
    for (std::size_t e = 0; e < s.events.size(); ++e) {
        if (first[e] < 0)
            continue;  // never reached the ROI
        gt.push_back({s.video_id, s.events[e].class_id, first[e] / s.frame_rate, last[e] / s.frame_rate});
    }
    std::stable_sort(gt.begin(), gt.end(),
                     [](const auto& a, const auto& b) { return a.t_start < b.t_start; });
    return gt;
}

Output generate(const ScenarioSpec& spec, const fs::path& out_dir)
{
    Renderer renderer(spec);
    Output out;
    out.frames_dir = out_dir / spec.video_id;
    out.gt_csv = out_dir / "gt.csv";
    out.labels_csv = out_dir / "labels.csv";
    std::error_code ec;
    fs::create_directories(out.frames_dir, ec);
    if (ec)
        throw Error(fmt::format("cannot create '{}': {}", out.frames_dir.string(), ec.message()));

    std::ofstream labels(out.labels_csv);
    std::ofstream masks_csv;
    if (!labels)
        throw Error(fmt::format("cannot write '{}'", out.labels_csv.string()));
    labels << "frame_key,class_id\n";
    const Rect roi = ingest::roi_rect(spec.width, spec.height, spec.roi_crop_fraction);
    if (spec.masks) {
        fs::create_directories(out_dir / "masks");
        out.masks_csv = out_dir / "masks.csv";
        masks_csv.open(out.masks_csv);
        masks_csv << "frame_key,path\n";
    }

    for (int f = 0; f < spec.frame_count(); ++f) {
        const auto img = renderer.render(f);
        const auto name = fmt::format("{:06d}.{}", f, spec.format);
        if (spec.format == "png")
            write_png(out.frames_dir / name, img, 1);
        else
            write_ppm(out.frames_dir / name, img);

        const auto key = adapters::frame_key(spec.video_id, f);
        const auto present = renderer.present(f);
        if (!present.empty()) {
            const auto best = std::max_element(present.begin(), present.end(),
                                               [](const auto& a, const auto& b) { return a.second < b.second; });
            labels << key << ',' << spec.events[best->first].class_id << '\n';
        }
        if (spec.masks) {
            BinaryMask m(roi.width, roi.height);
            const double t = f / spec.frame_rate;
            for (std::size_t e = 0; e < spec.events.size(); ++e) {
                const auto r = renderer.object_rect(e, t);
                if (!r)
                    continue;
                const Rect in = intersect(*r, roi);
                for (int y = in.y; y < in.y + in.height; ++y)
                    for (int x = in.x; x < in.x + in.width; ++x)
                        m.set(x - roi.x, y - roi.y, true);
            }
            const auto mask_name = fmt::format("masks/{:06d}.png", f);
            write_mask_png(out_dir / mask_name, m);
            masks_csv << key << ',' << mask_name << '\n';
        }
    }

    out.gt = ground_truth(renderer);
    std::ofstream gt(out.gt_csv);
    gt << "video_id,class_id,t_start,t_end\n";
    for (const auto& e : out.gt)
        gt << e.video_id << ',' << e.class_id << ',' << csv::num(e.t_start) << ',' << csv::num(e.t_end) << '\n';
    std::ofstream(out_dir / "scenario.ini") << to_ini(spec);
    return out;
}

}  // namespace framesift::synthgen
