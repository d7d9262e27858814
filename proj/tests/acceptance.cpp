// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include "framesift/config.hpp"
#include "framesift/datasetprep.hpp"
#include "framesift/detect.hpp"
#include "framesift/evaluation.hpp"
#include "framesift/masking.hpp"
#include "framesift/selection.hpp"
#include "framesift/signals.hpp"
#include "framesift/smoothing.hpp"
#include "framesift/synthgen.hpp"

#include "oracles.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>

using namespace framesift;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = FRAMESIFT_SOURCE_DIR;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

FramePixels uniform_rgb(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b)
{
    FramePixels f(w, h, 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            f.at(x, y, 0) = r;
            f.at(x, y, 1) = g;
            f.at(x, y, 2) = b;
        }
    return f;
}

signals::SignalSeries series_of(std::vector<double> v)
{
    signals::SignalSeries s{"acc", 30.0, {}, std::move(v)};
    for (std::size_t i = 0; i < s.values.size(); ++i)
        s.frame_index.push_back(static_cast<std::int64_t>(i));
    return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = a.size() == b.size() ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

Outcome colorfulness_values()
{
    Outcome o;
    const auto t0 = Clock::now();
    const double gray = signals::colorfulness(uniform_rgb(32, 32, 128, 128, 128));
    const double red = signals::colorfulness(uniform_rgb(32, 32, 255, 0, 0));
    const double yellow = signals::colorfulness(uniform_rgb(32, 32, 255, 255, 0));
    // Uniform images have zero spread, so the value is 0.3 * |(mean rg, mean yb)|.
    // red: rg = 255, yb = 127.5; yellow: rg = 0, yb = 0.5 * (255 + 255) - 0 = 255.
    const double red_hand = 0.3 * std::hypot(255.0, 127.5);
    const double yellow_hand = 0.3 * 255.0;
    o.require(gray == 0.0, fmt::format("gray {}", gray));
    o.require(std::abs(red - 85.5296) <= 1e-3 && std::abs(red - red_hand) <= 1e-9, fmt::format("red {}", red));
    o.require(std::abs(yellow - yellow_hand) <= 1e-3, fmt::format("yellow {}", yellow));
    const double dt = seconds_since(t0);
    o.require(dt < 1.0, fmt::format("took {:.3f}s", dt));
    o.detail = o.pass ? fmt::format("gray 0, red {:.4f}, yellow {:.4f} (rg 0, yb 255), {:.3f}s", red, yellow, dt)
                      : o.detail;
    return o;
}

Outcome otsu_oracle()
{
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1001);
    int mismatches = 0;
    for (int i = 0; i < 50; ++i) {
        const auto img = oracle::random_gray(rng, 16, 16, 0, 255);
        mismatches += signals::otsu_threshold(img) != oracle::otsu(img);
    }
    const double dt = seconds_since(t0);
    o.require(mismatches == 0, fmt::format("{} of 50 thresholds differ", mismatches));
    o.require(dt < 1.0, fmt::format("took {:.3f}s", dt));
    if (o.pass)
        o.detail = fmt::format("50/50 exact, {:.3f}s", dt);
    return o;
}

Outcome savgol_polynomials()
{
    Outcome o;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    double worst = 0.0;
    int cases = 0;
    for (const auto& [window, order] : std::vector<std::pair<int, int>>{{5, 2}, {7, 3}, {11, 2}, {9, 4}}) {
        for (int degree = 0; degree <= order; ++degree)
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<double> c(static_cast<std::size_t>(degree) + 1);
                for (auto& v : c)
                    v = coef(rng);
                std::vector<double> y(60);
                for (std::size_t i = 0; i < y.size(); ++i) {
                    const double x = (static_cast<double>(i) - 30.0) / 30.0;
                    double acc = 0.0;
                    for (int k = degree; k >= 0; --k)
                        acc = acc * x + c[static_cast<std::size_t>(k)];
                    y[i] = acc;
                }
                const auto s = smoothing::savgol_smooth(series_of(y), window, order);
                worst = std::max(worst, max_abs_diff(s.values, y));
                ++cases;
            }
    }
    const double dt = seconds_since(t0);
    o.require(worst <= 1e-9, fmt::format("max error {:.3g}", worst));
    o.require(dt < 1.0, fmt::format("took {:.3f}s", dt));
    if (o.pass)
        o.detail = fmt::format("{} series, max error {:.3g}, {:.3f}s", cases, worst, dt);
    return o;
}

Outcome fft_lowpass()
{
    Outcome o;
    std::mt19937_64 rng(1003);
    std::normal_distribution<double> d(0.0, 5.0);
    std::vector<double> noise(257);
    for (auto& v : noise)
        v = d(rng);
    const double identity = max_abs_diff(smoothing::fft_lowpass(series_of(noise), 1.0).values, noise);

    const std::size_t n = 200;
    std::vector<double> slow(n);
    for (std::size_t i = 0; i < n; ++i)
        slow[i] = 4.0 + 3.0 * std::sin(2.0 * std::numbers::pi * 3.0 * static_cast<double>(i) / n);
    const double kept = max_abs_diff(smoothing::fft_lowpass(series_of(slow), 0.05).values, slow);

    const auto once = smoothing::fft_lowpass(series_of(noise), 0.1);
    const double idem = max_abs_diff(smoothing::fft_lowpass(once, 0.1).values, once.values);

    o.require(identity <= 1e-9, fmt::format("identity error {:.3g}", identity));
    o.require(kept <= 1e-6, fmt::format("sinusoid error {:.3g}", kept));
    o.require(idem <= 1e-9, fmt::format("idempotence error {:.3g}", idem));
    if (o.pass)
        o.detail = fmt::format("identity {:.2g}, sinusoid {:.2g}, idempotence {:.2g}", identity, kept, idem);
    return o;
}

Outcome contour_oracle()
{
    Outcome o;
    std::mt19937_64 rng(1004);
    int bad = 0;
    std::size_t components = 0;
    for (int i = 0; i < 100; ++i) {
        const auto m = oracle::random_mask(rng, 32, 32, 0.1 + 0.5 * (i % 10) / 9.0);
        const auto contours = masking::find_contours(m);
        const auto expected = oracle::components(m);
        components += expected.size();
        std::size_t total = 0;
        bool ok = contours.size() == expected.size();
        for (std::size_t k = 0; ok && k < contours.size(); ++k) {
            ok = contours[k].area == expected[k].size();
            total += contours[k].area;
        }
        ok = ok && total == m.count();
        bad += !ok;
    }
    o.require(bad == 0, fmt::format("{} of 100 masks disagree", bad));
    if (o.pass)
        o.detail = fmt::format("100 masks, {} components, counts/areas/sums agree", components);
    return o;
}

Outcome entropy_masking()
{
    Outcome o;
    const masking::EntropySpec spec;
    FramePixels flat(96, 64, 1, std::vector<std::uint8_t>(96 * 64, 173));
    o.require(masking::entropy_mask(flat, spec).count() == 0, "constant image mask not empty");

    std::mt19937_64 rng(1005);
    std::uniform_int_distribution<int> d(0, 255);
    auto half = flat;
    for (int y = 0; y < 64; ++y)
        for (int x = 48; x < 96; ++x)
            half.at(x, y) = static_cast<std::uint8_t>(d(rng));
    const auto m = masking::entropy_mask(half, spec);
    std::size_t noise_in = 0, noise_hit = 0, flat_all = 0, flat_hit = 0;
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 48; ++x) {
            ++flat_all;
            flat_hit += m.at(x, y);
        }
        if (y < spec.radius || y >= 64 - spec.radius)
            continue;
        for (int x = 48 + spec.radius; x < 96 - spec.radius; ++x) {
            ++noise_in;
            noise_hit += m.at(x, y);
        }
    }
    const double noise_frac = static_cast<double>(noise_hit) / noise_in;
    const double flat_frac = static_cast<double>(flat_hit) / flat_all;
    o.require(noise_frac >= 0.95, fmt::format("noise interior {:.3f}", noise_frac));
    o.require(flat_frac <= 0.05, fmt::format("flat half {:.3f}", flat_frac));
    if (o.pass)
        o.detail = fmt::format("constant empty, noise interior {:.3f} true, flat half {:.3f} true", noise_frac,
                               flat_frac);
    return o;
}

Outcome cbt_and_dedupe()
{
    Outcome o;
    using selection::cbt_metric;
    o.require(cbt_metric(0.0, 0.0) == 0.0 && cbt_metric(0.0, 0.6) == 0.0 && cbt_metric(0.0, 1.0) == 0.0, "cbt(0,.)");
    o.require(cbt_metric(1.0, 1.0) == 1.0, "cbt(1,1)");
    int violations = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const double c = 20.0 * i, b = j / 9.0;
            if (i + 1 < 10 && cbt_metric(c, b) > cbt_metric(c + 20.0, b))
                ++violations;
            if (j + 1 < 10 && cbt_metric(c, b) > cbt_metric(c, (j + 1) / 9.0))
                ++violations;
        }
    o.require(violations == 0, fmt::format("{} monotonicity violations", violations));

    auto det = [](double t) { return detect::Detection{"v", 5, std::lround(t * 10), t, 1.0}; };
    const auto traced = detect::dedupe({det(0.0), det(0.9), det(1.8)}, 1.0);
    o.require(traced.size() == 2 && traced[0].time_s == 0.0 && traced[1].time_s == 1.8, "anchoring example");
    o.require(detect::dedupe({det(1.0), det(1.5)}, 1.0).size() == 1, "window example");

    std::mt19937_64 rng(1007);
    int not_idempotent = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<detect::Detection> d;
        double t = 0.0;
        const int n = static_cast<int>(rng() % 20);
        for (int i = 0; i < n; ++i) {
            t += (rng() % 20) / 10.0;
            d.push_back({rng() % 2 ? "a" : "b", 1 + static_cast<int>(rng() % 3), 0, t, 1.0});
        }
        const auto once = detect::dedupe(d, 1.0);
        not_idempotent += detect::dedupe(once, 1.0) != once;
    }
    o.require(not_idempotent == 0, fmt::format("{} non-idempotent cases", not_idempotent));
    if (o.pass)
        o.detail = "cbt boundary values and 100-point monotonicity; dedupe anchoring and idempotence";
    return o;
}

Outcome macro_f1_oracle()
{
    Outcome o;
    std::mt19937_64 rng(1008);
    std::uniform_real_distribution<double> t(0.0, 40.0);
    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int classes = 1 + static_cast<int>(rng() % 5);
        std::vector<evaluation::GroundTruthEvent> gt;
        for (int cls = 1; cls <= classes; ++cls) {
            const int n = static_cast<int>(rng() % 7);
            double cursor = 0.0;
            for (int i = 0; i < n; ++i) {
                const double a = cursor + std::uniform_real_distribution<double>(0.0, 4.0)(rng);
                const double b = a + std::uniform_real_distribution<double>(0.0, 4.0)(rng);
                gt.push_back({"v", cls, a, b});
                cursor = b + 0.01;
            }
        }
        std::vector<detect::Detection> d;
        const int nd = static_cast<int>(rng() % 15);
        for (int i = 0; i < nd; ++i)
            d.push_back({"v", 1 + static_cast<int>(rng() % classes), 0, t(rng), 1.0});
        std::sort(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.time_s < b.time_s; });
        if (d.empty() && gt.empty())
            continue;
        const double got = evaluation::macro_f1(evaluation::match(d, gt));
        const double want = oracle::macro_f1(oracle::optimal_counts(d, gt));
        mismatches += got != want;
    }
    const std::vector<evaluation::GroundTruthEvent> gt{{"v", 1, 0, 2}, {"v", 2, 3, 5}};
    const std::vector<detect::Detection> perfect{{"v", 1, 30, 1.0, 1.0}, {"v", 2, 120, 4.0, 1.0}};
    const double p = evaluation::evaluate(perfect, gt).macro_f1;
    o.require(mismatches == 0, fmt::format("{} of 200 instances differ", mismatches));
    o.require(p == 1.0, fmt::format("perfect input scored {}", p));
    if (o.pass)
        o.detail = "200 random instances equal the exhaustive recomputation; perfect input 1.0";
    return o;
}

struct SyntheticRun {
    double f1 = 0.0;
    std::size_t detections = 0;
    double seconds = 0.0;
};

SyntheticRun run_synthetic(const synthgen::Output& out, const std::string& preset, double fps)
{
    const auto t0 = Clock::now();
    PipelineConfig cfg;
    apply_file(cfg, kSource / "configs" / "synthetic.ini");
    apply_file(cfg, kSource / "presets" / (preset + ".ini"));
    set_value(cfg, "adapters.classifier_manifest", out.labels_csv.string());
    cfg.validate();
    const auto seq = ingest::load_frame_dir(out.frames_dir, fps);
    const auto result = detect::detect_video(seq, cfg, detect::make_adapters(cfg));
    const auto report = evaluation::evaluate(result.detections, out.gt, cfg.class_universe);
    return {report.macro_f1, result.detections.size(), seconds_since(t0)};
}

Outcome end_to_end()
{
    Outcome o;
    oracle::TempDir dir;
    const auto t0 = Clock::now();
    const auto spec = synthgen::default_scenario();
    const auto out = synthgen::generate(spec, dir.path());
    const double gen_s = seconds_since(t0);
    const auto run = run_synthetic(out, "color_max_dedupe", spec.frame_rate);
    const double total = seconds_since(t0);
    o.require(spec.events.size() == 5 && spec.frame_count() == 900 && spec.width == 480 && spec.height == 270,
              "scenario shape");
    o.require(run.f1 >= 0.90, fmt::format("F1 {:.4f}", run.f1));
    o.require(total < 60.0, fmt::format("took {:.1f}s", total));
    if (o.pass)
        o.detail = fmt::format("F1 {:.4f} ({} detections, {} events), generate {:.1f}s + pipeline {:.1f}s", run.f1,
                               run.detections, out.gt.size(), gen_s, run.seconds);
    return o;
}

Outcome ablation_direction()
{
    Outcome o;
    oracle::TempDir dir;
    const auto spec = synthgen::duplicate_prone_scenario();
    const auto out = synthgen::generate(spec, dir.path());
    const auto cbt = run_synthetic(out, "color_cbt", spec.frame_rate);
    const auto mx = run_synthetic(out, "color_max", spec.frame_rate);
    const auto dd = run_synthetic(out, "color_max_dedupe", spec.frame_rate);
    o.require(cbt.f1 <= mx.f1 && mx.f1 <= dd.f1,
              fmt::format("F1 {:.4f} -> {:.4f} -> {:.4f} is not non-decreasing", cbt.f1, mx.f1, dd.f1));
    if (o.pass)
        o.detail = fmt::format("color_cbt {:.4f} -> color_max {:.4f} -> color_max_dedupe {:.4f}", cbt.f1, mx.f1,
                               dd.f1);
    return o;
}

Outcome gradient_background()
{
    Outcome o;
    using namespace datasetprep;
    const Rgb in{240, 235, 200}, out{30, 90, 161};
    const int w = 101, h = 61;  // odd, so the centre is a pixel
    for (auto shape : {Shape::circular, Shape::rectangular}) {
        GradientSpec s;
        s.shape = shape;
        s.inner_color = in;
        s.outer_color = out;
        const auto g = gradient_background(w, h, s);
        auto px = [&](int x, int y) { return Rgb{g.at(x, y, 0), g.at(x, y, 1), g.at(x, y, 2)}; };
        const auto name = std::string(to_string(shape));
        o.require(px(50, 30) == in, name + " centre");
        for (auto [x, y] : {std::pair{0, 0}, {w - 1, 0}, {0, h - 1}, {w - 1, h - 1}})
            o.require(px(x, y) == out, fmt::format("{} corner ({},{})", name, x, y));
        if (shape == Shape::rectangular)
            for (auto [x, y] : {std::pair{0, 30}, {w - 1, 30}, {50, 0}, {50, h - 1}})
                o.require(px(x, y) == out, fmt::format("{} edge ({},{})", name, x, y));
        // Half way to the normalising distance along a ray from the centre.
        const double cx = 50.0, cy = 30.0;
        int mx, my;
        if (shape == Shape::rectangular) {
            mx = 75;
            my = 30;
        } else {
            // The corner ray; (25, 15) is exactly half way to (0, 0).
            mx = static_cast<int>(cx / 2);
            my = static_cast<int>(cy / 2);
        }
        const auto mid = px(mx, my);
        for (int c = 0; c < 3; ++c)
            o.require(std::abs(mid[c] - (in[c] + out[c]) / 2.0) <= 1.0,
                      fmt::format("{} midpoint channel {} = {}", name, c, mid[c]));
    }
    if (o.pass)
        o.detail = "centre, corners/boundary and midpoints for circular and rectangular";
    return o;
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"colorfulness unit values", colorfulness_values},
        {"otsu oracle equivalence", otsu_oracle},
        {"savitzky-golay polynomial reproduction", savgol_polynomials},
        {"fft low-pass", fft_lowpass},
        {"contour oracle", contour_oracle},
        {"entropy masking", entropy_masking},
        {"cbt and dedupe properties", cbt_and_dedupe},
        {"macro-f1 oracle", macro_f1_oracle},
        {"end-to-end synthetic", end_to_end},
        {"ablation direction", ablation_direction},
        {"gradient background", gradient_background},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = fmt::format("exception: {}", e.what());
        }
        failed += !o.pass;
        std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
