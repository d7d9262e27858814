// framesift: command-line front end. Each subcommand runs one stage of the
// library; `pipeline` chains detect, dedupe and eval. Every run writes a
// JSON manifest listing its inputs, settings, timings and output hashes.

#include "framesift/config.hpp"
#include "framesift/csv.hpp"
#include "framesift/datasetprep.hpp"
#include "framesift/detect.hpp"
#include "framesift/evaluation.hpp"
#include "framesift/formats.hpp"
#include "framesift/image_io.hpp"
#include "framesift/ingest.hpp"
#include "framesift/manifest.hpp"
#include "framesift/masking.hpp"
#include "framesift/synthgen.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace framesift;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StageError : std::runtime_error {
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(what), stage(std::move(stage))
    {
    }
    std::string stage;
};

struct Globals {
    std::vector<std::string> configs;
    std::vector<std::string> overrides;
    std::optional<unsigned> jobs;
    std::string manifest;
};

PipelineConfig load_config(const Globals& g)
{
    PipelineConfig cfg;
    try {
        for (const auto& path : g.configs) {
            if (!fs::exists(path))
                throw Error(fmt::format("config file '{}' not found", path));
            apply_file(cfg, path);
        }
        apply_env(cfg, current_environment());
        for (const auto& kv : g.overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw Error(fmt::format("--set expects section.key=value, got '{}'", kv));
            set_value(cfg, std::string(csv::trim(kv.substr(0, eq))), std::string(csv::trim(kv.substr(eq + 1))));
        }
        if (g.jobs)
            cfg.jobs = *g.jobs;
        cfg.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

template <class Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const Error& e) {
        throw StageError(name, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        throw StageError(name, e.what());
    }
}

fs::path manifest_path(const Globals& g, const fs::path& fallback)
{
    return g.manifest.empty() ? fallback : fs::path(g.manifest);
}

fs::path sibling_manifest(const fs::path& out)
{
    return fs::path(out.string() + ".manifest.json");
}

void finish(RunManifest& m, const fs::path& path)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    m.write(path);
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw Error(fmt::format("cannot write '{}'", path.string()));
}

ingest::FrameSequence load_frames(const std::string& dir, double fps, const std::string& video)
{
    return stage("ingest", [&] { return ingest::load_frame_dir(dir, fps, video); });
}

std::string series_name(const std::string& video, signals::Metric m)
{
    return fmt::format("{}.{}.csv", video, signals::to_string(m));
}

std::string smoothed_name(const std::string& series_file)
{
    const auto dot = series_file.rfind(".csv");
    return series_file.substr(0, dot) + ".smoothed.csv";
}

/// Writes every intermediate product of one video into `dir`.
void write_video_outputs(const detect::PipelineResult& r, const PipelineConfig& cfg, const fs::path& dir,
                         RunManifest& m)
{
    fs::create_directories(dir);
    const auto& video = r.metrics.video_id;
    const auto series = dir / series_name(video, cfg.peak_signal);
    const auto smoothed = dir / smoothed_name(series.filename().string());
    formats::write_series(series, r.peak_series);
    formats::write_series(smoothed, r.smoothed);
    formats::write_metrics(dir / "metrics.csv", r.metrics);
    formats::write_peaks(dir / "peaks.csv", r.peaks);
    formats::write_candidates(dir / "candidates.csv", r.candidates);
    formats::write_detections(dir / "raw_detections.csv", r.raw);
    write_text(dir / "signal.svg",
               formats::plot_svg(r.peak_series, r.smoothed, r.peaks,
                                 fmt::format("{} {}", video, signals::to_string(cfg.peak_signal))));
    for (const auto& name : {series.filename().string(), smoothed.filename().string(), std::string("metrics.csv"),
                             std::string("peaks.csv"), std::string("candidates.csv"),
                             std::string("raw_detections.csv"), std::string("signal.svg")})
        m.add_output(dir / name);
}

std::vector<detect::Detection> sorted_by_time(std::vector<detect::Detection> d)
{
    std::stable_sort(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.time_s < b.time_s; });
    return d;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"framesift: keyframe selection, masking, detection and scoring for checkout videos"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Globals g;
    app.add_option("-c,--config", g.configs, "INI config file; repeatable, later files win");
    app.add_option("--set", g.overrides, "Override one setting: section.key=value; repeatable");
    app.add_option("-j,--jobs", g.jobs, "Worker threads for per-frame stages (default: all cores)");
    app.add_option("--manifest", g.manifest, "Run manifest path (default: next to the outputs)");

    auto sub = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };

    std::string frames, video, out, series_in, raw_in, plot, peaks_in, frame_in, key, det_in, gt_in;
    std::string metric_name, images, masks, scenario, preset = "default", format;
    std::vector<std::string> frame_dirs;
    double fps = 0.0;
    std::optional<double> window;
    std::optional<std::uint64_t> seed;
    bool want_masks = false;
    std::pair<int, int> inner_range{200, 255}, outer_range{140, 230};

    auto* c_signals = sub("signals", "Per-frame signal series (CSV frame_index,value)");
    c_signals->add_option("--frames", frames, "Frame directory")->required()->check(CLI::ExistingDirectory);
    c_signals->add_option("--fps", fps, "Frame rate")->required()->check(CLI::PositiveNumber);
    c_signals->add_option("--video", video, "Video id (default: directory name)");
    c_signals->add_option("--metric", metric_name, "binarization_ratio | colorfulness | sharpness | all");
    c_signals->add_option("-o,--out", out, "Output CSV")->required();

    auto* c_smooth = sub("smooth", "Smooth a series CSV");
    c_smooth->add_option("--series", series_in, "Series CSV")->required()->check(CLI::ExistingFile);
    c_smooth->add_option("-o,--out", out, "Output CSV (default: <series>.smoothed.csv)");
    c_smooth->add_option("--plot", plot, "Also write an SVG of raw vs smoothed");

    auto* c_peaks = sub("peaks", "Local maxima of a (smoothed) series");
    c_peaks->add_option("--series", series_in, "Series CSV")->required()->check(CLI::ExistingFile);
    c_peaks->add_option("--raw", raw_in, "Unsmoothed series, drawn in the plot")->check(CLI::ExistingFile);
    c_peaks->add_option("-o,--out", out, "Output CSV")->required();
    c_peaks->add_option("--plot", plot, "Also write an SVG with peak markers");

    auto* c_select = sub("select", "Sharpness refinement and gating of peak frames");
    c_select->add_option("--frames", frames, "Frame directory")->required()->check(CLI::ExistingDirectory);
    c_select->add_option("--fps", fps, "Frame rate")->required()->check(CLI::PositiveNumber);
    c_select->add_option("--video", video, "Video id (default: directory name)");
    c_select->add_option("--peaks", peaks_in, "Peaks CSV")->required()->check(CLI::ExistingFile);
    c_select->add_option("-o,--out", out, "Output candidates CSV")->required();

    auto* c_mask = sub("mask", "Mask one frame and crop its selected contours");
    c_mask->add_option("--frame", frame_in, "Frame image")->required()->check(CLI::ExistingFile);
    c_mask->add_option("--key", key, "Frame key for manifest adapters (default: <dir>/<stem>)");
    c_mask->add_option("-o,--out", out, "Output directory")->required();

    auto* c_detect = sub("detect", "Frame selection, masking and classification for one video");
    c_detect->add_option("--frames", frames, "Frame directory")->required()->check(CLI::ExistingDirectory);
    c_detect->add_option("--fps", fps, "Frame rate")->required()->check(CLI::PositiveNumber);
    c_detect->add_option("--video", video, "Video id (default: directory name)");
    c_detect->add_option("-o,--out", out, "Output directory")->required();

    auto* c_dedupe = sub("dedupe", "Remove repeated detections of a class within a time window");
    c_dedupe->add_option("--detections", det_in, "Detections CSV")->required()->check(CLI::ExistingFile);
    c_dedupe->add_option("--window", window, "Window in seconds (default: detect.dedupe_window_s)");
    c_dedupe->add_option("-o,--out", out, "Output directory")->required();

    auto* c_eval = sub("eval", "Score detections against ground truth");
    c_eval->add_option("--detections", det_in, "Detections CSV")->required()->check(CLI::ExistingFile);
    c_eval->add_option("--gt", gt_in, "Ground-truth CSV")->required()->check(CLI::ExistingFile);
    c_eval->add_option("-o,--out", out, "Report CSV");

    auto* c_prep = sub("prep-bg", "Replace image backgrounds with random gradients");
    c_prep->add_option("--images", images, "Image tree")->required()->check(CLI::ExistingDirectory);
    c_prep->add_option("--masks", masks, "Mask tree with the same layout")->required()->check(CLI::ExistingDirectory);
    c_prep->add_option("-o,--out", out, "Output directory")->required();
    c_prep->add_option("--seed", seed, "Random seed (default 0)");
    c_prep->add_option("--inner-range", inner_range, "Inner color channel range lo hi")->expected(2);
    c_prep->add_option("--outer-range", outer_range, "Outer color channel range lo hi")->expected(2);

    auto* c_synth = sub("synthgen", "Render a labelled synthetic checkout sequence");
    c_synth->add_option("--scenario", scenario, "Scenario INI")->check(CLI::ExistingFile);
    c_synth->add_option("--preset", preset, "Built-in scenario: default | duplicate")
        ->check(CLI::IsMember({"default", "duplicate"}));
    c_synth->add_option("--seed", seed, "Override the scenario seed");
    c_synth->add_option("--format", format, "Frame format: png | ppm")->check(CLI::IsMember({"png", "ppm"}));
    c_synth->add_flag("--masks", want_masks, "Also write product masks and masks.csv");
    c_synth->add_option("-o,--out", out, "Output directory")->required();

    auto* c_pipe = sub("pipeline", "detect, dedupe and (with --gt) eval over one or more videos");
    c_pipe->add_option("--frames", frame_dirs, "Frame directory; repeatable")->required()->check(CLI::ExistingDirectory);
    c_pipe->add_option("--fps", fps, "Frame rate")->required()->check(CLI::PositiveNumber);
    c_pipe->add_option("--video", video, "Video id (single --frames only)");
    c_pipe->add_option("--gt", gt_in, "Ground-truth CSV")->check(CLI::ExistingFile);
    c_pipe->add_option("-o,--out", out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c_pipe->parsed() && !video.empty() && frame_dirs.size() > 1)
            throw UsageError("--video needs exactly one --frames directory");
        if (c_synth->parsed() && !scenario.empty() && c_synth->count("--preset"))
            throw UsageError("--scenario and --preset are mutually exclusive");

        // Commands that do not read the pipeline config.
        if (c_synth->parsed()) {
            RunManifest m("synthgen");
            auto spec = stage("synthgen", [&] {
                return scenario.empty() ? (preset == "duplicate" ? synthgen::duplicate_prone_scenario()
                                                                 : synthgen::default_scenario())
                                        : synthgen::load_scenario(scenario);
            });
            if (seed)
                spec.seed = *seed;
            if (!format.empty())
                spec.format = format;
            spec.masks = spec.masks || want_masks;
            if (!scenario.empty())
                m.add_input("scenario", scenario);
            m.set_config(synthgen::to_ini(spec));
            const auto result = [&] {
                StageTimer t(m, "synthgen");
                return stage("synthgen", [&] { return synthgen::generate(spec, out); });
            }();
            m.add_output(result.gt_csv);
            m.add_output(result.labels_csv);
            if (!result.masks_csv.empty())
                m.add_output(result.masks_csv);
            m.add_output(fs::path(out) / "scenario.ini");
            m.add_note("frames_dir", result.frames_dir.string());
            m.add_note("frame_count", std::to_string(spec.frame_count()));
            finish(m, manifest_path(g, fs::path(out) / "manifest.json"));
            std::cout << fmt::format("{} frames, {} events -> {}\n", spec.frame_count(), result.gt.size(),
                                     result.frames_dir.string());
            return 0;
        }
        if (c_prep->parsed()) {
            RunManifest m("prep-bg");
            datasetprep::PrepOptions opt;
            opt.images = images;
            opt.masks = masks;
            opt.output = out;
            opt.seed = seed.value_or(0);
            auto range = [](std::pair<int, int> r) {
                if (r.first < 0 || r.second > 255 || r.first > r.second)
                    throw UsageError(fmt::format("color range {} {} outside 0..255", r.first, r.second));
                return datasetprep::ColorRange{static_cast<std::uint8_t>(r.first),
                                               static_cast<std::uint8_t>(r.second)};
            };
            opt.colors.inner = range(inner_range);
            opt.colors.outer = range(outer_range);
            m.add_input("images", images);
            m.add_input("masks", masks);
            m.add_note("seed", std::to_string(opt.seed));
            const auto n = [&] {
                StageTimer t(m, "prep-bg");
                return stage("prep-bg", [&] { return datasetprep::prepare_directory(opt); });
            }();
            std::vector<fs::path> written;
            for (const auto& e : fs::recursive_directory_iterator(out))
                if (e.is_regular_file() && e.path().filename() != "manifest.json")
                    written.push_back(e.path());
            std::sort(written.begin(), written.end());
            for (const auto& p : written)
                m.add_output(p);
            finish(m, manifest_path(g, fs::path(out) / "manifest.json"));
            std::cout << fmt::format("{} images -> {}\n", n, out);
            return 0;
        }

        const PipelineConfig cfg = load_config(g);
        RunManifest m(app.get_subcommands().front()->get_name());
        m.set_config(to_ini(cfg));
        for (const auto& c : g.configs)
            m.add_input("config", c);

        if (c_signals->parsed()) {
            const auto seq = load_frames(frames, fps, video);
            m.add_input("frames", frames);
            const bool all = metric_name == "all";
            const auto metric = all || metric_name.empty()
                                    ? cfg.peak_signal
                                    : stage("signals", [&] { return signals::parse_metric(metric_name); });
            {
                StageTimer t(m, "signals");
                if (all) {
                    const auto metrics =
                        stage("signals", [&] { return signals::compute_frame_metrics(seq, cfg.preprocess, cfg.jobs); });
                    formats::write_metrics(out, metrics);
                } else {
                    const auto s = stage("signals",
                                         [&] { return signals::compute_series(seq, metric, cfg.preprocess, cfg.jobs); });
                    formats::write_series(out, s);
                }
            }
            m.add_output(out);
            finish(m, manifest_path(g, sibling_manifest(out)));
        } else if (c_smooth->parsed()) {
            const auto s = stage("smooth", [&] { return formats::read_series(series_in, "", 0.0); });
            m.add_input("series", series_in);
            if (out.empty())
                out = smoothed_name(series_in);
            const auto sm = [&] {
                StageTimer t(m, "smooth");
                return stage("smooth", [&] { return smoothing::smooth(s, cfg.smoothing); });
            }();
            formats::write_series(out, sm);
            m.add_output(out);
            if (!plot.empty()) {
                write_text(plot, formats::plot_svg(s, sm, {}, fs::path(series_in).filename().string()));
                m.add_output(plot);
            }
            finish(m, manifest_path(g, sibling_manifest(out)));
        } else if (c_peaks->parsed()) {
            const auto s = stage("peaks", [&] { return formats::read_series(series_in, "", 0.0); });
            m.add_input("series", series_in);
            const auto peaks = [&] {
                StageTimer t(m, "peaks");
                return stage("peaks", [&] { return smoothing::find_peaks(s, cfg.min_prominence); });
            }();
            formats::write_peaks(out, peaks);
            m.add_output(out);
            if (!plot.empty()) {
                const auto raw = raw_in.empty() ? s : stage("peaks", [&] { return formats::read_series(raw_in, "", 0.0); });
                write_text(plot, formats::plot_svg(raw, s, peaks, fs::path(series_in).filename().string()));
                m.add_output(plot);
            }
            finish(m, manifest_path(g, sibling_manifest(out)));
        } else if (c_select->parsed()) {
            const auto seq = load_frames(frames, fps, video);
            m.add_input("frames", frames);
            m.add_input("peaks", peaks_in);
            const auto peak_idx = stage("select", [&] { return formats::read_peak_indices(peaks_in); });
            const auto cands = [&] {
                StageTimer t(m, "select");
                return stage("select", [&] {
                    return selection::select_candidates(seq, peak_idx, cfg.preprocess, cfg.selection, cfg.jobs);
                });
            }();
            formats::write_candidates(out, cands);
            m.add_output(out);
            finish(m, manifest_path(g, sibling_manifest(out)));
        } else if (c_mask->parsed()) {
            const fs::path fp(frame_in);
            if (key.empty())
                key = fs::absolute(fp).parent_path().filename().string() + "/" + fp.stem().string();
            m.add_input("frame", frame_in);
            m.add_note("frame_key", key);
            const auto adapters = stage("adapters", [&] { return detect::make_adapters(cfg); });
            StageTimer t(m, "mask");
            stage("mask", [&] {
                const auto roi = ingest::roi_frame(read_image(fp), cfg.preprocess);
                const auto gray = ingest::to_grayscale(roi);
                const auto product = adapters.product.segment(roi, key);
                const auto hand = adapters.hand.segment(roi, key);
                const auto ent = cfg.entropy_masking ? masking::entropy_mask(gray, cfg.entropy)
                                                     : BinaryMask(roi.width(), roi.height(), true);
                const auto mask = masking::combine_masks(product, hand, ent);
                const auto contours = masking::find_contours(mask);
                const auto chosen = masking::select_contours(contours, cfg.contour_mode);
                const fs::path dir(out);
                fs::create_directories(dir);
                write_mask_png(dir / "mask.png", mask);
                std::ofstream cs(dir / "contours.csv", std::ios::binary);
                formats::write_contours(cs, contours);
                cs.close();
                std::ofstream ss(dir / "selected.csv", std::ios::binary);
                formats::write_contours(ss, chosen);
                ss.close();
                m.add_output(dir / "mask.png");
                m.add_output(dir / "contours.csv");
                m.add_output(dir / "selected.csv");
                for (std::size_t i = 0; i < chosen.size(); ++i) {
                    const auto p = dir / fmt::format("crop_{}.png", i);
                    write_png(p, masking::crop_to_contour(roi, chosen[i], cfg.crop_pad));
                    m.add_output(p);
                }
                std::cout << fmt::format("{} contours, {} selected\n", contours.size(), chosen.size());
                return 0;
            });
            t.stop();
            finish(m, manifest_path(g, fs::path(out) / "manifest.json"));
        } else if (c_detect->parsed()) {
            const auto seq = load_frames(frames, fps, video);
            m.add_input("frames", frames);
            const auto adapters = stage("adapters", [&] { return detect::make_adapters(cfg); });
            const auto r = [&] {
                StageTimer t(m, "detect");
                return stage("detect", [&] { return detect::detect_video(seq, cfg, adapters); });
            }();
            write_video_outputs(r, cfg, out, m);
            finish(m, manifest_path(g, fs::path(out) / "manifest.json"));
            std::cout << fmt::format("{}: {} peaks, {} candidates kept, {} raw detections\n", seq.video_id(),
                                     r.peaks.size(),
                                     std::count_if(r.candidates.begin(), r.candidates.end(),
                                                   [](const auto& c) { return c.kept; }),
                                     r.raw.size());
        } else if (c_dedupe->parsed()) {
            const auto dets = stage("dedupe", [&] { return formats::read_detections(det_in); });
            m.add_input("detections", det_in);
            const double w = window.value_or(cfg.dedupe_window_s);
            if (w < 0)
                throw UsageError("--window must be >= 0");
            m.add_note("window_s", csv::num(w));
            const auto kept = [&] {
                StageTimer t(m, "dedupe");
                return stage("dedupe", [&] { return detect::dedupe(dets, w); });
            }();
            const fs::path dir(out);
            formats::write_detections_seconds(dir / "detections.csv", kept);
            formats::write_detections(dir / "detections_full.csv", kept);
            m.add_output(dir / "detections.csv");
            m.add_output(dir / "detections_full.csv");
            finish(m, manifest_path(g, dir / "manifest.json"));
            std::cout << fmt::format("{} -> {} detections\n", dets.size(), kept.size());
        } else if (c_eval->parsed()) {
            const auto dets = stage("eval", [&] { return formats::read_detections(det_in); });
            const auto gt = stage("eval", [&] { return formats::read_ground_truth(gt_in); });
            m.add_input("detections", det_in);
            m.add_input("gt", gt_in);
            const auto report = [&] {
                StageTimer t(m, "eval");
                return stage("eval", [&] { return evaluation::evaluate(sorted_by_time(dets), gt, cfg.class_universe); });
            }();
            std::cout << evaluation::format_table(report);
            std::cout << fmt::format("macro_f1 = {}\n", csv::num(cfg.weighted_f1 ? report.weighted_f1 : report.macro_f1));
            if (!out.empty()) {
                formats::write_report(out, report);
                m.add_output(out);
                finish(m, manifest_path(g, sibling_manifest(out)));
            } else if (!g.manifest.empty()) {
                finish(m, g.manifest);
            }
        } else if (c_pipe->parsed()) {
            const fs::path root(out);
            const auto adapters = stage("adapters", [&] { return detect::make_adapters(cfg); });
            std::vector<detect::Detection> raw, kept;
            for (const auto& dir : frame_dirs) {
                const auto seq = load_frames(dir, fps, video);
                m.add_input("frames", dir);
                const auto r = [&] {
                    StageTimer t(m, "detect:" + seq.video_id());
                    return stage("detect", [&] { return detect::detect_video(seq, cfg, adapters); });
                }();
                write_video_outputs(r, cfg, root / seq.video_id(), m);
                raw.insert(raw.end(), r.raw.begin(), r.raw.end());
                kept.insert(kept.end(), r.detections.begin(), r.detections.end());
                std::cout << fmt::format("{}: {} raw, {} after dedupe\n", seq.video_id(), r.raw.size(),
                                         r.detections.size());
            }
            formats::write_detections(root / "raw_detections.csv", raw);
            formats::write_detections_seconds(root / "detections.csv", kept);
            formats::write_detections(root / "detections_full.csv", kept);
            m.add_output(root / "raw_detections.csv");
            m.add_output(root / "detections.csv");
            m.add_output(root / "detections_full.csv");
            if (!gt_in.empty()) {
                const auto gt = stage("eval", [&] { return formats::read_ground_truth(gt_in); });
                m.add_input("gt", gt_in);
                const auto report = [&] {
                    StageTimer t(m, "eval");
                    return stage("eval", [&] { return evaluation::evaluate(sorted_by_time(kept), gt, cfg.class_universe); });
                }();
                formats::write_report(root / "report.csv", report);
                write_text(root / "report.txt", evaluation::format_table(report));
                m.add_output(root / "report.csv");
                m.add_output(root / "report.txt");
                std::cout << evaluation::format_table(report);
                std::cout << fmt::format("macro_f1 = {}\n",
                                         csv::num(cfg.weighted_f1 ? report.weighted_f1 : report.macro_f1));
            }
            finish(m, manifest_path(g, root / "manifest.json"));
        }
    } catch (const UsageError& e) {
        std::cerr << "framesift: usage error: " << e.what() << "\n";
        return 2;
    } catch (const StageError& e) {
        std::cerr << "framesift: error [" << e.stage << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "framesift: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
