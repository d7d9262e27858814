#include "framesift/formats.hpp"
#include "framesift/image_io.hpp"
#include "framesift/manifest.hpp"
#include "framesift/synthgen.hpp"

#include "oracles.hpp"

#include <fmt/format.h>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace framesift;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = FRAMESIFT_SOURCE_DIR;

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string& args)
{
    const std::string cmd = fmt::format("'{}' {} 2>&1", FRAMESIFT_CLI, args);
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p)
        return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0)
        r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string q(const fs::path& p)
{
    return "'" + p.string() + "'";
}

// A short one-object clip generated through the CLI, shared by the tests.
struct Clip {
    oracle::TempDir dir;
    fs::path frames;

    Clip()
    {
        auto spec = synthgen::default_scenario();
        spec.video_id = "clip";
        spec.duration_s = 7.0;
        spec.events.resize(1);
        spec.events[0].enter_t = 1.0;
        spec.events[0].exit_t = 5.5;
        std::ofstream(dir / "scenario.ini") << synthgen::to_ini(spec);
        const auto r = cli(fmt::format("synthgen --scenario {} -o {}", q(dir / "scenario.ini"), q(dir / "gen")));
        EXPECT_EQ(r.code, 0) << r.out;
        frames = dir / "gen" / "clip";
    }

    static const Clip& get()
    {
        static const Clip c;
        return c;
    }

    std::string synthetic_config() const
    {
        return fmt::format("-c {} -c {} --set adapters.classifier_manifest={}", q(kSource / "configs" / "synthetic.ini"),
                           q(kSource / "presets" / "color_max_dedupe.ini"), q(dir / "gen" / "labels.csv"));
    }
};

nlohmann::json outputs_of(const fs::path& manifest)
{
    std::ifstream in(manifest);
    return nlohmann::json::parse(in)["outputs"];
}

}  // namespace

TEST(Cli, Version)
{
    const auto r = cli("--version");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find(kVersion), std::string::npos) << r.out;
}

TEST(Cli, UsageErrorsExitTwo)
{
    EXPECT_EQ(cli("--bogus").code, 2);
    EXPECT_EQ(cli("eval --detections").code, 2);
    EXPECT_EQ(cli("nosuchcommand").code, 2);

    oracle::TempDir dir;
    std::ofstream(dir / "d.csv") << "video_id,class_id,time_s\n";
    std::ofstream(dir / "g.csv") << "video_id,class_id,t_start,t_end\nv,1,0,1\n";
    std::ofstream(dir / "bad.ini") << "[selection]\nstep = -3\n";
    std::ofstream(dir / "unknown.ini") << "[selection]\nstepz = 3\n";
    const auto files = fmt::format("--detections {} --gt {}", q(dir / "d.csv"), q(dir / "g.csv"));
    auto r = cli(fmt::format("-c {} eval {}", q(dir / "bad.ini"), files));
    EXPECT_EQ(r.code, 2) << r.out;
    EXPECT_EQ(cli(fmt::format("-c {} eval {}", q(dir / "unknown.ini"), files)).code, 2);
    EXPECT_EQ(cli(fmt::format("--set selection.count=zero eval {}", files)).code, 2);
    EXPECT_EQ(cli(fmt::format("--set nokey eval {}", files)).code, 2);
    r = cli(fmt::format("eval {}", files));
    EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, EnvironmentOverrides)
{
    oracle::TempDir dir;
    std::ofstream(dir / "d.csv") << "video_id,class_id,time_s\n";
    std::ofstream(dir / "g.csv") << "video_id,class_id,t_start,t_end\nv,1,0,1\n";
    const auto r = cli(fmt::format("eval --detections {} --gt {}", q(dir / "d.csv"), q(dir / "g.csv")));
    ASSERT_EQ(r.code, 0);
    const auto bad = std::string("FRAMESIFT_SELECTION_STEP=-1 ") + FRAMESIFT_CLI;
    const auto cmd = fmt::format("{} eval --detections {} --gt {} >/dev/null 2>&1", bad, q(dir / "d.csv"),
                                 q(dir / "g.csv"));
    const int status = std::system(cmd.c_str());
    EXPECT_EQ(WEXITSTATUS(status), 2);
}

TEST(Cli, StageErrorsExitOne)
{
    oracle::TempDir dir;
    std::ofstream(dir / "d.csv") << "video_id,class_id,time_s\nv,1,oops\n";
    std::ofstream(dir / "g.csv") << "video_id,class_id,t_start,t_end\nv,1,0,1\n";
    const auto r = cli(fmt::format("eval --detections {} --gt {}", q(dir / "d.csv"), q(dir / "g.csv")));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("error [eval]"), std::string::npos) << r.out;
}

TEST(Cli, EvalPerfectDetections)
{
    oracle::TempDir dir;
    std::ofstream(dir / "g.csv") << "video_id,class_id,t_start,t_end\nv,3,1,2\nv,5,4,6\nw,3,0,9\n";
    std::ofstream(dir / "d.csv") << "video_id,class_id,frame_index,time_s\nv,3,45,1.5\nv,5,150,5\nw,3,30,1\n";
    const auto r = cli(fmt::format("eval --detections {} --gt {} -o {}", q(dir / "d.csv"), q(dir / "g.csv"),
                                   q(dir / "report.csv")));
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("macro_f1 = 1\n"), std::string::npos) << r.out;
    EXPECT_TRUE(fs::exists(dir / "report.csv"));
    EXPECT_TRUE(fs::exists(dir / "report.csv.manifest.json") || fs::exists(dir / "manifest.json"));
}

TEST(Cli, SignalsMatchLibrary)
{
    const auto& clip = Clip::get();
    oracle::TempDir out;
    const auto r = cli(fmt::format("signals --frames {} --fps 30 --metric colorfulness -o {}", q(clip.frames),
                                   q(out / "c.csv")));
    ASSERT_EQ(r.code, 0) << r.out;

    const auto seq = ingest::load_frame_dir(clip.frames, 30.0);
    const auto series = signals::compute_series(seq, signals::Metric::colorfulness, ingest::PreprocessSpec{});
    std::ostringstream lib;
    formats::write_series(lib, series);
    EXPECT_EQ(oracle::read_bytes(out / "c.csv"), lib.str());
}

TEST(Cli, StagewiseEqualsDetect)
{
    const auto& clip = Clip::get();
    oracle::TempDir out;
    const auto base = fmt::format("-j 1 {}", clip.synthetic_config());
    ASSERT_EQ(cli(fmt::format("{} signals --frames {} --fps 30 -o {}", base, q(clip.frames), q(out / "s.csv"))).code, 0);
    ASSERT_EQ(cli(fmt::format("{} smooth --series {} -o {}", base, q(out / "s.csv"), q(out / "sm.csv"))).code, 0);
    ASSERT_EQ(cli(fmt::format("{} peaks --series {} --raw {} -o {} --plot {}", base, q(out / "sm.csv"),
                              q(out / "s.csv"), q(out / "p.csv"), q(out / "p.svg")))
                  .code,
              0);
    ASSERT_EQ(cli(fmt::format("{} select --frames {} --fps 30 --peaks {} -o {}", base, q(clip.frames),
                              q(out / "p.csv"), q(out / "cand.csv")))
                  .code,
              0);
    const auto r = cli(fmt::format("{} detect --frames {} --fps 30 -o {}", base, q(clip.frames), q(out / "det")));
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(oracle::read_bytes(out / "cand.csv"), oracle::read_bytes(out / "det" / "candidates.csv"));
    EXPECT_EQ(oracle::read_bytes(out / "p.csv"), oracle::read_bytes(out / "det" / "peaks.csv"));
    EXPECT_TRUE(fs::exists(out / "p.svg"));

    const auto d = cli(fmt::format("{} dedupe --detections {} -o {}", base, q(out / "det" / "raw_detections.csv"),
                                   q(out / "dd")));
    ASSERT_EQ(d.code, 0) << d.out;
    const auto dets = formats::read_detections(out / "dd" / "detections_full.csv");
    ASSERT_EQ(dets.size(), 1u);

    const auto e = cli(fmt::format("eval --detections {} --gt {}", q(out / "dd" / "detections.csv"),
                                   q(clip.dir / "gen" / "gt.csv")));
    EXPECT_EQ(e.code, 0);
    EXPECT_NE(e.out.find("macro_f1 = 1\n"), std::string::npos) << e.out;
}

TEST(Cli, MaskWritesCrops)
{
    const auto& clip = Clip::get();
    oracle::TempDir out;
    const auto r = cli(fmt::format("mask --frame {} -o {}", q(clip.frames / "000090.png"), q(out.path())));
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(fs::exists(out / "mask.png"));
    EXPECT_TRUE(fs::exists(out / "contours.csv"));
    EXPECT_TRUE(fs::exists(out / "crop_0.png"));
}

TEST(Cli, PipelineManifestReproducible)
{
    const auto& clip = Clip::get();
    oracle::TempDir a, b;
    for (const auto* dir : {&a, &b}) {
        const auto r = cli(fmt::format("{} pipeline --frames {} --fps 30 --gt {} -o {}", clip.synthetic_config(),
                                       q(clip.frames), q(clip.dir / "gen" / "gt.csv"), q(dir->path())));
        ASSERT_EQ(r.code, 0) << r.out;
        EXPECT_NE(r.out.find("macro_f1 = 1\n"), std::string::npos) << r.out;
        EXPECT_TRUE(fs::exists(dir->path() / "report.csv"));
    }
    const auto oa = outputs_of(a / "manifest.json");
    const auto ob = outputs_of(b / "manifest.json");
    ASSERT_EQ(oa.size(), ob.size());
    ASSERT_FALSE(oa.empty());
    for (std::size_t i = 0; i < oa.size(); ++i) {
        EXPECT_EQ(fs::path(oa[i]["path"].get<std::string>()).filename(),
                  fs::path(ob[i]["path"].get<std::string>()).filename());
        EXPECT_EQ(oa[i]["sha256"], ob[i]["sha256"]) << oa[i]["path"];
        EXPECT_EQ(oa[i]["sha256"], sha256_file(oa[i]["path"].get<std::string>()));
    }
}

TEST(Cli, PrepBackgrounds)
{
    oracle::TempDir dir;
    fs::create_directories(dir / "img");
    fs::create_directories(dir / "mask");
    FramePixels img(8, 6, 3);
    BinaryMask m(8, 6);
    m.set(3, 3, true);
    write_png(dir / "img" / "a.png", img);
    write_mask_png(dir / "mask" / "a.png", m);
    const auto r = cli(fmt::format("prep-bg --images {} --masks {} -o {} --seed 5", q(dir / "img"), q(dir / "mask"),
                                   q(dir / "out")));
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_TRUE(fs::exists(dir / "out" / "a.png"));
    EXPECT_TRUE(fs::exists(dir / "out" / "manifest.csv"));
}
