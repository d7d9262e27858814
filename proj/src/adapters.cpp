#include "framesift/adapters.hpp"

#include "framesift/csv.hpp"
#include "framesift/image_io.hpp"

#include <fmt/format.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace framesift::adapters {

namespace fs = std::filesystem;

namespace {

std::string shell_quote(const std::string& s)
{
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += '\'';
    return out;
}

/// Scratch directory removed on scope exit.
class TempDir {
public:
    TempDir()
    {
        std::string tmpl = (fs::temp_directory_path() / "framesift-XXXXXX").string();
        if (!mkdtemp(tmpl.data()))
            throw Error("cannot create temporary directory");
        path_ = tmpl;
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string read_text(const fs::path& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommandResult {
    int exit_code = 0;
    std::string out;
    std::string err;
};

// Runs `template` with IN/OUT exported; if the template does not reference
// $IN itself, the two paths are appended as arguments.
CommandResult run_command(const std::string& tmpl, const fs::path& in, const fs::path& out,
                          const fs::path& scratch)
{
    const auto stdout_file = scratch / "stdout.txt";
    const auto stderr_file = scratch / "stderr.txt";
    std::string body = tmpl;
    if (tmpl.find("$IN") == std::string::npos && tmpl.find("${IN}") == std::string::npos)
        body += " \"$IN\" \"$OUT\"";
    const std::string line = fmt::format("IN={} OUT={}; export IN OUT; {{ {}\n}} >{} 2>{}",
                                         shell_quote(in.string()), shell_quote(out.string()), body,
                                         shell_quote(stdout_file.string()),
                                         shell_quote(stderr_file.string()));
    const int status = std::system(line.c_str());
    CommandResult r;
    if (status == -1)
        r.exit_code = -1;
    else if (WIFEXITED(status))
        r.exit_code = WEXITSTATUS(status);
    else
        r.exit_code = 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    r.out = read_text(stdout_file);
    r.err = read_text(stderr_file);
    return r;
}

}  // namespace

std::string frame_key(std::string_view video_id, std::int64_t frame_index)
{
    return fmt::format("{}/{:06d}", video_id, frame_index);
}

SegmenterAdapter SegmenterAdapter::null(bool fill)
{
    SegmenterAdapter a;
    a.kind_ = Kind::null;
    a.null_fill_ = fill;
    return a;
}

SegmenterAdapter SegmenterAdapter::manifest(const fs::path& csv_path)
{
    auto entries = std::make_shared<std::map<std::string, fs::path, std::less<>>>();
    const auto base = csv_path.parent_path();
    for (auto& row : csv::read_rows(csv_path, "frame_key")) {
        if (row.size() != 2)
            throw Error(fmt::format("'{}': expected `frame_key,path` rows", csv_path.string()));
        fs::path p = row[1];
        (*entries)[row[0]] = p.is_absolute() ? p : base / p;
    }
    SegmenterAdapter a;
    a.kind_ = Kind::manifest;
    a.entries_ = std::move(entries);
    return a;
}

SegmenterAdapter SegmenterAdapter::command(std::string command_template, bool reentrant)
{
    if (command_template.empty())
        throw Error("segmenter command is empty");
    SegmenterAdapter a;
    a.kind_ = Kind::external_command;
    a.command_ = std::move(command_template);
    a.reentrant_ = reentrant;
    return a;
}

BinaryMask SegmenterAdapter::segment(const FramePixels& frame, std::string_view frame_key) const
{
    BinaryMask mask;
    switch (kind_) {
    case Kind::null:
        return BinaryMask(frame.width(), frame.height(), null_fill_);
    case Kind::manifest: {
        const auto it = entries_->find(frame_key);
        if (it == entries_->end())
            throw Error(fmt::format("segmenter manifest has no mask for '{}'", frame_key));
        mask = read_mask(it->second);
        break;
    }
    case Kind::external_command: {
        TempDir tmp;
        const auto in = tmp.path() / "in.png";
        const auto out = tmp.path() / "out.png";
        write_png(in, frame, 1);
        const auto r = run_command(command_, in, out, tmp.path());
        if (r.exit_code != 0)
            throw Error(fmt::format("segmenter command exited with {} for '{}': {}", r.exit_code,
                                    frame_key, csv::trim(r.err)));
        if (!fs::exists(out))
            throw Error(fmt::format("segmenter command wrote no mask for '{}'", frame_key));
        mask = read_mask(out);
        break;
    }
    }
    if (mask.width() != frame.width() || mask.height() != frame.height())
        throw Error(fmt::format("mask for '{}' is {}x{}, frame is {}x{}", frame_key, mask.width(),
                                mask.height(), frame.width(), frame.height()));
    return mask;
}

ClassPrediction parse_prediction(std::string_view line)
{
    std::istringstream ss{std::string(csv::trim(line))};
    ClassPrediction p;
    std::string extra;
    if (!(ss >> p.class_id >> p.confidence) || (ss >> extra))
        throw Error(fmt::format("cannot parse classifier output '{}'", csv::trim(line)));
    if (p.class_id < 1 || p.class_id > kNumClasses)
        throw Error(fmt::format("class id {} outside 1..{}", p.class_id, kNumClasses));
    if (!(p.confidence >= 0.0 && p.confidence <= 1.0))
        throw Error(fmt::format("confidence {} outside [0,1]", p.confidence));
    return p;
}

ClassifierAdapter ClassifierAdapter::constant(int class_id)
{
    if (class_id < 1 || class_id > kNumClasses)
        throw Error(fmt::format("class id {} outside 1..{}", class_id, kNumClasses));
    ClassifierAdapter a;
    a.kind_ = Kind::constant;
    a.class_id_ = class_id;
    return a;
}

ClassifierAdapter ClassifierAdapter::manifest(const fs::path& csv_path, bool skip_missing)
{
    auto labels = std::make_shared<std::map<std::string, int, std::less<>>>();
    for (auto& row : csv::read_rows(csv_path, "frame_key")) {
        if (row.size() != 2)
            throw Error(fmt::format("'{}': expected `frame_key,class_id` rows", csv_path.string()));
        const auto id = csv::to_int(row[1]);
        if (id < 1 || id > kNumClasses)
            throw Error(fmt::format("'{}': class id {} outside 1..{}", csv_path.string(), id, kNumClasses));
        (*labels)[row[0]] = static_cast<int>(id);
    }
    ClassifierAdapter a;
    a.kind_ = Kind::manifest;
    a.labels_ = std::move(labels);
    a.skip_missing_ = skip_missing;
    return a;
}

ClassifierAdapter ClassifierAdapter::command(std::string command_template, bool reentrant)
{
    if (command_template.empty())
        throw Error("classifier command is empty");
    ClassifierAdapter a;
    a.kind_ = Kind::external_command;
    a.command_ = std::move(command_template);
    a.reentrant_ = reentrant;
    return a;
}

ClassPrediction ClassifierAdapter::classify(const FramePixels& crop, std::string_view frame_key) const
{
    auto p = predict(crop, frame_key);
    if (!p)
        throw Error(fmt::format("classifier manifest has no label for '{}'", frame_key));
    return *p;
}

std::optional<ClassPrediction> ClassifierAdapter::predict(const FramePixels& crop, std::string_view frame_key) const
{
    if (crop.empty())
        throw Error(fmt::format("empty crop for '{}'", frame_key));
    switch (kind_) {
    case Kind::constant:
        return ClassPrediction{class_id_, 1.0};
    case Kind::manifest: {
        const auto it = labels_->find(frame_key);
        if (it == labels_->end()) {
            if (skip_missing_)
                return std::nullopt;
            throw Error(fmt::format("classifier manifest has no label for '{}'", frame_key));
        }
        return ClassPrediction{it->second, 1.0};
    }
    case Kind::external_command: {
        TempDir tmp;
        const auto in = tmp.path() / "in.png";
        const auto out = tmp.path() / "out.txt";
        write_png(in, crop, 1);
        const auto r = run_command(command_, in, out, tmp.path());
        if (r.exit_code != 0)
            throw Error(fmt::format("classifier command exited with {} for '{}': {}", r.exit_code,
                                    frame_key, csv::trim(r.err)));
        return parse_prediction(r.out);
    }
    }
    throw Error("unreachable classifier kind");
}

}  // namespace framesift::adapters
