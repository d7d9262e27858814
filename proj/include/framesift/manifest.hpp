#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace framesift {

inline constexpr const char* kVersion = "0.1.0";

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

/// Record of one CLI run: what went in, which settings, how long each stage
/// took and the hash of every file written.
class RunManifest {
public:
    explicit RunManifest(std::string command);

    void set_config(std::string ini_snapshot) { config_ = std::move(ini_snapshot); }
    void add_input(std::string role, const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    void add_timing(std::string stage, double seconds);
    void add_note(std::string key, std::string value);

    std::string to_json() const;
    void write(const std::filesystem::path& path) const;

private:
    std::string command_;
    std::string config_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<std::pair<std::string, std::string>> outputs_;  // path, sha256
    std::vector<std::pair<std::string, double>> timings_;
    std::map<std::string, std::string> notes_;
};

/// Times a scope and records it on the manifest when stopped or destroyed.
class StageTimer {
public:
    StageTimer(RunManifest& m, std::string stage) : m_(m), stage_(std::move(stage)) {}
    ~StageTimer() { stop(); }
    StageTimer(const StageTimer&) = delete;
    StageTimer& operator=(const StageTimer&) = delete;

    void stop()
    {
        if (done_)
            return;
        done_ = true;
        m_.add_timing(stage_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
    }

private:
    RunManifest& m_;
    std::string stage_;
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
    bool done_ = false;
};

}  // namespace framesift
