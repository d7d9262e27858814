#include "framesift/manifest.hpp"

#include "framesift/core.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

namespace framesift {

namespace fs = std::filesystem;

namespace {

struct Digest {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

    Digest()
    {
        if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
            throw Error("sha256 init failed");
    }
    void update(const void* data, std::size_t n)
    {
        if (EVP_DigestUpdate(ctx.get(), data, n) != 1)
            throw Error("sha256 update failed");
    }
    std::string hex()
    {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
            throw Error("sha256 final failed");
        std::string out;
        for (unsigned i = 0; i < len; ++i)
            out += fmt::format("{:02x}", md[i]);
        return out;
    }
};

}  // namespace

std::string sha256_hex(std::string_view bytes)
{
    Digest d;
    d.update(bytes.data(), bytes.size());
    return d.hex();
}

std::string sha256_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(fmt::format("cannot read '{}'", path.string()));
    Digest d;
    std::array<char, 1 << 16> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return d.hex();
}

RunManifest::RunManifest(std::string command) : command_(std::move(command)) {}

void RunManifest::add_input(std::string role, const fs::path& path)
{
    inputs_.emplace_back(std::move(role), path.string());
}

void RunManifest::add_output(const fs::path& path)
{
    outputs_.emplace_back(path.string(), sha256_file(path));
}

void RunManifest::add_timing(std::string stage, double seconds)
{
    timings_.emplace_back(std::move(stage), seconds);
}

void RunManifest::add_note(std::string key, std::string value)
{
    notes_[std::move(key)] = std::move(value);
}

std::string RunManifest::to_json() const
{
    nlohmann::ordered_json j;
    j["tool"] = "framesift";
    j["version"] = kVersion;
    j["command"] = command_;
    j["config"] = config_;
    auto& in = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto& [role, path] : inputs_)
        in.push_back({{"role", role}, {"path", path}});
    auto& t = j["timings_s"] = nlohmann::ordered_json::object();
    for (const auto& [stage, s] : timings_)
        t[stage] = s;
    auto& out = j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& [path, hash] : outputs_)
        out.push_back({{"path", path}, {"sha256", hash}});
    if (!notes_.empty())
        j["notes"] = notes_;
    return j.dump(2) + "\n";
}

void RunManifest::write(const fs::path& path) const
{
    std::ofstream out(path, std::ios::binary);
    out << to_json();
    if (!out)
        throw Error(fmt::format("cannot write '{}'", path.string()));
}

}  // namespace framesift
