#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <unistd.h>

#include "sepkit/io.hpp"

namespace sepkit {

inline constexpr const char* kCodeVersion = "1.0.0";

/// JSON result cache. One file per key; a hit requires the stored key to match
/// the requested key exactly, so precision and degree never get substituted.
class ResultCache {
public:
    explicit ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    /// --cache-dir wins over SEPKIT_CACHE_DIR; nullopt when neither is set.
    static std::optional<ResultCache> locate(const std::string& flag_dir)
    {
        if (!flag_dir.empty()) {
            return ResultCache(flag_dir);
        }
        if (const char* env = std::getenv("SEPKIT_CACHE_DIR"); env && *env) {
            return ResultCache(env);
        }
        return std::nullopt;
    }

    /// Canonical key: the parameter object plus the code version.
    static Json make_key(Json params)
    {
        params["code_version"] = kCodeVersion;
        return params;
    }

    std::optional<Json> lookup(const Json& key) const
    {
        std::ifstream in(path_for(key));
        if (!in) {
            return std::nullopt;
        }
        try {
            Json entry = Json::parse(in);
            if (entry.at("key") != key) {
                return std::nullopt;
            }
            return entry.at("value");
        } catch (const nlohmann::json::exception&) {
            return std::nullopt; // unreadable entries count as misses
        }
    }

    void store(const Json& key, const Json& value, std::optional<int> certified_digits = std::nullopt) const
    {
        std::filesystem::create_directories(dir_);
        Json entry;
        entry["key"] = key;
        entry["value"] = value;
        if (certified_digits) {
            entry["certified_digits"] = *certified_digits;
        }
        entry["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                                 std::chrono::system_clock::now().time_since_epoch())
                                 .count();
        const auto final_path = path_for(key);
        auto tmp = final_path;
        tmp += ".tmp." + std::to_string(::getpid());
        {
            std::ofstream out(tmp, std::ios::trunc);
            if (!out) {
                throw Error("cannot write cache file " + tmp.string());
            }
            out << entry.dump(2) << '\n';
            if (!out.flush()) {
                throw Error("cannot write cache file " + tmp.string());
            }
        }
        std::filesystem::rename(tmp, final_path);
    }

    std::filesystem::path path_for(const Json& key) const
    {
        const std::string text = key.dump();
        std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
        for (unsigned char c : text) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        std::ostringstream name;
        name << std::hex << h << ".json";
        return dir_ / name.str();
    }

    const std::filesystem::path& directory() const { return dir_; }

private:
    std::filesystem::path dir_;
};

} // namespace sepkit
