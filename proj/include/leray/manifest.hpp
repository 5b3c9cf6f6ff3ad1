#pragma once

#include <cstdint>
#include <ctime>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "leray/csv.hpp"
#include "leray/version.hpp"

namespace leray {

/// FNV-1a 64-bit digest as 16 hex characters. Applied to canonicalized
/// (parsed and re-serialized) configs so formatting differences do not
/// change the digest.
inline std::string fnv1a_hex(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

inline std::string iso_utc_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

struct RunManifest {
    std::string command;
    std::string config_digest;
    std::string tool_version = kToolVersion;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;
    std::string status = "ok"; // "ok" or "blow_up"
    double failure_time = 0.0; // meaningful when status == "blow_up"
};

inline nlohmann::json manifest_to_json(const RunManifest& m) {
    nlohmann::json j{{"command", m.command},
                     {"config_digest", m.config_digest},
                     {"tool_version", m.tool_version},
                     {"started_at", m.started_at},
                     {"finished_at", m.finished_at},
                     {"outputs", m.outputs},
                     {"status", m.status}};
    if (m.status == "blow_up") j["failure_time"] = m.failure_time;
    return j;
}

inline void manifest_write(const RunManifest& m, const std::string& path) {
    write_text_file(path, manifest_to_json(m).dump(2) + "\n");
}

} // namespace leray
