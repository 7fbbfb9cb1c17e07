// Copyright 2026 The qduff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QDUFF_MANIFEST_HPP
#define QDUFF_MANIFEST_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "qduff/version.hpp"

namespace qduff {

/// FNV-1a 64-bit hash of a file's bytes; the per-run content fingerprint.
inline std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open " + path + " for hashing");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Run metadata: the exact configuration snapshot needed to reproduce every
/// numeric output bit-for-bit, plus content hashes of the files produced.
struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::uint64_t master_seed = 0;
    double wall_seconds = 0.0;
    std::map<std::string, std::string> file_hashes;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["version"] = kVersion;
        j["config"] = config;
        j["master_seed"] = master_seed;
        j["wall_seconds"] = wall_seconds;
        j["file_hashes"] = file_hashes;
        return j;
    }

    static RunManifest from_json(const nlohmann::json& j) {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.config = j.at("config");
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        m.wall_seconds = j.value("wall_seconds", 0.0);
        if (j.contains("file_hashes"))
            m.file_hashes = j.at("file_hashes").get<std::map<std::string, std::string>>();
        return m;
    }
};

inline void write_manifest(const std::string& path, const RunManifest& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open " + path + " for writing");
    out << manifest.to_json().dump(2) << '\n';
    out.close();
    if (out.fail()) throw std::ios_base::failure("failed writing manifest");
}

inline RunManifest read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open manifest " + path);
    nlohmann::json j;
    in >> j;
    return RunManifest::from_json(j);
}

}  // namespace qduff

#endif  // QDUFF_MANIFEST_HPP
