/*
 * Copyright 2026 the urbanlinq authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef URBANLINQ_FILEIO_HPP
#define URBANLINQ_FILEIO_HPP

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"

// Binary container used by map, radiomap and model files: a single compact
// JSON line, '\n', then a raw payload whose layout the header describes.
// JSON-only files (scenario, matrix, schedule, report) are plain .json.

namespace ulinq {

using json = nlohmann::json;

inline void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    require(bool(os), "cannot open for writing: " + path.string());
    os.write(bytes.data(), std::streamsize(bytes.size()));
    require(bool(os), "write failed: " + path.string());
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    require(bool(is), "cannot open: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return bytes;
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
    write_file_bytes(path, j.dump() + "\n");
}

inline json read_json_file(const std::filesystem::path& path) {
    try {
        return json::parse(read_file_bytes(path));
    } catch (const json::exception& e) {
        throw error("bad JSON in " + path.string() + ": " + e.what());
    }
}

inline void write_header_blob(const std::filesystem::path& path, const json& header,
                              const std::string& blob) {
    write_file_bytes(path, header.dump() + "\n" + blob);
}

struct HeaderBlob {
    json header;
    std::string blob;
};

inline HeaderBlob read_header_blob(const std::filesystem::path& path) {
    std::string bytes = read_file_bytes(path);
    auto nl = bytes.find('\n');
    require(nl != std::string::npos, "missing header line: " + path.string());
    HeaderBlob hb;
    try {
        hb.header = json::parse(bytes.substr(0, nl));
    } catch (const json::exception& e) {
        throw error("bad header in " + path.string() + ": " + e.what());
    }
    hb.blob = bytes.substr(nl + 1);
    return hb;
}

// float32 little-endian packing for binary payloads
inline void append_f32le(std::string& out, float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    out.push_back(char(u & 0xff));
    out.push_back(char((u >> 8) & 0xff));
    out.push_back(char((u >> 16) & 0xff));
    out.push_back(char((u >> 24) & 0xff));
}

inline float read_f32le(const char* p) {
    auto b = [&](int i) { return std::uint32_t(std::uint8_t(p[i])); };
    std::uint32_t u = b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
    float v;
    std::memcpy(&v, &u, 4);
    return v;
}

inline std::string pack_f32le(const std::vector<double>& vals) {
    std::string out;
    out.reserve(vals.size() * 4);
    for (double v : vals) append_f32le(out, float(v));
    return out;
}

inline std::vector<double> unpack_f32le(const std::string& blob, std::size_t offset,
                                        std::size_t count) {
    require(offset + count * 4 <= blob.size(), "binary payload too short");
    std::vector<double> vals(count);
    for (std::size_t i = 0; i < count; ++i)
        vals[i] = double(read_f32le(blob.data() + offset + i * 4));
    return vals;
}

} // namespace ulinq

#endif
