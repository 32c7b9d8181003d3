// Copyright 2026 The basinvqe Authors
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
#pragma once

#include <openssl/evp.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "../common.hpp"
#include "../hamiltonian_io.hpp"

namespace basinvqe::cli {

/// Lower-case hex SHA-256 of a file's bytes.
inline std::string sha256_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path + "' for hashing");
    }
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                                 &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw NumericalError("sha256: digest initialization failed");
    }
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) {
            EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
        }
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
    static const char *hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

struct RunManifest {
    std::string command;
    std::map<std::string, std::string> config;
    std::string version = kVersion;
    std::map<std::string, std::string> input_digests; // path -> sha256
    std::vector<std::string> outputs;
    double wall_time_s = 0.0;
    int exit_code = 0;
    std::string error;

    void add_input(const std::string &path) { input_digests[path] = sha256_file(path); }

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["version"] = version;
        j["config"] = config;
        j["inputs"] = input_digests;
        j["outputs"] = outputs;
        j["wall_time_s"] = wall_time_s;
        j["exit_code"] = exit_code;
        if (!error.empty()) {
            j["error"] = error;
        }
        return j;
    }

    void write(const std::filesystem::path &dir) const {
        io::write_file((dir / "manifest.json").string(), to_json().dump(2) + "\n");
    }
};

} // namespace basinvqe::cli
