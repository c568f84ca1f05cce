#pragma once

#include <openssl/evp.h>

#include <array>
#include <string>
#include <string_view>

#include <json.hpp>

#include "nre/equation.hpp"

namespace nre {

inline std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xF]);
    }
    return out;
}

/// Compact sorted-key JSON of the dynamics-relevant fields only.
inline std::string canonical_serialization(const NeuronEquation& eq) {
    nlohmann::json j;
    j["coeffs"] = std::vector<std::int64_t>(eq.coeffs().begin(), eq.coeffs().end());
    j["memory_k"] = eq.memory();
    j["threshold2"] = eq.threshold2();
    return j.dump();
}

inline std::string equation_digest(const NeuronEquation& eq) {
    return sha256_hex(canonical_serialization(eq));
}

}  // namespace nre
