#include "spmiti/solution.hpp"

namespace spmiti {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a_str(const std::string& s, std::uint64_t seed) {
    return fnv1a(s.data(), s.size(), seed);
}

std::uint64_t Solution::canonical_hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (const auto& d : dsps) {
        h = fnv1a_str(d.cp_id, h);
        h = fnv1a("|", 1, h);
        h = fnv1a_str(d.artifact_id, h);
        h = fnv1a(";", 1, h);
    }
    if (!label.empty()) h = fnv1a_str(label, h);
    return h;
}

std::string Solution::to_string() const {
    if (!label.empty()) return label;
    if (dsps.empty()) return "vanilla";
    std::string out;
    for (const auto& d : dsps) {
        if (!out.empty()) out += ", ";
        out += d.cp_id + "(" + d.artifact_id + ")";
    }
    return out;
}

}  // namespace spmiti
