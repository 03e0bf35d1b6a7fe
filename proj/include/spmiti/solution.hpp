#ifndef SPMITI_SOLUTION_HPP
#define SPMITI_SOLUTION_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace spmiti {

struct DeployedProtection {
    std::string cp_id;
    std::string artifact_id;

    auto operator<=>(const DeployedProtection&) const = default;
};

// Ordered list of deployed protections. The empty list is the vanilla solution.
struct Solution {
    std::vector<DeployedProtection> dsps;
    std::string label;  // only set in scripted-evaluation mode

    bool vanilla() const { return dsps.empty(); }
    // Order-sensitive FNV-1a over (cp_id, artifact_id) pairs and the label.
    std::uint64_t canonical_hash() const;
    std::string to_string() const;

    bool operator==(const Solution& other) const {
        return dsps == other.dsps && label == other.label;
    }
};

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 14695981039346656037ull);
std::uint64_t fnv1a_str(const std::string& s, std::uint64_t seed = 14695981039346656037ull);

}  // namespace spmiti

#endif
