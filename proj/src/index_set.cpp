#include "dyndb/index_set.hpp"

namespace dyndb {

std::vector<bool> sphere_leaf_values(const HnfQuery& q, const NeighborhoodType& tau) {
    std::vector<bool> out;
    out.reserve(q.spheres.size());
    for (const auto& s : q.spheres) {
        if (s.type.radius > tau.radius) throw TypeError("type radius smaller than a sphere atom radius");
        out.push_back(canonicalize(restrict_type(tau, s.positions, s.type.radius)) == s.id);
    }
    return out;
}

bool hnf_index_predicate(const HnfQuery& q, HanfValuation J, const NeighborhoodType& tau) {
    auto leaves = sphere_leaf_values(q, tau);
    return q.fold([&](int j) { return (J >> j & 1ULL) != 0; }, [&](int s) { return leaves[static_cast<std::size_t>(s)]; });
}

std::vector<int> compute_index_set(const HnfQuery& q, HanfValuation J, const std::vector<NeighborhoodType>& types) {
    std::vector<int> out;
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (hnf_index_predicate(q, J, types[i])) out.push_back(static_cast<int>(i));
    }
    return out;
}

}  // namespace dyndb
