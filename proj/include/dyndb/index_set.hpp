#pragma once

#include <cstdint>
#include <vector>

#include "dyndb/logic.hpp"
#include "dyndb/types.hpp"

namespace dyndb {

// Bit j of a valuation is set iff the j-th Hanf sentence of the query holds.
using HanfValuation = std::uint64_t;
constexpr int kMaxHanfSentences = 16;

// Truth of every sphere atom on a tuple of type tau (tau.radius must cover
// every atom radius).
std::vector<bool> sphere_leaf_values(const HnfQuery& q, const NeighborhoodType& tau);

// psi_J evaluated on tau: Hanf leaves become (j in J), sphere atoms are
// compared on the restriction of tau to their own radius.
bool hnf_index_predicate(const HnfQuery& q, HanfValuation J, const NeighborhoodType& tau);

// Indices i with hnf_index_predicate(q, J, types[i]).
std::vector<int> compute_index_set(const HnfQuery& q, HanfValuation J, const std::vector<NeighborhoodType>& types);

}  // namespace dyndb
