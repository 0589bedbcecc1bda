#pragma once

#include <cstdint>
#include <vector>

#include "dyndb/database.hpp"
#include "dyndb/index_set.hpp"
#include "dyndb/logic.hpp"

namespace dyndb {

// Counters A[j] = number of elements whose r_j-type is rho_j, one per Hanf
// sentence, folded into a cached answer.
class BoolState {
  public:
    // Sphere leaves are not allowed when the query is used for answer().
    explicit BoolState(const HnfQuery& q);

    // Two-phase update: prepare on the database before an applied update,
    // commit on the database after it.
    void prepare(const Database& before, const UpdateCmd& cmd);
    void commit(const Database& after);

    bool answer() const { return ans_; }
    long long count(std::size_t j) const { return A_[j]; }
    std::size_t sentences() const { return hanf_.size(); }
    HanfValuation valuation() const { return J_; }

  private:
    void refold();

    std::vector<HanfSentence> hanf_;
    HnfNode root_;
    bool sentence_;
    std::vector<long long> A_;
    std::vector<std::vector<Const>> pending_;  // U_j
    bool prepared_ = false;
    HanfValuation J_ = 0;
    bool ans_ = false;
};

// Convenience wrapper for callers holding both databases.
void bool_update(BoolState& s, const Database& before, const Database& after, const UpdateCmd& cmd);

}  // namespace dyndb
