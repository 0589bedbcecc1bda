#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dyndb/colored_graph.hpp"

namespace dyndb {

using Count = __int128;
std::string to_string(Count v);

// Maintains n3 = |phi_c(G)|, the number of c-tuples (v_1..v_c) with v_j in
// T_j and no edge between v_j and v_j' for j != j'. Works by
// inclusion-exclusion over nonempty sets K of ordered pairs. Must be attached
// to an empty graph.
class PatternCounter : public GraphObserver {
  public:
    static constexpr int kMaxColours = 5;

    explicit PatternCounter(ColoredGraph& g);

    Count n1() const { return n1_; }
    Count n2() const { return n2_; }
    Count n3() const { return n1_ - n2_; }
    // |phi_K(G)|, K a bitmask over pairs().
    Count phi(std::uint64_t K) const;
    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
    std::size_t pattern_count() const { return patterns_.size(); }

    void before(const ColoredGraph& g, const GraphOp& op) override;
    void after(const ColoredGraph& g, const GraphOp& op) override;

  private:
    struct Pattern {
        std::uint32_t vmask = 0;
        std::uint32_t emask = 0;  // undirected colour pairs
        std::vector<int> order;   // BFS order, order[0] is the anchor
        std::vector<int> parent;  // index into order
        std::vector<std::vector<int>> checks;  // earlier order indices adjacent to order[t]
        std::unordered_map<Vid, std::int64_t> cnt;
        Count m = 0;
    };

    std::int64_t count_at(const Pattern& p, Vid v) const;
    void refresh(const std::vector<Vid>& region, int colour);
    std::vector<Vid> region_of(const GraphOp& op) const;
    int upair(int a, int b) const;

    const ColoredGraph& g_;
    int c_;
    std::vector<std::pair<int, int>> pairs_;
    std::vector<Pattern> patterns_;
    std::vector<std::vector<int>> comps_;  // per K: pattern indices
    std::vector<Count> phi_;
    Count n1_ = 0;
    Count n2_ = 0;
    std::vector<Vid> pending_;
};

// Direct count of phi_K over all assignments; for tests. Throws on K == 0
// or when the assignment space exceeds the guard.
Count count_phiK_bruteforce(const ColoredGraph& g, std::uint64_t K, const std::vector<std::pair<int, int>>& pairs,
                            std::uint64_t guard = 50'000'000);

}  // namespace dyndb
