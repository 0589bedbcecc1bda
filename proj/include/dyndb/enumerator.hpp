#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dyndb/colored_graph.hpp"

namespace dyndb {

// Constant-delay enumeration of phi_c(G) with skip pointers. Each colour
// keeps a linked list; for y in C_i the support S_i^y and a table
// skip_i(y, V) for every V inside S_i^y with |V| <= c-1 are maintained.
// Must be attached to an empty graph.
class SkipEnumerator : public GraphObserver {
  public:
    using EmitFn = std::function<bool(const std::vector<Vid>&)>;  // false stops
    using EndFn = std::function<void()>;

    explicit SkipEnumerator(ColoredGraph& g);

    int colours() const { return c_; }
    // Both return false if the sink stopped early; end() is called otherwise.
    bool enumerate_fast(const EmitFn& emit, const EndFn& end = {}) const;
    bool enumerate_naive(const EmitFn& emit, const EndFn& end = {}) const;

    Vid first(int i) const { return lists_[static_cast<std::size_t>(i)].first; }
    Vid succ(int i, Vid y) const;
    std::vector<Vid> list(int i) const;

    // Table lookup; V may be any set of at most c-1 vertices.
    Vid skip(int i, Vid y, const std::vector<Vid>& V) const;
    // The same value by walking the list.
    Vid skip_scan(int i, Vid y, const std::vector<Vid>& V) const;

    const std::vector<std::vector<Vid>>& levels(int i, Vid y) const;  // E^1..E^c, sorted
    const std::vector<Vid>& support(int i, Vid y) const;
    std::size_t table_size(int i, Vid y) const;

    std::vector<int> small_colours() const;
    const std::vector<std::vector<Vid>>& small_tuples() const { return small_tuples_; }
    int degree() const { return delta_; }

    void after(const ColoredGraph& g, const GraphOp& op) override;

  private:
    struct Node {
        Vid prev = kVoid;
        Vid next = kVoid;
    };
    struct YState {
        std::vector<std::vector<Vid>> E;
        std::unordered_map<Vid, std::uint32_t> pos;  // position in E.back()
        std::unordered_map<std::uint64_t, Vid> table;
        std::vector<Vid> reads;
    };
    struct ListState {
        Vid first = kVoid;
        std::unordered_map<Vid, Node> nodes;
        std::unordered_map<Vid, YState> ys;
        std::unordered_map<Vid, std::unordered_set<Vid>> readers;
    };

    void compute(int i, Vid y);
    void drop(int i, Vid y);
    std::vector<Vid> adjacent_ys(int i, Vid x) const;
    void recompute_small();
    bool touches_small(const GraphOp& op, std::uint32_t small_mask) const;
    std::uint32_t classify() const;
    Vid scan_from(int i, Vid z, const std::vector<Vid>& V) const;

    const ColoredGraph& g_;
    int c_;
    std::vector<ListState> lists_;
    int delta_ = 0;
    std::uint32_t small_mask_ = 0;
    std::vector<int> perm_;  // small colours first
    std::size_t small_len_ = 0;
    std::vector<std::vector<Vid>> small_tuples_;  // in perm order, length small_len_
};

}  // namespace dyndb
