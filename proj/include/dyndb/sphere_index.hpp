#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dyndb/colored_graph.hpp"
#include "dyndb/database.hpp"
#include "dyndb/types.hpp"

namespace dyndb {

constexpr TypeId kNoType = 0xffffffffu;

struct IndexEvent {
    enum class Kind { EdgeDelete, ColourDelete, ColourInsert, EdgeInsert };
    Kind kind;
    Vid u;
    Vid v = kVoid;
    TypeId u_id = kNoType;  // colour events: the colour; edge events: endpoint ids at that moment
    TypeId v_id = kNoType;
};

// Events are ordered: edge deletions, colour deletions, colour insertions,
// edge insertions.
struct DeltaBatch {
    std::vector<IndexEvent> events;
    std::vector<TypeId> new_ids;  // ids this index sees for the first time
    std::size_t touched = 0;      // candidate tuples examined
};

struct IndexSnapshot {
    std::map<Tuple, TypeId> gamma;
    std::set<std::pair<Tuple, Tuple>> edges;  // both orientations and self-pairs
    bool operator==(const IndexSnapshot&) const = default;
};

// Gamma for arities 1..k: tuples whose r-neighbourhood is connected, with
// type ids, plus conflict edges between tuples at distance <= 2r+1.
class SphereIndex {
  public:
    SphereIndex(int k, int r, int d);

    int k() const { return k_; }
    int r() const { return r_; }

    // db is the database after an applied update.
    DeltaBatch apply(const Database& db, const UpdateCmd& cmd);

    std::optional<TypeId> lookup_gamma(const Tuple& b) const;
    Vid vertex_of(const Tuple& b) const;  // kVoid if absent
    const Tuple& tuple_of(Vid v) const { return tuples_[v]; }
    TypeId type_of_vertex(Vid v) const { return ids_[v]; }
    bool alive(Vid v) const { return v < ids_.size() && ids_[v] != kNoType; }
    const std::vector<Vid>& extent(TypeId id) const;
    const std::unordered_set<Vid>& conflicts(Vid v) const { return adj_[v]; }
    bool conflict(Vid u, Vid v) const { return adj_[u].count(v) != 0; }
    std::size_t gamma_size() const { return vid_of_.size(); }
    std::size_t max_conflict_degree() const;
    double degree_bound() const;

    // Ids ever held by some tuple of the given arity, in first-seen order.
    const std::vector<TypeId>& realized(int arity) const { return realized_[static_cast<std::size_t>(arity)]; }

    IndexSnapshot snapshot() const;

  private:
    Vid alloc(const Tuple& t);
    void extent_add(TypeId id, Vid v);
    void extent_remove(TypeId id, Vid v);
    const std::unordered_set<Const>& near(const Database& db, Const a);

    int k_, r_, d_, rprime_;
    std::unordered_map<Tuple, Vid, TupleHash> vid_of_;
    std::vector<Tuple> tuples_;
    std::vector<TypeId> ids_;
    std::vector<std::unordered_set<Vid>> adj_;
    std::vector<std::uint32_t> ext_pos_;
    std::unordered_map<TypeId, std::vector<Vid>> extents_;
    std::unordered_map<Const, std::unordered_set<Vid>> by_elem_;
    std::vector<Vid> free_;
    std::vector<std::vector<TypeId>> realized_;
    std::unordered_set<TypeId> seen_ids_;
    std::unordered_map<Const, std::unordered_set<Const>> near_cache_;  // per update
};

}  // namespace dyndb
