#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace dyndb {

using Const = std::uint64_t;
using Tuple = std::vector<Const>;

struct TupleHash {
    std::size_t operator()(const Tuple& t) const noexcept {
        std::size_t h = 0x9e3779b97f4a7c15ULL ^ t.size();
        for (Const c : t) {
            h ^= std::hash<Const>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

class SchemaError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Schema {
    struct Relation {
        std::string name;
        int arity = 0;
    };
    std::vector<Relation> relations;

    Schema() = default;
    explicit Schema(std::vector<Relation> rels);

    int index_of(const std::string& name) const;  // -1 if absent
    int arity(int rel) const { return relations[static_cast<std::size_t>(rel)].arity; }
    std::size_t size() const { return relations.size(); }
    int total_arity() const;  // ||sigma||
};

enum class UpdateKind { Insert, Delete };

struct UpdateCmd {
    UpdateKind kind = UpdateKind::Insert;
    std::string relation;
    Tuple args;
};

enum class UpdateOutcome { Applied, RejectedDegree, NoChange };

const char* to_string(UpdateOutcome o);

// Relations over positive integers with a reference-counted Gaifman index.
// Every element's Gaifman degree stays <= the degree bound.
class Database {
  public:
    struct Incidence {
        int rel;
        Tuple tuple;
    };

    Database(Schema schema, int degree_bound);

    UpdateOutcome apply(const UpdateCmd& cmd);
    // Outcome that apply() would return, without mutating.
    UpdateOutcome probe(const UpdateCmd& cmd) const;

    const Schema& schema() const { return schema_; }
    int degree_bound() const { return d_; }

    bool contains(int rel, const Tuple& t) const;
    bool in_adom(Const a) const { return elems_.count(a) != 0; }
    std::size_t adom_size() const { return elems_.size(); }
    std::vector<Const> adom() const;  // sorted

    std::size_t degree(Const a) const;
    // Distinct Gaifman neighbours with the number of witnessing tuples.
    const std::vector<std::pair<Const, int>>& neighbors(Const a) const;
    const std::vector<Incidence>& incident(Const a) const;

    const std::unordered_set<Tuple, TupleHash>& relation(int rel) const { return rel_[static_cast<std::size_t>(rel)]; }
    std::size_t tuple_count() const;

    // Deterministic byte serialization of relations and the adjacency index.
    std::string serialize() const;
    // Rebuilds the Gaifman graph from the relations and compares with the index.
    bool adjacency_consistent() const;
    std::size_t max_degree() const;

  private:
    struct ElemInfo {
        std::vector<std::pair<Const, int>> nbrs;
        std::vector<Incidence> inc;
    };

    int resolve(const UpdateCmd& cmd) const;
    bool degree_ok(const Tuple& t) const;

    Schema schema_;
    int d_;
    std::vector<std::unordered_set<Tuple, TupleHash>> rel_;
    std::unordered_map<Const, ElemInfo> elems_;
};

UpdateOutcome apply_update(Database& db, const UpdateCmd& cmd);

// D restricted to a finite element set.
struct NeighborhoodDb {
    std::vector<Const> elements;             // sorted
    std::vector<std::vector<Tuple>> relations;  // per schema relation, sorted
    bool operator==(const NeighborhoodDb&) const = default;
};

// N_r(a) by bounded BFS. A constant outside adom contributes itself only.
std::vector<Const> ball(const Database& db, const Tuple& centres, int r);
NeighborhoodDb induced_neighborhood(const Database& db, const Tuple& centres, int r);
NeighborhoodDb restrict_to(const Database& db, const std::vector<Const>& sorted_elements);
bool dist_leq(const Database& db, Const a, Const b, int t);
bool tuples_connected(const Database& db, const Tuple& centres, int r);

// Structure over local indices 0..n-1; used by isomorphism and canonical forms.
struct LocalStructure {
    int n = 0;
    std::vector<std::vector<std::vector<int>>> rels;  // rels[R] = tuples
};

LocalStructure to_local(const NeighborhoodDb& nb, const Tuple& centres, std::vector<int>& local_centres);

bool isomorphic(const NeighborhoodDb& n1, const Tuple& c1, const NeighborhoodDb& n2, const Tuple& c2);
bool isomorphic_local(const LocalStructure& a, const std::vector<int>& ca, const LocalStructure& b,
                      const std::vector<int>& cb);

}  // namespace dyndb
