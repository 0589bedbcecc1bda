#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dyndb/database.hpp"

namespace dyndb {

using TypeId = std::uint32_t;

class TypeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// An r-type with k centres: a small structure T with a centre tuple, where
// every element of T lies within distance r of some centre.
struct NeighborhoodType {
    LocalStructure structure;
    std::vector<int> centres;
    int radius = 0;
};

std::vector<std::vector<int>> gaifman_adjacency(const LocalStructure& s);
int max_degree(const LocalStructure& s);
// adom(T) equals N_r^T(centres).
bool is_valid_type(const NeighborhoodType& t);

// Canonical byte encoding; equal iff the types are isomorphic with centres
// mapped pointwise (and radii equal).
std::string canonical_encoding(const NeighborhoodType& t);

// Interning table for canonical encodings. Process-wide.
class TypeTable {
  public:
    static TypeTable& global();

    TypeId intern(const std::string& encoding, const NeighborhoodType& representative);
    std::optional<TypeId> find(const std::string& encoding) const;
    NeighborhoodType representative(TypeId id) const;
    std::string encoding(TypeId id) const;
    int arity(TypeId id) const;
    std::size_t size() const;

  private:
    mutable std::shared_mutex mu_;
    std::unordered_map<std::string, TypeId> ids_;
    std::vector<std::string> encodings_;
    std::vector<NeighborhoodType> reps_;
};

// Throws TypeError if degree_bound > 0 and the structure exceeds it.
TypeId canonicalize(const NeighborhoodType& t, int degree_bound = 0);

NeighborhoodType type_of(const Database& db, const Tuple& centres, int r);

// The type induced on N_{r2}^T of the centres at the given positions.
NeighborhoodType restrict_type(const NeighborhoodType& t, const std::vector<int>& positions, int r2);

struct SigComponent {
    int arity = 0;
    TypeId id = 0;
    std::uint64_t positions = 0;  // bit i set iff centre position i belongs here
    bool operator==(const SigComponent&) const = default;
};

struct Signature {
    int k = 0;
    std::vector<SigComponent> comps;  // ordered by smallest position
    bool operator==(const Signature&) const = default;
    std::string key() const;
    std::vector<int> positions_of(std::size_t comp) const;
};

struct Decomposition {
    Signature sig;
    std::vector<NeighborhoodType> components;
};

Decomposition decompose(const NeighborhoodType& t);
Signature signature_of_tuple(const Database& db, const Tuple& centres, int r);
// Disjoint union of the interned component representatives.
NeighborhoodType assemble(const Signature& sig, int radius);

class CapExceeded : public std::runtime_error {
  public:
    CapExceeded(std::size_t partial, std::size_t candidates)
        : std::runtime_error("type enumeration cap exceeded"), partial_count(partial), candidates_seen(candidates) {}
    std::size_t partial_count;
    std::size_t candidates_seen;
};

// All d-bounded r-types with k centres over the schema, up to isomorphism.
// Exhaustive; only usable at tiny parameters.
std::vector<NeighborhoodType> enumerate_types(const Schema& schema, int d, int r, int k, std::size_t cap);

}  // namespace dyndb
