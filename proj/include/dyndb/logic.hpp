#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyndb/database.hpp"
#include "dyndb/sexpr.hpp"
#include "dyndb/types.hpp"

namespace dyndb {

// FO+MOD syntax tree. Sphere atoms are carried so that Hanf-normal-form
// inputs share the same tree and the same oracle.
struct Formula {
    enum class Kind { True, False, Eq, Rel, Not, And, Or, Exists, ExistsGeq, ExistsMod, Sphere };
    Kind kind = Kind::True;
    std::vector<std::string> vars;  // Eq: 2, Rel/Sphere: arguments, quantifiers: bound variable
    int rel = -1;
    long long m = 0;  // ExistsGeq threshold or ExistsMod modulus
    long long i = 0;  // ExistsMod residue
    std::shared_ptr<const NeighborhoodType> type;  // Sphere
    std::string type_name;
    std::vector<std::shared_ptr<const Formula>> kids;
};
using FormulaPtr = std::shared_ptr<const Formula>;

std::set<std::string> free_variables(const Formula& f);
int quantifier_rank(const Formula& f);

struct HanfSentence {
    enum class Kind { AtLeast, Mod };
    Kind kind = Kind::AtLeast;
    long long m = 1;
    long long i = 0;
    NeighborhoodType type;  // one centre
    TypeId id = 0;
    bool holds(long long count) const { return kind == Kind::AtLeast ? count >= m : count % m == i; }
};

struct SphereAtom {
    NeighborhoodType type;
    TypeId id = 0;
    std::vector<int> positions;  // indices into the free-variable list
};

struct HnfNode {
    enum class Kind { True, False, Not, And, Or, Hanf, Sphere };
    Kind kind = Kind::True;
    int leaf = -1;
    std::vector<HnfNode> kids;
};

struct HnfQuery {
    std::vector<std::string> free;
    HnfNode root;
    std::vector<HanfSentence> hanf;
    std::vector<SphereAtom> spheres;

    int k() const { return static_cast<int>(free.size()); }
    int radius() const;  // max sphere-atom radius, 0 if none
    // Folds the tree given leaf values.
    template <class HanfFn, class SphereFn>
    bool fold(HanfFn&& hanf_value, SphereFn&& sphere_value) const {
        return fold_node(root, hanf_value, sphere_value);
    }

  private:
    template <class HanfFn, class SphereFn>
    static bool fold_node(const HnfNode& n, HanfFn& h, SphereFn& s) {
        switch (n.kind) {
            case HnfNode::Kind::True: return true;
            case HnfNode::Kind::False: return false;
            case HnfNode::Kind::Not: return !fold_node(n.kids[0], h, s);
            case HnfNode::Kind::And:
                for (const auto& c : n.kids) {
                    if (!fold_node(c, h, s)) return false;
                }
                return true;
            case HnfNode::Kind::Or:
                for (const auto& c : n.kids) {
                    if (fold_node(c, h, s)) return true;
                }
                return false;
            case HnfNode::Kind::Hanf: return h(n.leaf);
            case HnfNode::Kind::Sphere: return s(n.leaf);
        }
        return false;
    }
};

struct TypeLiteral {
    std::string name;
    NeighborhoodType type;
};

struct ParsedQuery {
    std::vector<TypeLiteral> types;
    std::vector<std::string> free;
    FormulaPtr formula;
    std::optional<HnfQuery> hnf;  // set when the formula is in Hanf normal form
};

Schema parse_schema(const std::string& text);
ParsedQuery parse_query(const std::string& text, const Schema& schema);
TypeLiteral parse_type_literal(const SExpr& e, const Schema& schema);
std::optional<HnfQuery> to_hnf(const Formula& f, const std::vector<std::string>& free);
// Checks every leaf type against the degree bound; throws TypeError.
void check_degree(const HnfQuery& q, int d);

class OracleError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using Assignment = std::map<std::string, Const>;

// Exhaustive active-domain evaluation. Refuses when |adom|^qr > 1e8.
bool eval_oracle(const Database& db, const Formula& f, const Assignment& alpha);
// { a in adom^k : (D, a) |= q } for the query's free-variable order.
std::set<Tuple> eval_query_oracle(const Database& db, const ParsedQuery& q);
std::set<Tuple> eval_query_oracle(const Database& db, const Formula& f, const std::vector<std::string>& free);

}  // namespace dyndb
