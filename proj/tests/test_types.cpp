#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "dyndb/index_set.hpp"
#include "dyndb/types.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace dyndb;
using namespace support;

namespace {

NeighborhoodType relabel(const NeighborhoodType& t, std::mt19937_64& rng) {
    std::vector<int> perm(static_cast<std::size_t>(t.structure.n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    NeighborhoodType out = t;
    for (auto& rel : out.structure.rels) {
        for (auto& tup : rel) {
            for (int& e : tup) e = perm[static_cast<std::size_t>(e)];
        }
        std::shuffle(rel.begin(), rel.end(), rng);
    }
    for (int& c : out.centres) c = perm[static_cast<std::size_t>(c)];
    return out;
}

NeighborhoodType edge_type(bool forward) {
    NeighborhoodType t;
    t.structure.n = 2;
    t.structure.rels = {{forward ? std::vector<int>{0, 1} : std::vector<int>{1, 0}}, {}};
    t.centres = {0, 1};
    t.radius = 0;
    return t;
}

}  // namespace

TEST(Canonicalize, RelabelInvariant) {
    std::mt19937_64 rng(3);
    Schema s = graph_schema();
    for (int round = 0; round < 10; ++round) {
        Database db = oracle::random_db(s, 3, 15, 35, rng);
        for (Const a : db.adom()) {
            NeighborhoodType t = type_of(db, {a}, 2);
            TypeId id = canonicalize(t);
            for (int rep = 0; rep < 3; ++rep) EXPECT_EQ(canonicalize(relabel(t, rng)), id);
        }
    }
}

TEST(Canonicalize, DirectedEdgeOrientation) {
    EXPECT_NE(canonicalize(edge_type(true)), canonicalize(edge_type(false)));
}

TEST(Canonicalize, IsolatedCentreStable) {
    NeighborhoodType t;
    t.structure.n = 1;
    t.structure.rels = {{}, {}};
    t.centres = {0};
    t.radius = 4;
    EXPECT_EQ(canonicalize(t), canonicalize(t));
    EXPECT_EQ(TypeTable::global().find(canonical_encoding(t)), canonicalize(t));
}

TEST(Canonicalize, DegreeBound) {
    Database db = db_with(graph_schema(), 3, {{"E", {1, 2}}, {"E", {1, 3}}, {"E", {1, 4}}});
    EXPECT_THROW(canonicalize(type_of(db, {1}, 1), 2), TypeError);
    EXPECT_NO_THROW(canonicalize(type_of(db, {1}, 1), 3));
}

TEST(Canonicalize, AgreesWithIsomorphism) {
    std::mt19937_64 rng(8);
    Schema s = graph_schema();
    Database db = oracle::random_db(s, 3, 14, 40, rng);
    auto dom = db.adom();
    for (Const a : dom) {
        for (Const b : dom) {
            auto na = induced_neighborhood(db, {a}, 1);
            auto nb = induced_neighborhood(db, {b}, 1);
            bool iso = isomorphic(na, {a}, nb, {b});
            EXPECT_EQ(iso, canonicalize(type_of(db, {a}, 1)) == canonicalize(type_of(db, {b}, 1)));
        }
    }
}

TEST(TypeOf, Examples) {
    Database db = db_with(graph_schema(), 2, {{"E", {1, 2}}});
    NeighborhoodType t = type_of(db, {1}, 1);
    EXPECT_EQ(t.structure.n, 2);
    EXPECT_EQ(t.structure.rels[0].size(), 1u);
    EXPECT_EQ(t.centres.size(), 1u);

    NeighborhoodType lone = type_of(db, {77}, 0);
    EXPECT_EQ(lone.structure.n, 1);
    EXPECT_TRUE(lone.structure.rels[0].empty());

    Database p = path_db(graph_schema(), 2, 3);
    NeighborhoodType mid = type_of(p, {2}, 0);
    EXPECT_EQ(mid.structure.n, 1);
    EXPECT_TRUE(mid.structure.rels[0].empty());
}

TEST(Decompose, Examples) {
    Decomposition d1 = decompose(edge_type(true));
    ASSERT_EQ(d1.sig.comps.size(), 1u);
    EXPECT_EQ(d1.sig.comps[0].arity, 2);
    EXPECT_EQ(d1.sig.comps[0].positions, 0b11u);

    NeighborhoodType two;
    two.structure.n = 2;
    two.structure.rels = {{}, {}};
    two.centres = {0, 1};
    Decomposition d2 = decompose(two);
    ASSERT_EQ(d2.sig.comps.size(), 2u);
    EXPECT_EQ(d2.sig.comps[0].positions, 0b01u);
    EXPECT_EQ(d2.sig.comps[1].positions, 0b10u);

    NeighborhoodType stray = two;
    stray.structure.n = 3;
    EXPECT_THROW(decompose(stray), TypeError);
}

TEST(Signature, OfTuples) {
    Database p = path_db(graph_schema(), 3, 2);
    EXPECT_EQ(signature_of_tuple(p, {1, 2}, 0).comps.size(), 1u);
    Database far = path_db(graph_schema(), 3, 9);  // dist(1,6) = 5
    EXPECT_EQ(signature_of_tuple(far, {1, 6}, 1).comps.size(), 2u);
    EXPECT_EQ(signature_of_tuple(far, {3, 3}, 1).comps.size(), 1u);
    EXPECT_EQ(signature_of_tuple(far, {4}, 2).comps.size(), 1u);
}

TEST(Signature, ReassembleRoundTrip) {
    std::mt19937_64 rng(21);
    Schema s = graph_schema();
    Database db = oracle::random_db(s, 2, 12, 25, rng);
    auto dom = db.adom();
    for (std::size_t i = 0; i < dom.size(); ++i) {
        for (std::size_t j = 0; j < dom.size(); ++j) {
            Tuple t{dom[i], dom[j], dom[(i + j) % dom.size()]};
            NeighborhoodType tau = type_of(db, t, 1);
            Signature sig = decompose(tau).sig;
            NeighborhoodType back = assemble(sig, 1);
            EXPECT_EQ(canonicalize(back), canonicalize(tau));
        }
    }
}

TEST(EnumerateTypes, TinyCatalogs) {
    Schema e = parse_schema("(schema (E 2))");
    EXPECT_EQ(enumerate_types(e, 2, 0, 1, 1000).size(), 2u);
    Schema p = parse_schema("(schema (P 1))");
    EXPECT_EQ(enumerate_types(p, 2, 0, 1, 1000).size(), 2u);
    for (const auto& t : enumerate_types(e, 2, 1, 1, 100000)) {
        EXPECT_EQ(canonicalize(t), canonicalize(t));
        EXPECT_TRUE(is_valid_type(t));
    }
    EXPECT_THROW(enumerate_types(e, 2, 1, 2, 5), CapExceeded);
}

TEST(EnumerateTypes, CoversRealizedTypes) {
    Schema e = parse_schema("(schema (E 2))");
    auto all = enumerate_types(e, 2, 1, 1, 1000000);
    std::set<TypeId> ids;
    for (const auto& t : all) ids.insert(canonicalize(t));
    EXPECT_EQ(ids.size(), all.size());
    std::mt19937_64 rng(4);
    Database db = oracle::random_db(e, 2, 10, 30, rng);
    for (Const a : db.adom()) EXPECT_TRUE(ids.count(canonicalize(type_of(db, {a}, 1))));
}

TEST(IndexPredicate, Examples) {
    Schema s = graph_schema();
    const char* text = R"(
        (type T1 (elems a b) (centres a b) (tuples (E a b)) (radius 0))
        (type T2 (elems a b) (centres a b) (tuples (E b a)) (radius 0))
        (type C (elems a) (centres a) (tuples (P a)) (radius 0))
        (free x y)
        (or (and (hanf atleast 1 C) (sphere T1 (x y))) (and (not (hanf atleast 1 C)) (sphere T2 (x y)))))";
    ParsedQuery q = parse_query(text, s);
    ASSERT_TRUE(q.hnf);
    NeighborhoodType t1 = q.types[0].type, t2 = q.types[1].type;
    EXPECT_TRUE(hnf_index_predicate(*q.hnf, 1, t1));
    EXPECT_FALSE(hnf_index_predicate(*q.hnf, 1, t2));
    EXPECT_TRUE(hnf_index_predicate(*q.hnf, 0, t2));
    EXPECT_EQ(compute_index_set(*q.hnf, 1, {t1, t2}), (std::vector<int>{0}));
    EXPECT_EQ(compute_index_set(*q.hnf, 0, {t1, t2}), (std::vector<int>{1}));

    ParsedQuery both = parse_query(R"(
        (type T1 (elems a b) (centres a b) (tuples (E a b)) (radius 0))
        (type T2 (elems a b) (centres a b) (tuples (E b a)) (radius 0))
        (free x y)
        (and (sphere T1 (x y)) (sphere T2 (x y))))", s);
    EXPECT_FALSE(hnf_index_predicate(*both.hnf, 0, t1));
    ParsedQuery neg = parse_query(R"(
        (type T1 (elems a b) (centres a b) (tuples (E a b)) (radius 0))
        (free x y)
        (not (sphere T1 (x y))))", s);
    EXPECT_TRUE(hnf_index_predicate(*neg.hnf, 0, t2));
    EXPECT_FALSE(hnf_index_predicate(*neg.hnf, 0, t1));
    ParsedQuery all = parse_query("(free x y) true", s);
    EXPECT_EQ(compute_index_set(*all.hnf, 0, {t1, t2}).size(), 2u);
}

TEST(IndexPredicate, AgreesWithOracleOnTuples) {
    std::mt19937_64 rng(9);
    Schema s = graph_schema();
    Database db = oracle::random_db(s, 3, 10, 30, rng);
    auto dom = db.adom();
    NeighborhoodType rho = type_of(db, {dom[0]}, 1);
    NeighborhoodType tau = type_of(db, {dom[1], dom[2]}, 1);
    std::string text = oracle::type_literal("R", rho, s) + oracle::type_literal("T", tau, s) +
                       "(free x y) (or (sphere T (x y)) (and (sphere R (y)) (not (sphere R (x)))))";
    ParsedQuery q = parse_query(text, s);
    ASSERT_TRUE(q.hnf);
    auto want = eval_query_oracle(db, q);
    for (Const a : dom) {
        for (Const b : dom) {
            bool got = hnf_index_predicate(*q.hnf, 0, type_of(db, {a, b}, 1));
            EXPECT_EQ(got, want.count({a, b}) != 0) << a << ' ' << b;
        }
    }
}
