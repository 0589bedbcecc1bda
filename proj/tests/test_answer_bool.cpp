#include <gtest/gtest.h>

#include <random>

#include "dyndb/answer_bool.hpp"
#include "dyndb/opcount.hpp"
#include "dyndb/session.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace dyndb;
using namespace support;

namespace {

const char* kOut = "(type OUT (elems a b) (centres a) (tuples (E a b)) (radius 1))";
const char* kIn = "(type IN (elems a b) (centres a) (tuples (E b a)) (radius 1))";

HnfQuery hnf(const std::string& text, const Schema& s) {
    ParsedQuery q = parse_query(text, s);
    EXPECT_TRUE(q.hnf);
    return *q.hnf;
}

// Keeps a database, its previous version and a BoolState in step.
struct Driven {
    Database db;
    BoolState st;
    Driven(const Schema& s, int d, const HnfQuery& q) : db(s, d), st(q) {}
    UpdateOutcome apply(const UpdateCmd& c) {
        if (db.probe(c) != UpdateOutcome::Applied) return db.probe(c);
        Database before = db;
        db.apply(c);
        bool_update(st, before, db, c);
        return UpdateOutcome::Applied;
    }
};

}  // namespace

TEST(BoolInit, Examples) {
    Schema s = parse_schema("(schema (E 2))");
    EXPECT_FALSE(BoolState(hnf(std::string(kOut) + "(exists>= 1 x (sphere OUT (x)))", s)).answer());
    EXPECT_TRUE(BoolState(hnf(std::string(kOut) + "(existsmod 0 2 x (sphere OUT (x)))", s)).answer());
    EXPECT_TRUE(BoolState(hnf(std::string(kOut) + "(not (exists>= 1 x (sphere OUT (x))))", s)).answer());
}

// E is directed, so "degree one" splits into an out-type and an in-type.
TEST(BoolUpdate, DegreeOneElements) {
    Schema s = parse_schema("(schema (E 2))");
    HnfQuery q = hnf(std::string(kOut) + kIn + "(or (hanf atleast 1 OUT) (hanf atleast 1 IN))", s);
    Driven x(s, 2, q);
    x.apply(ins("E", {1, 2}));
    EXPECT_EQ(x.st.count(0) + x.st.count(1), 2);
    EXPECT_TRUE(x.st.answer());
    EXPECT_TRUE(x.st.answer());
    x.apply(del("E", {1, 2}));
    EXPECT_EQ(x.st.count(0) + x.st.count(1), 0);
    EXPECT_FALSE(x.st.answer());
}

TEST(BoolUpdate, FarUpdateKeepsCounter) {
    Schema s = parse_schema("(schema (E 2))");
    Driven x(s, 2, hnf(std::string(kOut) + "(hanf atleast 1 OUT)", s));
    x.apply(ins("E", {1, 2}));
    long long a = x.st.count(0);
    x.apply(ins("E", {10, 11}));
    x.apply(ins("E", {11, 12}));
    x.apply(del("E", {11, 12}));
    EXPECT_EQ(x.st.count(0), a + 1);
}

TEST(BoolUpdate, CensusMatchesOracle) {
    std::mt19937_64 rng(31);
    Schema s = support::graph_schema();
    for (int round = 0; round < 6; ++round) {
        int d = 2 + round % 2;
        Database seed = oracle::random_db(s, d, 10, 14, rng);
        auto dom = seed.adom();
        NeighborhoodType r1 = type_of(seed, {dom[0]}, 1);
        NeighborhoodType r0 = type_of(seed, {dom[1]}, 0);
        std::string types = oracle::type_literal("A", r1, s) + oracle::type_literal("B", r0, s);
        std::string text = types + "(or (and (hanf atleast 2 A) (not (hanf mod 1 3 B))) (hanf mod 0 2 A))";
        HnfQuery q = hnf(text, s);
        ParsedQuery full = parse_query(text, s);
        ParsedQuery ca = parse_query(types + "(free x) (sphere A (x))", s);
        ParsedQuery cb = parse_query(types + "(free x) (sphere B (x))", s);
        Driven x(s, d, q);
        for (int step = 0; step < 150; ++step) {
            x.apply(random_update(x.db, rng, 30));
            ASSERT_EQ(x.st.count(0), static_cast<long long>(eval_query_oracle(x.db, ca).size()));
            ASSERT_EQ(x.st.count(1), static_cast<long long>(eval_query_oracle(x.db, cb).size()));
            ASSERT_EQ(x.st.answer(), !eval_query_oracle(x.db, full).empty());
        }
    }
}

TEST(BoolUpdate, OpsIndependentOfSize) {
    Schema s = support::graph_schema();
    HnfQuery q = hnf(std::string("(type M (elems a b c) (centres b) (tuples (E a b) (E b c)) (radius 1))") +
                         "(hanf atleast 5 M)",
                     s);
    std::vector<std::uint64_t> worst;
    for (Const n : {100u, 1000u, 10000u}) {
        Database db(s, 2);
        BoolState st(q);
        auto step = [&](const UpdateCmd& c) -> std::uint64_t {
            ops::Span sp;
            st.prepare(db, c);
            db.apply(c);
            st.commit(db);
            return sp.elapsed();
        };
        for (Const i = 1; i < n; ++i) step(ins("E", {i, i + 1}));
        std::uint64_t w = 0;
        for (Const i = n / 2; i < n / 2 + 30; ++i) {
            w = std::max(w, step(del("E", {i, i + 1})));
            w = std::max(w, step(ins("E", {i, i + 1})));
        }
        EXPECT_EQ(st.count(0), static_cast<long long>(n - 2));
        worst.push_back(w);
    }
    EXPECT_LT(static_cast<double>(worst[2]), 2.0 * static_cast<double>(worst[0]));
    EXPECT_LT(static_cast<double>(worst[0]), 2.0 * static_cast<double>(worst[2]));
}
