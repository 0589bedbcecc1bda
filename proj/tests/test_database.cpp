#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dyndb/database.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace dyndb;
using namespace support;

TEST(Database, InsertIntoEmpty) {
    Database db(graph_schema(), 2);
    EXPECT_EQ(db.apply(ins("E", {1, 2})), UpdateOutcome::Applied);
    EXPECT_EQ(db.adom(), (std::vector<Const>{1, 2}));
}

TEST(Database, DegreeRejectionKeepsState) {
    Database db = db_with(graph_schema(), 2, {{"E", {1, 2}}, {"E", {1, 3}}});
    std::string before = db.serialize();
    EXPECT_EQ(db.apply(ins("E", {1, 4})), UpdateOutcome::RejectedDegree);
    EXPECT_EQ(db.serialize(), before);
    EXPECT_EQ(db.probe(ins("E", {4, 1})), UpdateOutcome::RejectedDegree);
}

TEST(Database, NoChange) {
    Database db = db_with(graph_schema(), 2, {{"E", {1, 2}}});
    EXPECT_EQ(db.apply(del("E", {7, 8})), UpdateOutcome::NoChange);
    EXPECT_EQ(db.apply(ins("E", {1, 2})), UpdateOutcome::NoChange);
}

TEST(Database, SchemaErrors) {
    Database db(graph_schema(), 2);
    EXPECT_THROW(db.apply(ins("F", {1, 2})), SchemaError);
    EXPECT_THROW(db.apply(ins("E", {1})), SchemaError);
    EXPECT_THROW(Database(graph_schema(), 1), SchemaError);
}

TEST(Database, LoopHasNoGaifmanEdge) {
    Database db = db_with(graph_schema(), 2, {{"E", {5, 5}}});
    EXPECT_TRUE(db.in_adom(5));
    EXPECT_EQ(db.degree(5), 0u);
}

TEST(Database, DeleteDecrementsSharedEdge) {
    Database db = db_with(graph_schema(), 2, {{"E", {1, 2}}, {"E", {2, 1}}});
    EXPECT_EQ(db.degree(1), 1u);
    db.apply(del("E", {1, 2}));
    EXPECT_EQ(db.degree(1), 1u);
    db.apply(del("E", {2, 1}));
    EXPECT_FALSE(db.in_adom(1));
    EXPECT_TRUE(db.adjacency_consistent());
}

TEST(Ball, PathExamples) {
    Database db = path_db(graph_schema(), 2, 5);
    EXPECT_EQ(ball(db, {3}, 1), (std::vector<Const>{2, 3, 4}));
    EXPECT_EQ(ball(db, {3}, 0), (std::vector<Const>{3}));
    EXPECT_EQ(ball(db, {42}, 2), (std::vector<Const>{42}));
}

TEST(Neighborhood, Examples) {
    Database db = db_with(graph_schema(), 2, {{"E", {1, 2}}, {"E", {2, 3}}});
    NeighborhoodDb n = induced_neighborhood(db, {1}, 1);
    EXPECT_EQ(n.elements, (std::vector<Const>{1, 2}));
    EXPECT_EQ(n.relations[0], (std::vector<Tuple>{{1, 2}}));
    EXPECT_TRUE(n.relations[1].empty());

    Database empty(graph_schema(), 2);
    NeighborhoodDb e = induced_neighborhood(empty, {}, 3);
    EXPECT_TRUE(e.elements.empty());

    Database one = db_with(graph_schema(), 2, {{"E", {1, 2}}});
    NeighborhoodDb p = induced_neighborhood(one, {1, 2}, 0);
    EXPECT_EQ(p.elements, (std::vector<Const>{1, 2}));
    EXPECT_EQ(p.relations[0], (std::vector<Tuple>{{1, 2}}));
}

TEST(Distance, Examples) {
    Database db = path_db(graph_schema(), 2, 3);
    EXPECT_TRUE(dist_leq(db, 1, 3, 2));
    EXPECT_FALSE(dist_leq(db, 1, 3, 1));
    EXPECT_TRUE(dist_leq(db, 2, 2, 0));
    Database two = db_with(graph_schema(), 2, {{"E", {1, 2}}, {"E", {3, 4}}});
    EXPECT_FALSE(dist_leq(two, 1, 3, 100));
}

TEST(Connected, Examples) {
    Database db = path_db(graph_schema(), 2, 3);
    EXPECT_TRUE(tuples_connected(db, {1, 3}, 1));
    EXPECT_TRUE(tuples_connected(db, {2}, 0));
    Database two = db_with(graph_schema(), 2, {{"E", {1, 2}}, {"E", {3, 4}}});
    EXPECT_FALSE(tuples_connected(two, {1, 3}, 1));
}

TEST(Isomorphic, Examples) {
    Database a = db_with(graph_schema(), 2, {{"E", {1, 2}}});
    Database b = db_with(graph_schema(), 2, {{"E", {8, 9}}});
    Database c = db_with(graph_schema(), 2, {{"E", {9, 8}}});
    auto na = induced_neighborhood(a, {1, 2}, 0);
    auto nb = induced_neighborhood(b, {8, 9}, 0);
    auto nc = induced_neighborhood(c, {8, 9}, 0);
    EXPECT_TRUE(isomorphic(na, {1, 2}, na, {1, 2}));
    EXPECT_TRUE(isomorphic(na, {1, 2}, nb, {8, 9}));
    EXPECT_FALSE(isomorphic(na, {1, 2}, nc, {8, 9}));
}

TEST(Database, RandomAgainstRebuild) {
    std::mt19937_64 rng(11);
    Schema s = graph_schema();
    for (int round = 0; round < 20; ++round) {
        int d = 2 + round % 2;
        Database db(s, d);
        std::uniform_int_distribution<Const> pc(1, 30);
        for (int step = 0; step < 150; ++step) {
            bool insert = rng() % 3 != 0;
            UpdateCmd c = rng() % 4 == 0 ? UpdateCmd{UpdateKind::Insert, "P", {pc(rng)}}
                                         : UpdateCmd{UpdateKind::Insert, "E", {pc(rng), pc(rng)}};
            if (!insert) c.kind = UpdateKind::Delete;
            db.apply(c);
            ASSERT_TRUE(db.adjacency_consistent());
            ASSERT_LE(db.max_degree(), static_cast<std::size_t>(d));
        }
        for (Const a : db.adom()) {
            for (int r = 0; r <= 2; ++r) {
                auto got = ball(db, {a}, r);
                EXPECT_EQ(got, oracle::naive_ball(db, {a}, r));
                EXPECT_LE(static_cast<double>(got.size()), std::pow(d, r + 1));
            }
        }
    }
}

TEST(Isomorphic, EquivalenceOnSamples) {
    std::mt19937_64 rng(5);
    Schema s = graph_schema();
    Database db = oracle::random_db(s, 2, 12, 30, rng);
    auto dom = db.adom();
    std::vector<std::pair<NeighborhoodDb, Tuple>> ns;
    for (Const a : dom) ns.emplace_back(induced_neighborhood(db, {a}, 1), Tuple{a});
    for (std::size_t i = 0; i < ns.size(); ++i) {
        EXPECT_TRUE(isomorphic(ns[i].first, ns[i].second, ns[i].first, ns[i].second));
        for (std::size_t j = 0; j < ns.size(); ++j) {
            bool ij = isomorphic(ns[i].first, ns[i].second, ns[j].first, ns[j].second);
            EXPECT_EQ(ij, isomorphic(ns[j].first, ns[j].second, ns[i].first, ns[i].second));
            if (!ij) continue;
            for (std::size_t l = 0; l < ns.size(); ++l) {
                if (isomorphic(ns[j].first, ns[j].second, ns[l].first, ns[l].second)) {
                    EXPECT_TRUE(isomorphic(ns[i].first, ns[i].second, ns[l].first, ns[l].second));
                }
            }
        }
    }
}
