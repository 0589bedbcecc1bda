#include <gtest/gtest.h>

#include <random>

#include "dyndb/session.hpp"
#include "dyndb/sphere_index.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace dyndb;
using namespace support;

namespace {

// Database plus index kept in step.
struct Indexed {
    Database db;
    SphereIndex index;
    Indexed(const Schema& s, int d, int k, int r) : db(s, d), index(k, r, d) {}
    UpdateOutcome apply(const UpdateCmd& c) {
        UpdateOutcome o = db.apply(c);
        if (o == UpdateOutcome::Applied) last = index.apply(db, c);
        return o;
    }
    DeltaBatch last;
};

}  // namespace

TEST(SphereIndex, SingleEdge) {
    Indexed x(graph_schema(), 2, 2, 0);
    x.apply(ins("E", {1, 2}));
    IndexSnapshot snap = x.index.snapshot();
    std::set<Tuple> gamma;
    for (const auto& [t, _] : snap.gamma) gamma.insert(t);
    EXPECT_EQ(gamma, (std::set<Tuple>{{1}, {2}, {1, 2}, {2, 1}, {1, 1}, {2, 2}}));
    EXPECT_EQ(snap.edges.size(), 36u);
    EXPECT_EQ(snap, oracle::naive_index(x.db, 2, 0));
    EXPECT_EQ(*x.index.lookup_gamma({1, 2}), canonicalize(type_of(x.db, {1, 2}, 0)));
    EXPECT_FALSE(x.index.lookup_gamma({1, 9}));
    EXPECT_TRUE(x.index.lookup_gamma({1}));
    EXPECT_TRUE(x.index.lookup_gamma({2}));

    x.apply(del("E", {1, 2}));
    EXPECT_EQ(x.index.gamma_size(), 0u);
    EXPECT_TRUE(x.index.snapshot().edges.empty());
}

TEST(SphereIndex, BatchOrdering) {
    Indexed x(graph_schema(), 2, 2, 0);
    x.apply(ins("E", {1, 2}));
    x.apply(ins("E", {2, 3}));
    x.apply(del("E", {1, 2}));
    int phase = 0;
    for (const auto& ev : x.last.events) {
        int p = static_cast<int>(ev.kind);
        EXPECT_GE(p, phase);
        phase = p;
    }
}

TEST(SphereIndex, FarUpdateLeavesTypes) {
    Indexed x(graph_schema(), 2, 2, 1);
    for (Const i = 1; i < 30; ++i) x.apply(ins("E", {i, i + 1}));
    TypeId before = *x.index.lookup_gamma({3, 4});
    Vid v = x.index.vertex_of({3, 4});
    x.apply(ins("P", {25}));
    x.apply(del("E", {27, 28}));
    EXPECT_EQ(*x.index.lookup_gamma({3, 4}), before);
    EXPECT_EQ(x.index.vertex_of({3, 4}), v);
}

TEST(SphereIndex, RandomMatchesRebuild) {
    std::mt19937_64 rng(2024);
    Schema s = graph_schema();
    struct Params {
        int k, r, d;
        Const consts;
    };
    for (Params p : {Params{1, 1, 3, 25}, Params{2, 0, 3, 25}, Params{2, 1, 2, 20}, Params{3, 0, 2, 12},
                     Params{3, 1, 2, 9}}) {
        for (int round = 0; round < 3; ++round) {
            Indexed x(s, p.d, p.k, p.r);
            for (int step = 0; step < 120; ++step) {
                UpdateCmd c = random_update(x.db, rng, p.consts);
                x.apply(c);
                if (step % 10 == 9) {
                    ASSERT_EQ(x.index.snapshot(), oracle::naive_index(x.db, p.k, p.r))
                        << "k=" << p.k << " r=" << p.r << " step " << step;
                }
                ASSERT_LE(static_cast<double>(x.index.max_conflict_degree()), x.index.degree_bound());
            }
        }
    }
}

TEST(SphereIndex, BatchSizeIndependentOfDatabase) {
    Schema s = graph_schema();
    std::vector<std::size_t> maxima;
    for (Const n : {100u, 1000u, 10000u}) {
        Indexed x(s, 2, 2, 1);
        for (Const i = 1; i < n; ++i) x.apply(ins("E", {i, i + 1}));
        std::size_t worst = 0;
        for (Const i = n / 2; i < n / 2 + 20; ++i) {
            x.apply(del("E", {i, i + 1}));
            worst = std::max(worst, x.last.touched);
            x.apply(ins("E", {i, i + 1}));
            worst = std::max(worst, x.last.touched);
        }
        maxima.push_back(worst);
    }
    EXPECT_EQ(maxima[0], maxima[1]);
    EXPECT_EQ(maxima[1], maxima[2]);
}
