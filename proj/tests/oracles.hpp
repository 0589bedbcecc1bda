#pragma once

// Reference implementations used by the tests. Everything here is written
// from the definitions, avoiding the maintained indexes it checks.

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dyndb/colored_graph.hpp"
#include "dyndb/counter.hpp"
#include "dyndb/database.hpp"
#include "dyndb/enumerator.hpp"
#include "dyndb/sphere_index.hpp"
#include "dyndb/types.hpp"

namespace oracle {

using namespace dyndb;

// Gaifman graph rebuilt by scanning every stored tuple.
inline std::map<Const, std::set<Const>> gaifman(const Database& db) {
    std::map<Const, std::set<Const>> g;
    for (std::size_t r = 0; r < db.schema().size(); ++r) {
        for (const auto& t : db.relation(static_cast<int>(r))) {
            for (Const a : t) {
                g[a];
                for (Const b : t) {
                    if (a != b) g[a].insert(b);
                }
            }
        }
    }
    return g;
}

// Distances from a source; absent keys are unreachable.
inline std::map<Const, int> bfs(const std::map<Const, std::set<Const>>& g, Const s) {
    std::map<Const, int> dist{{s, 0}};
    std::queue<Const> q;
    q.push(s);
    while (!q.empty()) {
        Const u = q.front();
        q.pop();
        auto it = g.find(u);
        if (it == g.end()) continue;
        for (Const v : it->second) {
            if (!dist.count(v)) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
        }
    }
    return dist;
}

inline std::vector<Const> naive_ball(const Database& db, const Tuple& centres, int r) {
    auto g = gaifman(db);
    std::set<Const> out;
    for (Const c : centres) {
        for (auto [v, d] : bfs(g, c)) {
            if (d <= r) out.insert(v);
        }
    }
    return {out.begin(), out.end()};
}

struct Distances {
    std::map<Const, std::map<Const, int>> d;
    explicit Distances(const Database& db) {
        auto g = gaifman(db);
        for (const auto& [a, _] : g) d[a] = bfs(g, a);
    }
    bool leq(Const a, Const b, int t) const {
        if (a == b) return true;
        auto it = d.find(a);
        if (it == d.end()) return false;
        auto j = it->second.find(b);
        return j != it->second.end() && j->second <= t;
    }
};

inline bool naive_connected(const Distances& D, const Tuple& t, int r) {
    std::vector<bool> seen(t.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (!seen[j] && D.leq(t[i], t[j], 2 * r + 1)) {
                seen[j] = true;
                stack.push_back(j);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

// Gamma and conflict edges from scratch.
inline IndexSnapshot naive_index(const Database& db, int k, int r) {
    Distances D(db);
    std::vector<Const> dom = db.adom();
    IndexSnapshot s;
    std::vector<Tuple> gamma;
    Tuple cur;
    auto rec = [&](auto&& self, int len) -> void {
        if (static_cast<int>(cur.size()) == len) {
            if (naive_connected(D, cur, r)) {
                s.gamma.emplace(cur, canonicalize(type_of(db, cur, r)));
                gamma.push_back(cur);
            }
            return;
        }
        for (Const a : dom) {
            cur.push_back(a);
            self(self, len);
            cur.pop_back();
        }
    };
    for (int len = 1; len <= k; ++len) rec(rec, len);
    for (const auto& a : gamma) {
        for (const auto& b : gamma) {
            bool near = false;
            for (Const x : a) {
                for (Const y : b) near = near || D.leq(x, y, 2 * r + 1);
            }
            if (near) s.edges.emplace(a, b);
        }
    }
    return s;
}

// All assignments of a coloured graph, bucketed by which ordered pairs are
// edges; phi_K is then a superset sum.
struct PhiCensus {
    std::vector<Count> phiK;             // indexed by pair mask
    std::set<std::vector<Vid>> result;   // phi_c itself
    Count phi_c = 0;
};

inline PhiCensus census(const ColoredGraph& g, const std::vector<std::pair<int, int>>& pairs) {
    int c = g.colours();
    std::vector<std::vector<Vid>> members(static_cast<std::size_t>(c));
    for (Vid v : g.vertices()) {
        for (int j = 0; j < c; ++j) {
            if (g.in_colour(v, j)) members[static_cast<std::size_t>(j)].push_back(v);
        }
    }
    std::size_t P = pairs.size();
    std::vector<Count> hist(std::size_t{1} << P, 0);
    std::vector<Vid> a(static_cast<std::size_t>(c));
    PhiCensus out;
    auto rec = [&](auto&& self, int j) -> void {
        if (j == c) {
            std::size_t m = 0;
            for (std::size_t q = 0; q < P; ++q) {
                if (g.adjacent(a[static_cast<std::size_t>(pairs[q].first)], a[static_cast<std::size_t>(pairs[q].second)])) {
                    m |= std::size_t{1} << q;
                }
            }
            ++hist[m];
            if (m == 0) out.result.insert(a);
            return;
        }
        for (Vid v : members[static_cast<std::size_t>(j)]) {
            a[static_cast<std::size_t>(j)] = v;
            self(self, j + 1);
        }
    };
    rec(rec, 0);
    out.phi_c = hist[0];
    // superset sums
    for (std::size_t q = 0; q < P; ++q) {
        for (std::size_t m = 0; m < hist.size(); ++m) {
            if (!(m >> q & 1u)) hist[m] += hist[m | (std::size_t{1} << q)];
        }
    }
    out.phiK = std::move(hist);
    return out;
}

// skip_i(y, V) by walking the given list order.
inline Vid scan_skip(const ColoredGraph& g, const std::vector<Vid>& list, Vid y, const std::vector<Vid>& V) {
    if (y == kVoid) return kVoid;
    auto it = std::find(list.begin(), list.end(), y);
    for (; it != list.end(); ++it) {
        bool hit = false;
        for (Vid v : V) hit = hit || g.adjacent(v, *it);
        if (!hit) return *it;
    }
    return kVoid;
}

// E^1..E^c for y in colour list, from the inductive definition.
inline std::vector<std::vector<Vid>> naive_levels(const ColoredGraph& g, const std::vector<Vid>& list, Vid y, int c) {
    std::map<Vid, Vid> succ;
    for (std::size_t p = 0; p < list.size(); ++p) succ[list[p]] = p + 1 < list.size() ? list[p + 1] : kVoid;
    std::set<Vid> E(g.neighbors(y).begin(), g.neighbors(y).end());
    std::vector<std::vector<Vid>> out{{E.begin(), E.end()}};
    for (int j = 1; j < c; ++j) {
        std::set<Vid> next = E;
        for (Vid v : E) {
            for (Vid z : g.neighbors(v)) {
                auto s = succ.find(z);
                if (s == succ.end() || s->second == kVoid) continue;
                for (Vid u : g.neighbors(s->second)) next.insert(u);
            }
        }
        E = std::move(next);
        out.emplace_back(E.begin(), E.end());
    }
    return out;
}

// Random atomic operation on a coloured graph over vertex ids [0, nv).
inline void random_graph_op(ColoredGraph& g, std::mt19937_64& rng, Vid nv, double loop_prob = 0.2) {
    std::uniform_int_distribution<Vid> pv(0, nv - 1);
    std::uniform_int_distribution<int> pc(0, g.colours() - 1);
    std::uniform_int_distribution<int> kind(0, 9);
    std::uniform_real_distribution<double> coin(0, 1);
    for (int attempt = 0; attempt < 20; ++attempt) {
        int k = kind(rng);
        Vid u = pv(rng);
        if (k < 4) {
            if (g.add_to_colour(u, pc(rng))) return;
        } else if (k < 5) {
            int i = pc(rng);
            if (!g.in_colour(u, i)) continue;
            if (g.colour_mask(u) == (1u << i)) {
                std::vector<Vid> nb(g.neighbors(u).begin(), g.neighbors(u).end());
                std::sort(nb.begin(), nb.end());
                for (Vid w : nb) g.remove_edge(u, w);
            }
            g.remove_from_colour(u, i);
            return;
        } else if (k < 8) {
            Vid v = coin(rng) < loop_prob ? u : pv(rng);
            if (g.has_vertex(u) && g.has_vertex(v) && g.add_edge(u, v)) return;
        } else {
            if (!g.has_vertex(u) || g.neighbors(u).empty()) continue;
            std::vector<Vid> nb(g.neighbors(u).begin(), g.neighbors(u).end());
            std::sort(nb.begin(), nb.end());
            g.remove_edge(u, nb[std::uniform_int_distribution<std::size_t>(0, nb.size() - 1)(rng)]);
            return;
        }
    }
}

// Type literal text in the query grammar.
inline std::string type_literal(const std::string& name, const NeighborhoodType& t, const Schema& schema) {
    std::ostringstream os;
    os << "(type " << name << " (elems";
    for (int e = 0; e < t.structure.n; ++e) os << " e" << e;
    os << ") (centres";
    for (int c : t.centres) os << " e" << c;
    os << ") (tuples";
    for (std::size_t r = 0; r < t.structure.rels.size(); ++r) {
        for (const auto& tup : t.structure.rels[r]) {
            os << " (" << schema.relations[r].name;
            for (int e : tup) os << " e" << e;
            os << ')';
        }
    }
    os << ") (radius " << t.radius << "))";
    return os.str();
}

// A random database with the given number of random updates.
inline Database random_db(const Schema& schema, int d, Const consts, int steps, std::mt19937_64& rng) {
    Database db(schema, d);
    std::uniform_int_distribution<Const> pc(1, consts);
    std::uniform_int_distribution<std::size_t> pr(0, schema.size() - 1);
    for (int s = 0; s < steps; ++s) {
        auto r = pr(rng);
        UpdateCmd c{UpdateKind::Insert, schema.relations[r].name, {}};
        for (int a = 0; a < schema.relations[r].arity; ++a) c.args.push_back(pc(rng));
        db.apply(c);
    }
    return db;
}

}  // namespace oracle
