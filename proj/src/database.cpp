#include "dyndb/database.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "dyndb/opcount.hpp"

namespace dyndb {

Schema::Schema(std::vector<Relation> rels) : relations(std::move(rels)) {
    for (std::size_t i = 0; i < relations.size(); ++i) {
        if (relations[i].arity < 1) throw SchemaError("relation " + relations[i].name + " has arity < 1");
        for (std::size_t j = 0; j < i; ++j) {
            if (relations[j].name == relations[i].name) throw SchemaError("duplicate relation " + relations[i].name);
        }
    }
}

int Schema::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < relations.size(); ++i) {
        if (relations[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

int Schema::total_arity() const {
    int s = 0;
    for (const auto& r : relations) s += r.arity;
    return s;
}

const char* to_string(UpdateOutcome o) {
    switch (o) {
        case UpdateOutcome::Applied: return "applied";
        case UpdateOutcome::RejectedDegree: return "rejected";
        case UpdateOutcome::NoChange: return "nochange";
    }
    return "?";
}

namespace {

const std::vector<std::pair<Const, int>> kNoNeighbors;
const std::vector<Database::Incidence> kNoIncidence;

std::vector<Const> distinct_of(const Tuple& t) {
    std::vector<Const> d(t.begin(), t.end());
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
}

}  // namespace

Database::Database(Schema schema, int degree_bound) : schema_(std::move(schema)), d_(degree_bound) {
    if (d_ < 2) throw SchemaError("degree bound must be >= 2");
    rel_.resize(schema_.size());
}

int Database::resolve(const UpdateCmd& cmd) const {
    int rel = schema_.index_of(cmd.relation);
    if (rel < 0) throw SchemaError("unknown relation " + cmd.relation);
    if (static_cast<int>(cmd.args.size()) != schema_.arity(rel)) {
        throw SchemaError("arity mismatch for " + cmd.relation + ": expected " + std::to_string(schema_.arity(rel)) +
                          ", got " + std::to_string(cmd.args.size()));
    }
    for (Const c : cmd.args) {
        if (c == 0) throw SchemaError("constants must be positive integers");
    }
    return rel;
}

bool Database::degree_ok(const Tuple& t) const {
    auto elems = distinct_of(t);
    for (Const u : elems) {
        std::size_t deg = degree(u);
        const auto& nb = neighbors(u);
        for (Const v : elems) {
            ops::tick();
            if (v == u) continue;
            bool present = std::any_of(nb.begin(), nb.end(), [v](const auto& p) { return p.first == v; });
            if (!present) ++deg;
        }
        if (deg > static_cast<std::size_t>(d_)) return false;
    }
    return true;
}

UpdateOutcome Database::probe(const UpdateCmd& cmd) const {
    int rel = resolve(cmd);
    bool present = contains(rel, cmd.args);
    if (cmd.kind == UpdateKind::Delete) return present ? UpdateOutcome::Applied : UpdateOutcome::NoChange;
    if (present) return UpdateOutcome::NoChange;
    return degree_ok(cmd.args) ? UpdateOutcome::Applied : UpdateOutcome::RejectedDegree;
}

UpdateOutcome Database::apply(const UpdateCmd& cmd) {
    UpdateOutcome out = probe(cmd);
    if (out != UpdateOutcome::Applied) return out;
    int rel = schema_.index_of(cmd.relation);
    const Tuple& t = cmd.args;
    auto elems = distinct_of(t);
    if (cmd.kind == UpdateKind::Insert) {
        rel_[static_cast<std::size_t>(rel)].insert(t);
        for (Const u : elems) {
            ElemInfo& info = elems_[u];
            info.inc.push_back({rel, t});
            for (Const v : elems) {
                ops::tick();
                if (v == u) continue;
                auto it = std::find_if(info.nbrs.begin(), info.nbrs.end(), [v](const auto& p) { return p.first == v; });
                if (it == info.nbrs.end()) {
                    info.nbrs.emplace_back(v, 1);
                } else {
                    ++it->second;
                }
            }
        }
    } else {
        rel_[static_cast<std::size_t>(rel)].erase(t);
        for (Const u : elems) {
            ElemInfo& info = elems_.at(u);
            auto ii = std::find_if(info.inc.begin(), info.inc.end(),
                                   [&](const Incidence& x) { return x.rel == rel && x.tuple == t; });
            info.inc.erase(ii);
            for (Const v : elems) {
                ops::tick();
                if (v == u) continue;
                auto it = std::find_if(info.nbrs.begin(), info.nbrs.end(), [v](const auto& p) { return p.first == v; });
                if (--it->second == 0) info.nbrs.erase(it);
            }
            if (info.inc.empty()) elems_.erase(u);
        }
    }
    return UpdateOutcome::Applied;
}

UpdateOutcome apply_update(Database& db, const UpdateCmd& cmd) { return db.apply(cmd); }

bool Database::contains(int rel, const Tuple& t) const {
    ops::tick();
    return rel_[static_cast<std::size_t>(rel)].count(t) != 0;
}

std::vector<Const> Database::adom() const {
    std::vector<Const> out;
    out.reserve(elems_.size());
    for (const auto& [c, _] : elems_) out.push_back(c);
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t Database::degree(Const a) const {
    auto it = elems_.find(a);
    return it == elems_.end() ? 0 : it->second.nbrs.size();
}

const std::vector<std::pair<Const, int>>& Database::neighbors(Const a) const {
    auto it = elems_.find(a);
    return it == elems_.end() ? kNoNeighbors : it->second.nbrs;
}

const std::vector<Database::Incidence>& Database::incident(Const a) const {
    auto it = elems_.find(a);
    return it == elems_.end() ? kNoIncidence : it->second.inc;
}

std::size_t Database::tuple_count() const {
    std::size_t n = 0;
    for (const auto& r : rel_) n += r.size();
    return n;
}

std::size_t Database::max_degree() const {
    std::size_t m = 0;
    for (const auto& [_, info] : elems_) m = std::max(m, info.nbrs.size());
    return m;
}

std::string Database::serialize() const {
    std::ostringstream os;
    os << "d=" << d_ << "\n";
    for (std::size_t r = 0; r < rel_.size(); ++r) {
        std::vector<Tuple> ts(rel_[r].begin(), rel_[r].end());
        std::sort(ts.begin(), ts.end());
        os << schema_.relations[r].name << ":";
        for (const auto& t : ts) {
            os << " (";
            for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
            os << ")";
        }
        os << "\n";
    }
    for (Const a : adom()) {
        const ElemInfo& info = elems_.at(a);
        auto nb = info.nbrs;
        std::sort(nb.begin(), nb.end());
        os << a << " ->";
        for (const auto& [v, c] : nb) os << " " << v << "x" << c;
        std::vector<std::pair<int, Tuple>> inc;
        for (const auto& x : info.inc) inc.emplace_back(x.rel, x.tuple);
        std::sort(inc.begin(), inc.end());
        os << " |";
        for (const auto& [r, t] : inc) {
            os << " " << r << "(";
            for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
            os << ")";
        }
        os << "\n";
    }
    return os.str();
}

bool Database::adjacency_consistent() const {
    std::map<std::pair<Const, Const>, int> expect;
    std::set<Const> dom;
    for (const auto& r : rel_) {
        for (const auto& t : r) {
            auto el = distinct_of(t);
            dom.insert(el.begin(), el.end());
            for (Const u : el) {
                for (Const v : el) {
                    if (u != v) ++expect[{u, v}];
                }
            }
        }
    }
    if (dom.size() != elems_.size()) return false;
    std::size_t seen = 0;
    for (const auto& [u, info] : elems_) {
        if (!dom.count(u)) return false;
        if (info.nbrs.size() > static_cast<std::size_t>(d_)) return false;
        for (const auto& [v, c] : info.nbrs) {
            auto it = expect.find({u, v});
            if (it == expect.end() || it->second != c) return false;
            ++seen;
        }
    }
    return seen == expect.size();
}

std::vector<Const> ball(const Database& db, const Tuple& centres, int r) {
    std::unordered_set<Const> seen;
    std::vector<Const> frontier;
    for (Const a : centres) {
        ops::tick();
        if (seen.insert(a).second) frontier.push_back(a);
    }
    std::vector<Const> out(frontier.begin(), frontier.end());
    for (int depth = 0; depth < r && !frontier.empty(); ++depth) {
        std::vector<Const> next;
        for (Const u : frontier) {
            for (const auto& [v, _] : db.neighbors(u)) {
                ops::tick();
                if (seen.insert(v).second) {
                    next.push_back(v);
                    out.push_back(v);
                }
            }
        }
        frontier = std::move(next);
    }
    double cap = static_cast<double>(centres.size()) *
                 std::pow(static_cast<double>(db.degree_bound()), r + 1);
    if (static_cast<double>(out.size()) > cap) throw std::logic_error("ball exceeds k*d^(r+1)");
    std::sort(out.begin(), out.end());
    return out;
}

NeighborhoodDb restrict_to(const Database& db, const std::vector<Const>& elems) {
    NeighborhoodDb nb;
    nb.elements = elems;
    nb.relations.resize(db.schema().size());
    for (Const e : elems) {
        for (const auto& inc : db.incident(e)) {
            ops::tick();
            if (inc.tuple[0] != e) continue;
            bool inside = std::all_of(inc.tuple.begin(), inc.tuple.end(),
                                      [&](Const c) { return std::binary_search(elems.begin(), elems.end(), c); });
            if (inside) nb.relations[static_cast<std::size_t>(inc.rel)].push_back(inc.tuple);
        }
    }
    for (auto& r : nb.relations) std::sort(r.begin(), r.end());
    return nb;
}

NeighborhoodDb induced_neighborhood(const Database& db, const Tuple& centres, int r) {
    return restrict_to(db, ball(db, centres, r));
}

bool dist_leq(const Database& db, Const a, Const b, int t) {
    if (a == b) return true;
    if (t <= 0) return false;
    std::unordered_set<Const> seen{a};
    std::vector<Const> frontier{a};
    for (int depth = 0; depth < t && !frontier.empty(); ++depth) {
        std::vector<Const> next;
        for (Const u : frontier) {
            for (const auto& [v, _] : db.neighbors(u)) {
                ops::tick();
                if (v == b) return true;
                if (seen.insert(v).second) next.push_back(v);
            }
        }
        frontier = std::move(next);
    }
    return false;
}

bool tuples_connected(const Database& db, const Tuple& centres, int r) {
    const std::size_t k = centres.size();
    if (k <= 1) return true;
    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            if (find(i) == find(j)) continue;
            if (dist_leq(db, centres[i], centres[j], 2 * r + 1)) parent[find(i)] = find(j);
        }
    }
    for (std::size_t i = 1; i < k; ++i) {
        if (find(i) != find(0)) return false;
    }
    return true;
}

LocalStructure to_local(const NeighborhoodDb& nb, const Tuple& centres, std::vector<int>& local_centres) {
    auto idx = [&](Const c) {
        auto it = std::lower_bound(nb.elements.begin(), nb.elements.end(), c);
        if (it == nb.elements.end() || *it != c) throw std::invalid_argument("constant outside the structure");
        return static_cast<int>(it - nb.elements.begin());
    };
    LocalStructure ls;
    ls.n = static_cast<int>(nb.elements.size());
    ls.rels.resize(nb.relations.size());
    for (std::size_t r = 0; r < nb.relations.size(); ++r) {
        for (const auto& t : nb.relations[r]) {
            std::vector<int> lt;
            lt.reserve(t.size());
            for (Const c : t) lt.push_back(idx(c));
            ls.rels[r].push_back(std::move(lt));
        }
    }
    local_centres.clear();
    for (Const c : centres) local_centres.push_back(idx(c));
    return ls;
}

namespace {

struct IsoSide {
    const LocalStructure* s;
    std::vector<std::vector<int>> adj;                            // Gaifman adjacency
    std::vector<std::vector<std::pair<int, int>>> inc;            // (rel, tuple idx)
    std::vector<std::vector<std::pair<int, int>>> profile;        // sorted (rel, pos)
    std::vector<std::set<std::vector<int>>> tuple_sets;

    explicit IsoSide(const LocalStructure& ls) : s(&ls) {
        adj.resize(static_cast<std::size_t>(ls.n));
        inc.resize(static_cast<std::size_t>(ls.n));
        profile.resize(static_cast<std::size_t>(ls.n));
        tuple_sets.resize(ls.rels.size());
        for (std::size_t r = 0; r < ls.rels.size(); ++r) {
            for (std::size_t ti = 0; ti < ls.rels[r].size(); ++ti) {
                const auto& t = ls.rels[r][ti];
                tuple_sets[r].insert(t);
                for (std::size_t p = 0; p < t.size(); ++p) {
                    auto e = static_cast<std::size_t>(t[p]);
                    profile[e].emplace_back(static_cast<int>(r), static_cast<int>(p));
                    if (inc[e].empty() || inc[e].back() != std::make_pair(static_cast<int>(r), static_cast<int>(ti))) {
                        inc[e].emplace_back(static_cast<int>(r), static_cast<int>(ti));
                    }
                    for (int o : t) {
                        if (o != t[p]) adj[e].push_back(o);
                    }
                }
            }
        }
        for (auto& a : adj) {
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
        }
        for (auto& p : profile) std::sort(p.begin(), p.end());
    }

    bool same_invariant(int x, const IsoSide& o, int y) const {
        return adj[static_cast<std::size_t>(x)].size() == o.adj[static_cast<std::size_t>(y)].size() &&
               profile[static_cast<std::size_t>(x)] == o.profile[static_cast<std::size_t>(y)];
    }
};

bool iso_search(const IsoSide& a, const IsoSide& b, const std::vector<int>& order, std::size_t pos,
                std::vector<int>& fwd, std::vector<int>& bwd) {
    if (pos == order.size()) return true;
    const int x = order[pos];
    if (fwd[static_cast<std::size_t>(x)] >= 0) return iso_search(a, b, order, pos + 1, fwd, bwd);
    for (int y = 0; y < b.s->n; ++y) {
        ops::tick();
        if (bwd[static_cast<std::size_t>(y)] >= 0 || !a.same_invariant(x, b, y)) continue;
        fwd[static_cast<std::size_t>(x)] = y;
        bwd[static_cast<std::size_t>(y)] = x;
        bool ok = true;
        for (const auto& [r, ti] : a.inc[static_cast<std::size_t>(x)]) {
            const auto& t = a.s->rels[static_cast<std::size_t>(r)][static_cast<std::size_t>(ti)];
            std::vector<int> img;
            img.reserve(t.size());
            for (int e : t) {
                int m = fwd[static_cast<std::size_t>(e)];
                if (m < 0) break;
                img.push_back(m);
            }
            if (img.size() == t.size() && !b.tuple_sets[static_cast<std::size_t>(r)].count(img)) {
                ok = false;
                break;
            }
        }
        if (ok && iso_search(a, b, order, pos + 1, fwd, bwd)) return true;
        fwd[static_cast<std::size_t>(x)] = -1;
        bwd[static_cast<std::size_t>(y)] = -1;
    }
    return false;
}

}  // namespace

bool isomorphic_local(const LocalStructure& la, const std::vector<int>& ca, const LocalStructure& lb,
                      const std::vector<int>& cb) {
    if (la.n != lb.n || ca.size() != cb.size() || la.rels.size() != lb.rels.size()) return false;
    for (std::size_t r = 0; r < la.rels.size(); ++r) {
        if (la.rels[r].size() != lb.rels[r].size()) return false;
    }
    IsoSide a(la), b(lb);
    for (std::size_t r = 0; r < la.rels.size(); ++r) {
        if (a.tuple_sets[r].size() != b.tuple_sets[r].size()) return false;
    }
    std::vector<int> fwd(static_cast<std::size_t>(la.n), -1), bwd(static_cast<std::size_t>(lb.n), -1);
    // Centres are fixed pointwise; the map must be consistent on repeats.
    for (std::size_t i = 0; i < ca.size(); ++i) {
        auto x = static_cast<std::size_t>(ca[i]);
        auto y = static_cast<std::size_t>(cb[i]);
        if (fwd[x] == -1 && bwd[y] == -1) {
            if (!a.same_invariant(ca[i], b, cb[i])) return false;
            fwd[x] = cb[i];
            bwd[y] = ca[i];
        } else if (fwd[x] != cb[i] || bwd[y] != ca[i]) {
            return false;
        }
    }
    for (std::size_t r = 0; r < la.rels.size(); ++r) {
        for (const auto& t : la.rels[r]) {
            bool all = std::all_of(t.begin(), t.end(), [&](int e) { return fwd[static_cast<std::size_t>(e)] >= 0; });
            if (!all) continue;
            std::vector<int> img;
            for (int e : t) img.push_back(fwd[static_cast<std::size_t>(e)]);
            if (!b.tuple_sets[r].count(img)) return false;
        }
    }
    // Assign remaining elements in BFS order from the centres.
    std::vector<int> order;
    std::vector<char> queued(static_cast<std::size_t>(la.n), 0);
    for (int c : ca) {
        if (!queued[static_cast<std::size_t>(c)]) {
            queued[static_cast<std::size_t>(c)] = 1;
            order.push_back(c);
        }
    }
    for (std::size_t h = 0; h < order.size() || static_cast<int>(order.size()) < la.n; ++h) {
        if (h == order.size()) {
            for (int e = 0; e < la.n; ++e) {
                if (!queued[static_cast<std::size_t>(e)]) {
                    queued[static_cast<std::size_t>(e)] = 1;
                    order.push_back(e);
                    break;
                }
            }
        }
        for (int v : a.adj[static_cast<std::size_t>(order[h])]) {
            if (!queued[static_cast<std::size_t>(v)]) {
                queued[static_cast<std::size_t>(v)] = 1;
                order.push_back(v);
            }
        }
    }
    return iso_search(a, b, order, 0, fwd, bwd);
}

bool isomorphic(const NeighborhoodDb& n1, const Tuple& c1, const NeighborhoodDb& n2, const Tuple& c2) {
    if (c1.size() != c2.size()) return false;
    std::vector<int> l1, l2;
    LocalStructure a = to_local(n1, c1, l1);
    LocalStructure b = to_local(n2, c2, l2);
    return isomorphic_local(a, l1, b, l2);
}

}  // namespace dyndb
