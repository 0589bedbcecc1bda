#include "dyndb/sphere_index.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "dyndb/opcount.hpp"

namespace dyndb {

namespace {
const std::vector<Vid> kNoVids;
}

SphereIndex::SphereIndex(int k, int r, int d)
    : k_(k), r_(r), d_(d), rprime_(r + (k - 1) * (2 * r + 1)), realized_(static_cast<std::size_t>(k) + 1) {
    if (k < 1 || k > 8) throw std::invalid_argument("index arity must be in [1, 8]");
    if (r < 0) throw std::invalid_argument("negative radius");
}

std::optional<TypeId> SphereIndex::lookup_gamma(const Tuple& b) const {
    ops::tick();
    auto it = vid_of_.find(b);
    if (it == vid_of_.end()) return std::nullopt;
    return ids_[it->second];
}

Vid SphereIndex::vertex_of(const Tuple& b) const {
    auto it = vid_of_.find(b);
    return it == vid_of_.end() ? kVoid : it->second;
}

const std::vector<Vid>& SphereIndex::extent(TypeId id) const {
    auto it = extents_.find(id);
    return it == extents_.end() ? kNoVids : it->second;
}

std::size_t SphereIndex::max_conflict_degree() const {
    std::size_t m = 0;
    for (const auto& [_, v] : vid_of_) m = std::max(m, adj_[v].size());
    return m;
}

double SphereIndex::degree_bound() const {
    return std::pow(static_cast<double>(d_), 2.0 * k_ * k_ * (2 * r_ + 1));
}

Vid SphereIndex::alloc(const Tuple& t) {
    Vid v;
    if (!free_.empty()) {
        v = free_.back();
        free_.pop_back();
        tuples_[v] = t;
    } else {
        v = static_cast<Vid>(tuples_.size());
        if (v == kVoid) throw std::length_error("vertex ids exhausted");
        tuples_.push_back(t);
        ids_.push_back(kNoType);
        adj_.emplace_back();
        ext_pos_.push_back(0);
    }
    vid_of_[t] = v;
    for (Const a : t) by_elem_[a].insert(v);
    return v;
}

void SphereIndex::extent_add(TypeId id, Vid v) {
    auto& ext = extents_[id];
    ext_pos_[v] = static_cast<std::uint32_t>(ext.size());
    ext.push_back(v);
    ids_[v] = id;
}

void SphereIndex::extent_remove(TypeId id, Vid v) {
    auto& ext = extents_[id];
    std::uint32_t p = ext_pos_[v];
    Vid last = ext.back();
    ext[p] = last;
    ext_pos_[last] = p;
    ext.pop_back();
    ids_[v] = kNoType;
}

const std::unordered_set<Const>& SphereIndex::near(const Database& db, Const a) {
    auto it = near_cache_.find(a);
    if (it != near_cache_.end()) return it->second;
    auto b = ball(db, Tuple{a}, 2 * r_ + 1);
    ops::tick(b.size());
    return near_cache_.emplace(a, std::unordered_set<Const>(b.begin(), b.end())).first->second;
}

DeltaBatch SphereIndex::apply(const Database& db, const UpdateCmd& cmd) {
    near_cache_.clear();
    DeltaBatch batch;
    Tuple consts = cmd.args;
    std::sort(consts.begin(), consts.end());
    consts.erase(std::unique(consts.begin(), consts.end()), consts.end());

    auto B = ball(db, consts, r_);
    auto U = ball(db, consts, rprime_);
    ops::tick(B.size() + U.size());
    std::unordered_set<Const> inB(B.begin(), B.end());

    // candidates: indexed tuples touching B, plus tuples over U touching B
    std::set<Tuple> cand;
    for (Const a : B) {
        auto it = by_elem_.find(a);
        if (it == by_elem_.end()) continue;
        for (Vid v : it->second) cand.insert(tuples_[v]);
    }
    std::vector<Const> Uadom;
    for (Const a : U) {
        if (db.in_adom(a)) Uadom.push_back(a);
    }
    Tuple cur;
    auto gen = [&](auto&& self, int len, bool touched) -> void {
        if (static_cast<int>(cur.size()) == len) {
            if (touched) cand.insert(cur);
            return;
        }
        for (Const a : Uadom) {
            ops::tick();
            cur.push_back(a);
            self(self, len, touched || inB.count(a) != 0);
            cur.pop_back();
        }
    };
    for (int len = 1; len <= k_; ++len) gen(gen, len, false);
    batch.touched = cand.size();

    auto connected = [&](const Tuple& t) {
        std::vector<int> uf(t.size());
        std::iota(uf.begin(), uf.end(), 0);
        std::function<int(int)> find = [&](int x) { return uf[static_cast<std::size_t>(x)] == x ? x : uf[static_cast<std::size_t>(x)] = find(uf[static_cast<std::size_t>(x)]); };
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto& n = near(db, t[i]);
            for (std::size_t j = i + 1; j < t.size(); ++j) {
                if (n.count(t[j])) uf[static_cast<std::size_t>(find(static_cast<int>(i)))] = find(static_cast<int>(j));
            }
        }
        for (std::size_t i = 1; i < t.size(); ++i) {
            if (find(static_cast<int>(i)) != find(0)) return false;
        }
        return true;
    };

    struct Change {
        Vid v;
        TypeId old_id;
        TypeId new_id;
    };
    std::vector<Change> changes;
    std::vector<Vid> affected;  // in Gamma after the update
    std::vector<std::pair<Vid, TypeId>> removed;
    for (const auto& t : cand) {
        Vid v = vertex_of(t);
        TypeId old_id = v == kVoid ? kNoType : ids_[v];
        TypeId new_id = kNoType;
        bool in_adom = std::all_of(t.begin(), t.end(), [&](Const a) { return db.in_adom(a); });
        if (in_adom && connected(t)) new_id = canonicalize(type_of(db, t, r_));
        if (old_id == kNoType && new_id == kNoType) continue;
        if (new_id == kNoType) {
            removed.emplace_back(v, old_id);
            continue;
        }
        if (v == kVoid) v = alloc(t);
        if (seen_ids_.insert(new_id).second) {
            realized_[t.size()].push_back(new_id);
            batch.new_ids.push_back(new_id);
        }
        changes.push_back({v, old_id, new_id});
        affected.push_back(v);
    }

    auto push_edge = [&](IndexEvent::Kind kind, Vid a, Vid b, TypeId ia, TypeId ib) {
        batch.events.push_back({kind, a, b, ia, ib});
    };

    // edge deletions: all edges of removed tuples, stale edges of affected ones
    std::set<std::pair<Vid, Vid>> deleted;
    auto del_edge = [&](Vid a, Vid b) {
        auto key = std::minmax(a, b);
        if (!deleted.insert(key).second) return;
        push_edge(IndexEvent::Kind::EdgeDelete, key.first, key.second, ids_[key.first], ids_[key.second]);
    };
    for (auto [v, _] : removed) {
        for (Vid w : adj_[v]) del_edge(v, w);
    }

    // new neighbourhoods computed after removing dead tuples from the element index
    for (auto [v, _] : removed) {
        for (Const a : tuples_[v]) {
            auto it = by_elem_.find(a);
            if (it == by_elem_.end()) continue;  // repeated constant
            it->second.erase(v);
            if (it->second.empty()) by_elem_.erase(it);
        }
    }
    std::unordered_set<Vid> dead;
    for (auto [v, _] : removed) dead.insert(v);
    std::vector<std::unordered_set<Vid>> fresh(affected.size());
    for (std::size_t q = 0; q < affected.size(); ++q) {
        Vid v = affected[q];
        for (Const a : tuples_[v]) {
            for (Const x : near(db, a)) {
                auto it = by_elem_.find(x);
                if (it == by_elem_.end()) continue;
                for (Vid w : it->second) {
                    ops::tick();
                    fresh[q].insert(w);
                }
            }
        }
        for (Vid w : adj_[v]) {
            if (!dead.count(w) && !fresh[q].count(w)) del_edge(v, w);
        }
    }

    for (auto [v, old_id] : removed) batch.events.push_back({IndexEvent::Kind::ColourDelete, v, kVoid, old_id, kNoType});
    for (const auto& ch : changes) {
        if (ch.old_id != kNoType && ch.old_id != ch.new_id) {
            batch.events.push_back({IndexEvent::Kind::ColourDelete, ch.v, kVoid, ch.old_id, kNoType});
        }
    }
    for (const auto& ch : changes) {
        if (ch.old_id != ch.new_id) batch.events.push_back({IndexEvent::Kind::ColourInsert, ch.v, kVoid, ch.new_id, kNoType});
    }

    // apply: edge removals, extents, then new edges
    for (auto [a, b] : deleted) {
        adj_[a].erase(b);
        adj_[b].erase(a);
    }
    for (auto [v, old_id] : removed) {
        extent_remove(old_id, v);
        vid_of_.erase(tuples_[v]);
    }
    for (const auto& ch : changes) {
        if (ch.old_id == ch.new_id) continue;
        if (ch.old_id != kNoType) extent_remove(ch.old_id, ch.v);
        extent_add(ch.new_id, ch.v);
    }
    std::set<std::pair<Vid, Vid>> inserted;
    for (std::size_t q = 0; q < affected.size(); ++q) {
        Vid v = affected[q];
        for (Vid w : fresh[q]) {
            if (adj_[v].count(w)) continue;
            auto key = std::minmax(v, w);
            if (!inserted.insert(key).second) continue;
            adj_[v].insert(w);
            adj_[w].insert(v);
        }
    }
    for (auto [a, b] : inserted) push_edge(IndexEvent::Kind::EdgeInsert, a, b, ids_[a], ids_[b]);

    double bound = degree_bound();
    for (Vid v : affected) {
        if (static_cast<double>(adj_[v].size()) > bound) throw std::logic_error("conflict degree exceeds its bound");
    }
    for (auto [v, _] : removed) {
        tuples_[v].clear();
        free_.push_back(v);
    }
    return batch;
}

IndexSnapshot SphereIndex::snapshot() const {
    IndexSnapshot s;
    for (const auto& [t, v] : vid_of_) {
        s.gamma.emplace(t, ids_[v]);
        for (Vid w : adj_[v]) s.edges.emplace(t, tuples_[w]);
    }
    return s;
}

}  // namespace dyndb
