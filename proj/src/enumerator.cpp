#include "dyndb/enumerator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyndb/opcount.hpp"

namespace dyndb {

namespace {

template <class Adjacent, class Succ, class Read>
Vid walk(Vid z, const std::vector<Vid>& V, Adjacent&& adjacent, Succ&& succ, Read&& read) {
    while (z != kVoid) {
        read(z);
        bool hit = false;
        for (Vid v : V) {
            if (adjacent(v, z)) {
                hit = true;
                break;
            }
        }
        if (!hit) return z;
        z = succ(z);
    }
    return kVoid;
}

std::uint64_t pack(const std::vector<std::uint32_t>& positions) {
    std::uint64_t key = 0;
    for (std::size_t t = 0; t < positions.size(); ++t) key |= static_cast<std::uint64_t>(positions[t] + 1) << (16 * t);
    return key;
}

}  // namespace

SkipEnumerator::SkipEnumerator(ColoredGraph& g) : g_(g), c_(g.colours()), lists_(static_cast<std::size_t>(c_)) {
    if (c_ > 5) throw std::invalid_argument("enumerator supports at most 5 colours");
    if (g.vertex_count() != 0) throw std::logic_error("enumerator must start from an empty graph");
    small_mask_ = classify();
    recompute_small();
    g.attach(this);
}

Vid SkipEnumerator::succ(int i, Vid y) const {
    const auto& L = lists_[static_cast<std::size_t>(i)];
    ops::tick();
    auto it = L.nodes.find(y);
    if (it == L.nodes.end()) throw std::out_of_range("vertex not in colour list");
    return it->second.next;
}

std::vector<Vid> SkipEnumerator::list(int i) const {
    std::vector<Vid> out;
    for (Vid y = first(i); y != kVoid; y = succ(i, y)) out.push_back(y);
    return out;
}

Vid SkipEnumerator::scan_from(int i, Vid z, const std::vector<Vid>& V) const {
    return walk(
        z, V, [&](Vid a, Vid b) { return g_.adjacent(a, b); }, [&](Vid x) { return succ(i, x); },
        [](Vid) { ops::tick(); });
}

Vid SkipEnumerator::skip_scan(int i, Vid y, const std::vector<Vid>& V) const { return scan_from(i, y, V); }

Vid SkipEnumerator::skip(int i, Vid y, const std::vector<Vid>& V) const {
    if (y == kVoid) return kVoid;
    const auto& L = lists_[static_cast<std::size_t>(i)];
    auto it = L.ys.find(y);
    if (it == L.ys.end()) throw std::out_of_range("no skip state for vertex");
    const YState& st = it->second;
    ops::tick();
    std::vector<std::uint32_t> p;
    for (Vid v : V) {
        ops::tick();
        auto f = st.pos.find(v);
        if (f != st.pos.end()) p.push_back(f->second);
    }
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    auto t = st.table.find(pack(p));
    if (t == st.table.end()) throw std::logic_error("skip table entry missing");
    return t->second;
}

const std::vector<std::vector<Vid>>& SkipEnumerator::levels(int i, Vid y) const {
    const auto& L = lists_[static_cast<std::size_t>(i)];
    auto it = L.ys.find(y);
    if (it == L.ys.end()) throw std::out_of_range("no skip state for vertex");
    return it->second.E;
}

const std::vector<Vid>& SkipEnumerator::support(int i, Vid y) const { return levels(i, y).back(); }

std::size_t SkipEnumerator::table_size(int i, Vid y) const {
    const auto& L = lists_[static_cast<std::size_t>(i)];
    auto it = L.ys.find(y);
    if (it == L.ys.end()) throw std::out_of_range("no skip state for vertex");
    return it->second.table.size();
}

void SkipEnumerator::drop(int i, Vid y) {
    auto& L = lists_[static_cast<std::size_t>(i)];
    auto it = L.ys.find(y);
    if (it == L.ys.end()) return;
    for (Vid x : it->second.reads) {
        auto r = L.readers.find(x);
        if (r == L.readers.end()) continue;
        r->second.erase(y);
        if (r->second.empty()) L.readers.erase(r);
    }
    L.ys.erase(it);
}

void SkipEnumerator::compute(int i, Vid y) {
    drop(i, y);
    auto& L = lists_[static_cast<std::size_t>(i)];
    YState st;
    std::vector<Vid> reads{y};
    std::unordered_set<Vid> cur;
    std::vector<Vid> frontier;
    for (Vid u : g_.neighbors(y)) {
        ops::tick();
        cur.insert(u);
        frontier.push_back(u);
    }
    auto sorted = [](const std::unordered_set<Vid>& s) {
        std::vector<Vid> v(s.begin(), s.end());
        std::sort(v.begin(), v.end());
        return v;
    };
    st.E.push_back(sorted(cur));
    for (int j = 1; j < c_; ++j) {
        std::vector<Vid> next;
        for (Vid v : frontier) {
            reads.push_back(v);
            for (Vid z : g_.neighbors(v)) {
                ops::tick();
                reads.push_back(z);
                auto nz = L.nodes.find(z);
                if (nz == L.nodes.end()) continue;
                Vid s = nz->second.next;
                if (s == kVoid) continue;
                reads.push_back(s);
                for (Vid u : g_.neighbors(s)) {
                    ops::tick();
                    if (cur.insert(u).second) next.push_back(u);
                }
            }
        }
        frontier = std::move(next);
        st.E.push_back(sorted(cur));
    }
    const auto& S = st.E.back();
    double delta = static_cast<double>(g_.max_degree());
    double bound = delta * std::pow(1.0 + delta * delta, c_ - 1);
    if (static_cast<double>(S.size()) > bound) throw std::logic_error("support exceeds its degree bound");
    if (S.size() >= 0xffff) throw std::length_error("support too large for the skip table");
    for (std::uint32_t p = 0; p < S.size(); ++p) st.pos.emplace(S[p], p);

    std::vector<std::uint32_t> pick;
    std::vector<Vid> V;
    auto read = [&](Vid z) {
        ops::tick();
        reads.push_back(z);
    };
    auto adj = [&](Vid a, Vid b) { return g_.adjacent(a, b); };
    auto nxt = [&](Vid x) { return L.nodes.at(x).next; };
    auto rec = [&](auto&& self, std::uint32_t from) -> void {
        st.table.emplace(pack(pick), walk(y, V, adj, nxt, read));
        if (static_cast<int>(pick.size()) == c_ - 1) return;
        for (std::uint32_t p = from; p < S.size(); ++p) {
            pick.push_back(p);
            V.push_back(S[p]);
            self(self, p + 1);
            pick.pop_back();
            V.pop_back();
        }
    };
    rec(rec, 0);

    std::sort(reads.begin(), reads.end());
    reads.erase(std::unique(reads.begin(), reads.end()), reads.end());
    for (Vid x : reads) L.readers[x].insert(y);
    st.reads = std::move(reads);
    L.ys[y] = std::move(st);
}

std::uint32_t SkipEnumerator::classify() const {
    std::uint32_t mask = 0;
    std::size_t threshold = static_cast<std::size_t>(c_) * static_cast<std::size_t>(delta_);
    for (int i = 0; i < c_; ++i) {
        if (g_.colour_size(i) <= threshold) mask |= 1u << i;
    }
    return mask;
}

std::vector<int> SkipEnumerator::small_colours() const {
    return std::vector<int>(perm_.begin(), perm_.begin() + static_cast<std::ptrdiff_t>(small_len_));
}

bool SkipEnumerator::touches_small(const GraphOp& op, std::uint32_t mask) const {
    if (op.kind == GraphOp::Kind::AddColour || op.kind == GraphOp::Kind::RemoveColour) return mask >> op.colour & 1u;
    return ((g_.colour_mask(op.u) | g_.colour_mask(op.v)) & mask) != 0;
}

void SkipEnumerator::recompute_small() {
    perm_.clear();
    for (int i = 0; i < c_; ++i) {
        if (small_mask_ >> i & 1u) perm_.push_back(i);
    }
    small_len_ = perm_.size();
    for (int i = 0; i < c_; ++i) {
        if (!(small_mask_ >> i & 1u)) perm_.push_back(i);
    }
    small_tuples_.clear();
    std::vector<Vid> u;
    auto rec = [&](auto&& self, std::size_t t) -> void {
        if (t == small_len_) {
            small_tuples_.push_back(u);
            return;
        }
        int ci = perm_[t];
        for (Vid y = first(ci); y != kVoid; y = succ(ci, y)) {
            ops::tick();
            bool ok = true;
            for (Vid w : u) {
                if (g_.adjacent(w, y)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            u.push_back(y);
            self(self, t + 1);
            u.pop_back();
        }
    };
    rec(rec, 0);
    double bound = std::pow(static_cast<double>(c_) * delta_, static_cast<double>(small_len_));
    if (small_len_ > 0 && static_cast<double>(small_tuples_.size()) > bound) {
        throw std::logic_error("small-colour tuple set exceeds its bound");
    }
}

void SkipEnumerator::after(const ColoredGraph& g, const GraphOp& op) {
    delta_ = g.max_degree();
    std::uint32_t old_mask = small_mask_;
    switch (op.kind) {
        case GraphOp::Kind::AddEdge:
        case GraphOp::Kind::RemoveEdge:
            for (int i = 0; i < c_; ++i) {
                auto& L = lists_[static_cast<std::size_t>(i)];
                std::unordered_set<Vid> hit;
                for (Vid x : {op.u, op.v}) {
                    auto r = L.readers.find(x);
                    if (r != L.readers.end()) hit.insert(r->second.begin(), r->second.end());
                }
                std::vector<Vid> todo(hit.begin(), hit.end());
                for (Vid y : todo) compute(i, y);
            }
            break;
        case GraphOp::Kind::AddColour: {
            auto& L = lists_[static_cast<std::size_t>(op.colour)];
            Node n;
            n.next = L.first;
            if (L.first != kVoid) L.nodes[L.first].prev = op.u;
            L.nodes[op.u] = n;
            L.first = op.u;
            std::vector<Vid> todo;
            auto r = L.readers.find(op.u);
            if (r != L.readers.end()) todo.assign(r->second.begin(), r->second.end());
            compute(op.colour, op.u);
            for (Vid y : todo) {
                if (y != op.u) compute(op.colour, y);
            }
            break;
        }
        case GraphOp::Kind::RemoveColour: {
            auto& L = lists_[static_cast<std::size_t>(op.colour)];
            Node n = L.nodes.at(op.u);
            std::unordered_set<Vid> hit;
            for (Vid x : {op.u, n.prev}) {
                if (x == kVoid) continue;
                auto r = L.readers.find(x);
                if (r != L.readers.end()) hit.insert(r->second.begin(), r->second.end());
            }
            hit.erase(op.u);
            if (n.prev != kVoid) {
                L.nodes[n.prev].next = n.next;
            } else {
                L.first = n.next;
            }
            if (n.next != kVoid) L.nodes[n.next].prev = n.prev;
            L.nodes.erase(op.u);
            drop(op.colour, op.u);
            std::vector<Vid> todo(hit.begin(), hit.end());
            for (Vid y : todo) compute(op.colour, y);
            break;
        }
    }
    std::uint32_t new_mask = classify();
    if (new_mask != old_mask || touches_small(op, old_mask) || touches_small(op, new_mask)) {
        small_mask_ = new_mask;
        recompute_small();
    }
}

bool SkipEnumerator::enumerate_fast(const EmitFn& emit, const EndFn& end) const {
    std::vector<Vid> u(static_cast<std::size_t>(c_), kVoid);
    std::vector<Vid> out(static_cast<std::size_t>(c_), kVoid);
    std::vector<Vid> V;
    V.reserve(static_cast<std::size_t>(c_));
    auto rec = [&](auto&& self, std::size_t t) -> bool {
        if (t == static_cast<std::size_t>(c_)) {
            for (std::size_t j = 0; j < t; ++j) out[static_cast<std::size_t>(perm_[j])] = u[j];
            ops::tick(t);
            return emit(out);
        }
        int ci = perm_[t];
        V.assign(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(t));
        Vid y = skip(ci, first(ci), V);
        // large colour: more than c*delta members, so something survives
        if (y == kVoid) throw std::logic_error("dead end on a large colour");
        while (y != kVoid) {
            u[t] = y;
            if (!self(self, t + 1)) return false;
            V.assign(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(t));
            y = skip(ci, succ(ci, y), V);
        }
        return true;
    };
    for (const auto& s : small_tuples_) {
        std::copy(s.begin(), s.end(), u.begin());
        if (!rec(rec, small_len_)) return false;
    }
    if (end) end();
    return true;
}

bool SkipEnumerator::enumerate_naive(const EmitFn& emit, const EndFn& end) const {
    std::vector<Vid> u;
    auto rec = [&](auto&& self, int t) -> bool {
        if (t == c_) return emit(u);
        for (Vid y = first(t); y != kVoid; y = succ(t, y)) {
            ops::tick();
            bool ok = true;
            for (Vid w : u) {
                if (g_.adjacent(w, y)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            u.push_back(y);
            if (!self(self, t + 1)) return false;
            u.pop_back();
        }
        return true;
    };
    if (!rec(rec, 0)) return false;
    if (end) end();
    return true;
}

}  // namespace dyndb
