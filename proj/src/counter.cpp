#include "dyndb/counter.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "dyndb/opcount.hpp"

namespace dyndb {

std::string to_string(Count v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
    std::string s;
    while (u > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

int PatternCounter::upair(int a, int b) const {
    if (a > b) std::swap(a, b);
    // index of {a,b} among pairs a<b in lexicographic order
    return a * c_ - a * (a + 1) / 2 + (b - a - 1);
}

PatternCounter::PatternCounter(ColoredGraph& g) : g_(g), c_(g.colours()) {
    if (c_ > kMaxColours) throw std::invalid_argument("counter supports at most 5 colours");
    if (g.vertex_count() != 0) throw std::logic_error("counter must start from an empty graph");
    for (int j = 0; j < c_; ++j) {
        for (int j2 = 0; j2 < c_; ++j2) {
            if (j != j2) pairs_.emplace_back(j, j2);
        }
    }
    std::size_t p = pairs_.size();
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> index;
    comps_.assign(std::size_t{1} << p, {});
    for (std::uint64_t K = 1; K < (std::uint64_t{1} << p); ++K) {
        std::vector<int> uf(static_cast<std::size_t>(c_));
        std::iota(uf.begin(), uf.end(), 0);
        auto find = [&](int x) {
            while (uf[static_cast<std::size_t>(x)] != x) x = uf[static_cast<std::size_t>(x)] = uf[static_cast<std::size_t>(uf[static_cast<std::size_t>(x)])];
            return x;
        };
        std::uint32_t emask = 0;
        for (std::size_t q = 0; q < p; ++q) {
            if (!(K >> q & 1u)) continue;
            auto [a, b] = pairs_[q];
            emask |= 1u << upair(a, b);
            uf[static_cast<std::size_t>(find(a))] = find(b);
        }
        std::map<int, std::uint32_t> groups;
        for (int j = 0; j < c_; ++j) groups[find(j)] |= 1u << j;
        for (const auto& [_, vm] : groups) {
            std::uint32_t em = 0;
            for (int a = 0; a < c_; ++a) {
                for (int b = a + 1; b < c_; ++b) {
                    if ((vm >> a & 1u) && (vm >> b & 1u) && (emask >> upair(a, b) & 1u)) em |= 1u << upair(a, b);
                }
            }
            auto key = std::make_pair(vm, em);
            auto it = index.find(key);
            if (it == index.end()) {
                Pattern pat;
                pat.vmask = vm;
                pat.emask = em;
                int anchor = __builtin_ctz(vm);
                pat.order.push_back(anchor);
                pat.parent.push_back(-1);
                std::uint32_t seen = 1u << anchor;
                for (std::size_t h = 0; h < pat.order.size(); ++h) {
                    int x = pat.order[h];
                    for (int y = 0; y < c_; ++y) {
                        if ((seen >> y & 1u) || !(vm >> y & 1u) || x == y) continue;
                        if (!(em >> upair(x, y) & 1u)) continue;
                        seen |= 1u << y;
                        pat.order.push_back(y);
                        pat.parent.push_back(static_cast<int>(h));
                    }
                }
                pat.checks.resize(pat.order.size());
                for (std::size_t t = 1; t < pat.order.size(); ++t) {
                    for (std::size_t s = 0; s < t; ++s) {
                        if (static_cast<int>(s) == pat.parent[t]) continue;
                        if (em >> upair(pat.order[t], pat.order[s]) & 1u) pat.checks[t].push_back(static_cast<int>(s));
                    }
                }
                it = index.emplace(key, static_cast<int>(patterns_.size())).first;
                patterns_.push_back(std::move(pat));
            }
            comps_[K].push_back(it->second);
        }
    }
    phi_.assign(std::size_t{1} << p, 0);
    g.attach(this);
}

Count PatternCounter::phi(std::uint64_t K) const {
    if (K == 0 || K >= phi_.size()) throw std::out_of_range("pair set");
    return phi_[K];
}

std::int64_t PatternCounter::count_at(const Pattern& p, Vid v) const {
    if (!g_.in_colour(v, p.order[0])) return 0;
    std::size_t len = p.order.size();
    if (len == 1) return 1;
    std::vector<Vid> assign(len, kVoid);
    assign[0] = v;
    std::int64_t total = 0;
    auto rec = [&](auto&& self, std::size_t t) -> void {
        if (t == len) {
            ++total;
            return;
        }
        int colour = p.order[t];
        for (Vid x : g_.neighbors(assign[static_cast<std::size_t>(p.parent[t])])) {
            ops::tick();
            if (!g_.in_colour(x, colour)) continue;
            bool ok = true;
            for (int s : p.checks[t]) {
                if (!g_.adjacent(assign[static_cast<std::size_t>(s)], x)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            assign[t] = x;
            self(self, t + 1);
        }
    };
    rec(rec, 1);
    return total;
}

std::vector<Vid> PatternCounter::region_of(const GraphOp& op) const {
    std::vector<Vid> frontier{op.u};
    if (op.kind == GraphOp::Kind::AddEdge || op.kind == GraphOp::Kind::RemoveEdge) frontier.push_back(op.v);
    std::unordered_set<Vid> seen(frontier.begin(), frontier.end());
    std::vector<Vid> out(seen.begin(), seen.end());
    for (int depth = 0; depth < c_; ++depth) {
        std::vector<Vid> next;
        for (Vid x : frontier) {
            for (Vid y : g_.neighbors(x)) {
                ops::tick();
                if (seen.insert(y).second) {
                    next.push_back(y);
                    out.push_back(y);
                }
            }
        }
        frontier = std::move(next);
    }
    return out;
}

void PatternCounter::before(const ColoredGraph&, const GraphOp& op) {
    pending_.clear();
    if (op.kind == GraphOp::Kind::RemoveEdge || op.kind == GraphOp::Kind::RemoveColour) pending_ = region_of(op);
}

void PatternCounter::after(const ColoredGraph&, const GraphOp& op) {
    if (op.kind == GraphOp::Kind::AddEdge || op.kind == GraphOp::Kind::AddColour) pending_ = region_of(op);
    bool colour_op = op.kind == GraphOp::Kind::AddColour || op.kind == GraphOp::Kind::RemoveColour;
    refresh(pending_, colour_op ? op.colour : -1);
    pending_.clear();
}

void PatternCounter::refresh(const std::vector<Vid>& region, int colour) {
    for (auto& p : patterns_) {
        if (p.order.size() == 1) {
            p.m = static_cast<Count>(g_.colour_size(p.order[0]));
            continue;
        }
        // edge patterns only see colour ops on their own colours
        if (colour >= 0 && !(p.vmask >> colour & 1u)) continue;
        for (Vid v : region) {
            std::int64_t now = count_at(p, v);
            auto it = p.cnt.find(v);
            std::int64_t old = it == p.cnt.end() ? 0 : it->second;
            if (now == old) continue;
            p.m += now - old;
            if (now == 0) {
                p.cnt.erase(it);
            } else {
                p.cnt[v] = now;
            }
        }
    }
    n1_ = 1;
    for (int j = 0; j < c_; ++j) n1_ *= static_cast<Count>(g_.colour_size(j));
    n2_ = 0;
    for (std::size_t K = 1; K < phi_.size(); ++K) {
        Count prod = 1;
        for (int pi : comps_[K]) {
            prod *= patterns_[static_cast<std::size_t>(pi)].m;
            if (prod == 0) break;
        }
        phi_[K] = prod;
        if (__builtin_popcountll(K) % 2 == 1) {
            n2_ += prod;
        } else {
            n2_ -= prod;
        }
    }
}

Count count_phiK_bruteforce(const ColoredGraph& g, std::uint64_t K, const std::vector<std::pair<int, int>>& pairs,
                            std::uint64_t guard) {
    if (K == 0) throw std::invalid_argument("K must be nonempty");
    int c = g.colours();
    std::vector<std::vector<Vid>> members(static_cast<std::size_t>(c));
    for (Vid v : g.vertices()) {
        for (int j = 0; j < c; ++j) {
            if (g.in_colour(v, j)) members[static_cast<std::size_t>(j)].push_back(v);
        }
    }
    long double space = 1;
    for (const auto& m : members) space *= static_cast<long double>(m.size());
    if (space > static_cast<long double>(guard)) throw std::length_error("assignment space too large");
    std::vector<std::pair<int, int>> need;
    for (std::size_t q = 0; q < pairs.size(); ++q) {
        if (K >> q & 1u) need.push_back(pairs[q]);
    }
    std::vector<Vid> a(static_cast<std::size_t>(c));
    Count total = 0;
    auto rec = [&](auto&& self, int j) -> void {
        if (j == c) {
            for (auto [x, y] : need) {
                if (!g.adjacent(a[static_cast<std::size_t>(x)], a[static_cast<std::size_t>(y)])) return;
            }
            ++total;
            return;
        }
        for (Vid v : members[static_cast<std::size_t>(j)]) {
            a[static_cast<std::size_t>(j)] = v;
            self(self, j + 1);
        }
    };
    rec(rec, 0);
    return total;
}

}  // namespace dyndb
