#include "dyndb/types.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

#include "dyndb/opcount.hpp"

namespace dyndb {

std::vector<std::vector<int>> gaifman_adjacency(const LocalStructure& s) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(s.n));
    for (const auto& rel : s.rels) {
        for (const auto& t : rel) {
            for (int a : t) {
                for (int b : t) {
                    if (a != b) adj[static_cast<std::size_t>(a)].push_back(b);
                }
            }
        }
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

int max_degree(const LocalStructure& s) {
    int m = 0;
    for (const auto& a : gaifman_adjacency(s)) m = std::max(m, static_cast<int>(a.size()));
    return m;
}

namespace {

std::vector<int> bfs_within(const std::vector<std::vector<int>>& adj, const std::vector<int>& from, int r) {
    std::vector<int> dist(adj.size(), -1);
    std::vector<int> q;
    for (int c : from) {
        if (dist[static_cast<std::size_t>(c)] < 0) {
            dist[static_cast<std::size_t>(c)] = 0;
            q.push_back(c);
        }
    }
    for (std::size_t h = 0; h < q.size(); ++h) {
        int u = q[h];
        if (dist[static_cast<std::size_t>(u)] == r) continue;
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (dist[static_cast<std::size_t>(v)] < 0) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                q.push_back(v);
            }
        }
    }
    std::sort(q.begin(), q.end());
    return q;
}

// Induced substructure on a sorted element subset, re-indexed.
LocalStructure induce(const LocalStructure& s, const std::vector<int>& keep, std::vector<int>& remap) {
    remap.assign(static_cast<std::size_t>(s.n), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) remap[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);
    LocalStructure out;
    out.n = static_cast<int>(keep.size());
    out.rels.resize(s.rels.size());
    for (std::size_t r = 0; r < s.rels.size(); ++r) {
        for (const auto& t : s.rels[r]) {
            std::vector<int> lt;
            for (int e : t) {
                int m = remap[static_cast<std::size_t>(e)];
                if (m < 0) break;
                lt.push_back(m);
            }
            if (lt.size() == t.size()) out.rels[r].push_back(std::move(lt));
        }
    }
    return out;
}

void put_int(std::string& out, int v) {
    auto u = static_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

// Individualisation-refinement search for the minimal serialisation.
class Canonizer {
  public:
    explicit Canonizer(const NeighborhoodType& t) : t_(t), n_(t.structure.n) {
        inc_.resize(static_cast<std::size_t>(n_));
        for (std::size_t r = 0; r < t.structure.rels.size(); ++r) {
            for (std::size_t ti = 0; ti < t.structure.rels[r].size(); ++ti) {
                const auto& tup = t.structure.rels[r][ti];
                for (std::size_t p = 0; p < tup.size(); ++p) {
                    inc_[static_cast<std::size_t>(tup[p])].push_back({static_cast<int>(r), static_cast<int>(ti), static_cast<int>(p)});
                }
            }
        }
    }

    std::vector<int> run() {
        std::vector<int> col(static_cast<std::size_t>(n_), -1);
        int next = 0;
        for (int c : t_.centres) {
            if (col[static_cast<std::size_t>(c)] < 0) col[static_cast<std::size_t>(c)] = next++;
        }
        for (auto& x : col) {
            if (x < 0) x = next;
        }
        search(col);
        return best_;
    }

  private:
    struct Inc {
        int rel, ti, pos;
    };

    int refine(std::vector<int>& col) const {
        int cells = 1 + (n_ ? *std::max_element(col.begin(), col.end()) : -1);
        while (true) {
            std::vector<std::vector<int>> sig(static_cast<std::size_t>(n_));
            for (int e = 0; e < n_; ++e) {
                std::vector<std::vector<int>> ds;
                for (const auto& in : inc_[static_cast<std::size_t>(e)]) {
                    ops::tick();
                    std::vector<int> d{in.rel, in.pos};
                    for (int x : t_.structure.rels[static_cast<std::size_t>(in.rel)][static_cast<std::size_t>(in.ti)]) {
                        d.push_back(col[static_cast<std::size_t>(x)]);
                    }
                    ds.push_back(std::move(d));
                }
                std::sort(ds.begin(), ds.end());
                auto& s = sig[static_cast<std::size_t>(e)];
                s.push_back(col[static_cast<std::size_t>(e)]);
                for (const auto& d : ds) {
                    s.push_back(-1);
                    s.insert(s.end(), d.begin(), d.end());
                }
            }
            std::vector<std::vector<int>> distinct(sig);
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            for (int e = 0; e < n_; ++e) {
                col[static_cast<std::size_t>(e)] = static_cast<int>(
                    std::lower_bound(distinct.begin(), distinct.end(), sig[static_cast<std::size_t>(e)]) - distinct.begin());
            }
            int now = static_cast<int>(distinct.size());
            if (now == cells) return now;
            cells = now;
        }
    }

    std::vector<int> serialize(const std::vector<int>& label) const {
        std::vector<int> out{t_.radius, n_, static_cast<int>(t_.centres.size())};
        for (int c : t_.centres) out.push_back(label[static_cast<std::size_t>(c)]);
        for (const auto& rel : t_.structure.rels) {
            std::vector<std::vector<int>> ts;
            ts.reserve(rel.size());
            for (const auto& t : rel) {
                std::vector<int> lt;
                for (int e : t) lt.push_back(label[static_cast<std::size_t>(e)]);
                ts.push_back(std::move(lt));
            }
            std::sort(ts.begin(), ts.end());
            out.push_back(static_cast<int>(ts.size()));
            for (const auto& t : ts) out.insert(out.end(), t.begin(), t.end());
        }
        return out;
    }

    void search(std::vector<int> col) {
        int cells = refine(col);
        if (cells == n_) {
            auto s = serialize(col);
            if (!have_ || s < best_) {
                best_ = std::move(s);
                have_ = true;
            }
            return;
        }
        // First non-singleton cell in colour order.
        std::vector<int> size(static_cast<std::size_t>(cells), 0);
        for (int c : col) ++size[static_cast<std::size_t>(c)];
        int target = 0;
        while (size[static_cast<std::size_t>(target)] < 2) ++target;
        for (int x = 0; x < n_; ++x) {
            if (col[static_cast<std::size_t>(x)] != target) continue;
            std::vector<int> c2(col);
            for (int e = 0; e < n_; ++e) {
                int& v = c2[static_cast<std::size_t>(e)];
                if (v > target || (v == target && e != x)) ++v;
            }
            search(std::move(c2));
        }
    }

    const NeighborhoodType& t_;
    int n_;
    std::vector<std::vector<Inc>> inc_;
    std::vector<int> best_;
    bool have_ = false;
};

}  // namespace

bool is_valid_type(const NeighborhoodType& t) {
    if (t.centres.empty()) return false;
    for (int c : t.centres) {
        if (c < 0 || c >= t.structure.n) return false;
    }
    auto adj = gaifman_adjacency(t.structure);
    return static_cast<int>(bfs_within(adj, t.centres, t.radius).size()) == t.structure.n;
}

std::string canonical_encoding(const NeighborhoodType& t) {
    std::vector<int> seq = Canonizer(t).run();
    std::string out;
    out.reserve(seq.size() * 4);
    for (int v : seq) put_int(out, v);
    return out;
}

TypeTable& TypeTable::global() {
    static TypeTable table;
    return table;
}

TypeId TypeTable::intern(const std::string& encoding, const NeighborhoodType& representative) {
    {
        std::shared_lock lock(mu_);
        auto it = ids_.find(encoding);
        if (it != ids_.end()) return it->second;
    }
    std::unique_lock lock(mu_);
    auto it = ids_.find(encoding);
    if (it != ids_.end()) return it->second;
    auto id = static_cast<TypeId>(encodings_.size());
    ids_.emplace(encoding, id);
    encodings_.push_back(encoding);
    reps_.push_back(representative);
    return id;
}

std::optional<TypeId> TypeTable::find(const std::string& encoding) const {
    std::shared_lock lock(mu_);
    auto it = ids_.find(encoding);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

NeighborhoodType TypeTable::representative(TypeId id) const {
    std::shared_lock lock(mu_);
    return reps_.at(id);
}

std::string TypeTable::encoding(TypeId id) const {
    std::shared_lock lock(mu_);
    return encodings_.at(id);
}

int TypeTable::arity(TypeId id) const {
    std::shared_lock lock(mu_);
    return static_cast<int>(reps_.at(id).centres.size());
}

std::size_t TypeTable::size() const {
    std::shared_lock lock(mu_);
    return encodings_.size();
}

TypeId canonicalize(const NeighborhoodType& t, int degree_bound) {
    if (degree_bound > 0 && max_degree(t.structure) > degree_bound) {
        throw TypeError("type exceeds degree bound " + std::to_string(degree_bound));
    }
    return TypeTable::global().intern(canonical_encoding(t), t);
}

NeighborhoodType type_of(const Database& db, const Tuple& centres, int r) {
    NeighborhoodType t;
    t.structure = to_local(induced_neighborhood(db, centres, r), centres, t.centres);
    t.radius = r;
    return t;
}

NeighborhoodType restrict_type(const NeighborhoodType& t, const std::vector<int>& positions, int r2) {
    std::vector<int> sub;
    for (int p : positions) sub.push_back(t.centres.at(static_cast<std::size_t>(p)));
    auto keep = bfs_within(gaifman_adjacency(t.structure), sub, r2);
    std::vector<int> remap;
    NeighborhoodType out;
    out.structure = induce(t.structure, keep, remap);
    for (int c : sub) out.centres.push_back(remap[static_cast<std::size_t>(c)]);
    out.radius = r2;
    return out;
}

std::string Signature::key() const {
    std::string out;
    put_int(out, k);
    put_int(out, static_cast<int>(comps.size()));
    for (const auto& c : comps) {
        put_int(out, c.arity);
        put_int(out, static_cast<int>(c.id));
        put_int(out, static_cast<int>(c.positions & 0xffffffffULL));
        put_int(out, static_cast<int>(c.positions >> 32));
    }
    return out;
}

std::vector<int> Signature::positions_of(std::size_t comp) const {
    std::vector<int> out;
    for (int i = 0; i < k; ++i) {
        if (comps[comp].positions >> i & 1ULL) out.push_back(i);
    }
    return out;
}

Decomposition decompose(const NeighborhoodType& t) {
    const int k = static_cast<int>(t.centres.size());
    if (k > 63) throw TypeError("too many centres");
    auto adj = gaifman_adjacency(t.structure);
    std::vector<int> comp(static_cast<std::size_t>(t.structure.n), -1);
    int ncomp = 0;
    for (int s = 0; s < t.structure.n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        std::vector<int> q{s};
        comp[static_cast<std::size_t>(s)] = ncomp;
        for (std::size_t h = 0; h < q.size(); ++h) {
            for (int v : adj[static_cast<std::size_t>(q[h])]) {
                if (comp[static_cast<std::size_t>(v)] < 0) {
                    comp[static_cast<std::size_t>(v)] = ncomp;
                    q.push_back(v);
                }
            }
        }
        ++ncomp;
    }
    // Order components by smallest centre position.
    std::vector<int> order(static_cast<std::size_t>(ncomp), -1);
    int c = 0;
    for (int pos = 0; pos < k; ++pos) {
        int g = comp[static_cast<std::size_t>(t.centres[static_cast<std::size_t>(pos)])];
        if (order[static_cast<std::size_t>(g)] < 0) order[static_cast<std::size_t>(g)] = c++;
    }
    if (c != ncomp) throw TypeError("component without a centre");
    Decomposition out;
    out.sig.k = k;
    out.sig.comps.resize(static_cast<std::size_t>(c));
    out.components.resize(static_cast<std::size_t>(c));
    for (int pos = 0; pos < k; ++pos) {
        int j = order[static_cast<std::size_t>(comp[static_cast<std::size_t>(t.centres[static_cast<std::size_t>(pos)])])];
        out.sig.comps[static_cast<std::size_t>(j)].positions |= 1ULL << pos;
    }
    for (int g = 0; g < ncomp; ++g) {
        auto j = static_cast<std::size_t>(order[static_cast<std::size_t>(g)]);
        std::vector<int> keep;
        for (int e = 0; e < t.structure.n; ++e) {
            if (comp[static_cast<std::size_t>(e)] == g) keep.push_back(e);
        }
        std::vector<int> remap;
        NeighborhoodType part;
        part.structure = induce(t.structure, keep, remap);
        part.radius = t.radius;
        for (int p : out.sig.positions_of(j)) {
            part.centres.push_back(remap[static_cast<std::size_t>(t.centres[static_cast<std::size_t>(p)])]);
        }
        out.sig.comps[j].arity = static_cast<int>(part.centres.size());
        out.sig.comps[j].id = canonicalize(part);
        out.components[j] = std::move(part);
    }
    return out;
}

Signature signature_of_tuple(const Database& db, const Tuple& centres, int r) {
    return decompose(type_of(db, centres, r)).sig;
}

NeighborhoodType assemble(const Signature& sig, int radius) {
    NeighborhoodType out;
    out.radius = radius;
    out.centres.assign(static_cast<std::size_t>(sig.k), -1);
    for (std::size_t j = 0; j < sig.comps.size(); ++j) {
        NeighborhoodType rep = TypeTable::global().representative(sig.comps[j].id);
        const int off = out.structure.n;
        out.structure.n += rep.structure.n;
        if (out.structure.rels.size() < rep.structure.rels.size()) out.structure.rels.resize(rep.structure.rels.size());
        for (std::size_t r = 0; r < rep.structure.rels.size(); ++r) {
            for (auto t : rep.structure.rels[r]) {
                for (int& e : t) e += off;
                out.structure.rels[r].push_back(std::move(t));
            }
        }
        auto pos = sig.positions_of(j);
        if (pos.size() != rep.centres.size()) throw TypeError("signature arity does not match component type");
        for (std::size_t q = 0; q < pos.size(); ++q) {
            out.centres[static_cast<std::size_t>(pos[q])] = rep.centres[q] + off;
        }
    }
    return out;
}

std::vector<NeighborhoodType> enumerate_types(const Schema& schema, int d, int r, int k, std::size_t cap) {
    // |N_r(t)| <= k * (1 + d + ... + d^r)
    long long bound = 0, pw = 1;
    for (int i = 0; i <= r; ++i) {
        bound += pw;
        pw *= d;
    }
    bound *= k;
    std::map<std::string, NeighborhoodType> found;
    std::size_t candidates = 0;
    for (int n = 1; n <= bound; ++n) {
        // All possible tuples over n elements.
        std::vector<std::pair<int, std::vector<int>>> all;
        for (std::size_t rel = 0; rel < schema.size(); ++rel) {
            const int ar = schema.arity(static_cast<int>(rel));
            std::vector<int> t(static_cast<std::size_t>(ar), 0);
            while (true) {
                all.emplace_back(static_cast<int>(rel), t);
                int p = ar - 1;
                while (p >= 0 && ++t[static_cast<std::size_t>(p)] == n) t[static_cast<std::size_t>(p--)] = 0;
                if (p < 0) break;
            }
        }
        if (all.size() >= 62) throw CapExceeded(found.size(), candidates);
        // Centre maps normalised so that new centre elements appear in order.
        std::vector<std::vector<int>> centre_maps;
        std::vector<int> cm;
        auto gen = [&](auto&& self, int next_fresh) -> void {
            if (static_cast<int>(cm.size()) == k) {
                centre_maps.push_back(cm);
                return;
            }
            for (int e = 0; e <= std::min(next_fresh, n - 1); ++e) {
                cm.push_back(e);
                self(self, std::max(next_fresh, e + 1));
                cm.pop_back();
            }
        };
        gen(gen, 0);
        for (const auto& centres : centre_maps) {
            const std::uint64_t subsets = 1ULL << all.size();
            for (std::uint64_t mask = 0; mask < subsets; ++mask) {
                if (++candidates > cap) throw CapExceeded(found.size(), candidates);
                NeighborhoodType t;
                t.radius = r;
                t.centres = centres;
                t.structure.n = n;
                t.structure.rels.resize(schema.size());
                for (std::size_t b = 0; b < all.size(); ++b) {
                    if (mask >> b & 1ULL) t.structure.rels[static_cast<std::size_t>(all[b].first)].push_back(all[b].second);
                }
                if (max_degree(t.structure) > d || !is_valid_type(t)) continue;
                std::string enc = canonical_encoding(t);
                if (!found.count(enc)) {
                    TypeTable::global().intern(enc, t);
                    found.emplace(enc, std::move(t));
                }
            }
        }
    }
    std::vector<NeighborhoodType> out;
    for (auto& [_, t] : found) out.push_back(std::move(t));
    return out;
}

}  // namespace dyndb
