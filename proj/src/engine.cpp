#include "dyndb/engine.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "dyndb/opcount.hpp"

namespace dyndb {

namespace {

// Restricted growth strings: block b of position i is rgs[i]; blocks are
// numbered by their smallest position.
void set_partitions(int k, const std::function<void(const std::vector<std::uint64_t>&)>& fn) {
    std::vector<int> rgs(static_cast<std::size_t>(k), 0);
    auto rec = [&](auto&& self, int i, int blocks) -> void {
        if (i == k) {
            std::vector<std::uint64_t> masks(static_cast<std::size_t>(blocks), 0);
            for (int p = 0; p < k; ++p) masks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(p)])] |= 1ULL << p;
            fn(masks);
            return;
        }
        for (int b = 0; b <= blocks && b < k; ++b) {
            rgs[static_cast<std::size_t>(i)] = b;
            self(self, i + 1, std::max(blocks, b + 1));
        }
    };
    if (k > 0) rec(rec, 1, 1);
}

}  // namespace

Engine::Engine(const Schema& schema, int d, const HnfQuery& q) : db_(schema, d), q_(q), bool_(q) {
    if (q_.k() > PatternCounter::kMaxColours) throw std::invalid_argument("queries with more than 5 free variables are not supported");
    check_degree(q_, d);
    r_ = q_.radius();
    J_ = bool_.valuation();
    if (k() >= 1) {
        index_ = std::make_unique<SphereIndex>(k(), r_, d);
        recompute_accepted();
    }
}

bool Engine::answer() const {
    if (k() != 0) throw std::logic_error("answer is defined for sentences only");
    return bool_.answer();
}

void Engine::add_signature(const Signature& sig) {
    SigEntry e;
    e.sig = sig;
    NeighborhoodType tau = assemble(sig, r_);
    std::vector<bool> leaves = sphere_leaf_values(q_, tau);
    std::size_t nval = std::size_t{1} << q_.hanf.size();
    e.accept.assign(nval, false);
    bool any = false;
    for (std::size_t J = 0; J < nval; ++J) {
        bool v = q_.fold([&](int j) { return (J >> j & 1u) != 0; },
                         [&](int i) { return static_cast<bool>(leaves[static_cast<std::size_t>(i)]); });
        e.accept[J] = v;
        any = any || v;
    }
    std::string key = sig.key();
    if (any) {
        auto view = std::make_unique<SignatureView>();
        view->sig = sig;
        view->key = key;
        view->graph = std::make_unique<ColoredGraph>(static_cast<int>(sig.comps.size()));
        view->counter = std::make_unique<PatternCounter>(*view->graph);
        view->enumerator = std::make_unique<SkipEnumerator>(*view->graph);
        populate(*view);
        view->accepted = e.accept[J_];
        refresh(*view);
        e.view = view.get();
        std::vector<TypeId> ids;
        for (const auto& c : sig.comps) ids.push_back(c.id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        for (TypeId id : ids) views_by_id_[id].push_back(view.get());
        views_.push_back(std::move(view));
    }
    if (e.accept[J_]) accepted_.insert(key);
    catalog_.emplace(std::move(key), std::move(e));
}

void Engine::populate(SignatureView& v) {
    ColoredGraph& g = *v.graph;
    for (std::size_t j = 0; j < v.sig.comps.size(); ++j) {
        for (Vid u : index_->extent(v.sig.comps[j].id)) g.add_to_colour(u, static_cast<int>(j));
    }
    for (Vid u : g.vertices()) {
        std::vector<Vid> nb(index_->conflicts(u).begin(), index_->conflicts(u).end());
        std::sort(nb.begin(), nb.end());
        for (Vid w : nb) {
            if (w >= u && g.has_vertex(w)) g.add_edge(u, w);
        }
    }
}

// Adds every signature that uses at least one of the new ids: the first
// block holding a new id splits the product into disjoint parts.
void Engine::extend_catalog(const std::vector<TypeId>& new_ids) {
    std::unordered_set<TypeId> fresh(new_ids.begin(), new_ids.end());
    set_partitions(k(), [&](const std::vector<std::uint64_t>& blocks) {
        const std::size_t nb = blocks.size();
        std::vector<std::vector<TypeId>> olds(nb), news(nb);
        std::vector<const std::vector<TypeId>*> alls(nb);
        for (std::size_t j = 0; j < nb; ++j) {
            alls[j] = &index_->realized(__builtin_popcountll(blocks[j]));
            if (alls[j]->empty()) return;
            for (TypeId id : *alls[j]) (fresh.count(id) ? news[j] : olds[j]).push_back(id);
        }
        Signature sig;
        sig.k = k();
        sig.comps.resize(nb);
        for (std::size_t first = 0; first < nb; ++first) {
            auto rec = [&](auto&& self, std::size_t j) -> void {
                if (j == nb) {
                    if (!catalog_.count(sig.key())) add_signature(sig);
                    return;
                }
                const std::vector<TypeId>& pool = j < first ? olds[j] : j == first ? news[j] : *alls[j];
                for (TypeId id : pool) {
                    sig.comps[j] = SigComponent{__builtin_popcountll(blocks[j]), id, blocks[j]};
                    self(self, j + 1);
                }
            };
            rec(rec, 0);
        }
    });
}

void Engine::dispatch(const DeltaBatch& batch) {
    static const std::vector<SignatureView*> none;
    std::vector<SignatureView*> touched;
    auto views_of = [&](TypeId id) -> const std::vector<SignatureView*>& {
        auto it = views_by_id_.find(id);
        return it == views_by_id_.end() ? none : it->second;
    };
    auto has_id = [](const SignatureView* v, TypeId id) {
        return std::any_of(v->sig.comps.begin(), v->sig.comps.end(), [&](const SigComponent& c) { return c.id == id; });
    };
    for (const auto& ev : batch.events) {
        for (SignatureView* v : views_of(ev.u_id)) touched.push_back(v);
        switch (ev.kind) {
            case IndexEvent::Kind::EdgeDelete:
                for (SignatureView* v : views_of(ev.u_id)) {
                    if (!has_id(v, ev.v_id)) continue;
                    v->graph->remove_edge(ev.u, ev.v);
                }
                break;
            case IndexEvent::Kind::ColourDelete:
                for (SignatureView* v : views_of(ev.u_id)) {
                    ColoredGraph& g = *v->graph;
                    if (!g.has_vertex(ev.u)) continue;
                    std::vector<Vid> nb(g.neighbors(ev.u).begin(), g.neighbors(ev.u).end());
                    std::sort(nb.begin(), nb.end());
                    for (Vid w : nb) g.remove_edge(ev.u, w);
                    for (std::size_t j = 0; j < v->sig.comps.size(); ++j) {
                        if (v->sig.comps[j].id == ev.u_id) g.remove_from_colour(ev.u, static_cast<int>(j));
                    }
                }
                break;
            case IndexEvent::Kind::ColourInsert:
                for (SignatureView* v : views_of(ev.u_id)) {
                    ColoredGraph& g = *v->graph;
                    for (std::size_t j = 0; j < v->sig.comps.size(); ++j) {
                        if (v->sig.comps[j].id == ev.u_id) g.add_to_colour(ev.u, static_cast<int>(j));
                    }
                    std::vector<Vid> nb(index_->conflicts(ev.u).begin(), index_->conflicts(ev.u).end());
                    std::sort(nb.begin(), nb.end());
                    for (Vid w : nb) {
                        if (g.has_vertex(w)) g.add_edge(ev.u, w);
                    }
                }
                break;
            case IndexEvent::Kind::EdgeInsert:
                for (SignatureView* v : views_of(ev.u_id)) {
                    if (!has_id(v, ev.v_id)) continue;
                    ColoredGraph& g = *v->graph;
                    if (g.has_vertex(ev.u) && g.has_vertex(ev.v)) g.add_edge(ev.u, ev.v);
                }
                break;
        }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (SignatureView* v : touched) refresh(*v);
}

void Engine::recompute_accepted() {
    accepted_.clear();
    for (const auto& [key, e] : catalog_) {
        if (e.accept[J_]) accepted_.insert(key);
        if (e.view) {
            e.view->accepted = e.accept[J_];
            refresh(*e.view);
        }
    }
}

void Engine::refresh(SignatureView& v) {
    Count want = v.accepted ? v.counter->n3() : 0;
    total_ += want - v.counted;
    v.counted = want;
    if (want > 0) {
        live_.emplace(v.key, &v);
    } else {
        live_.erase(v.key);
    }
}

UpdateOutcome Engine::update(const UpdateCmd& cmd) {
    if (enumerating_) throw ActiveEnumeration();
    UpdateOutcome out = db_.probe(cmd);
    if (out != UpdateOutcome::Applied) return out;
    bool_.prepare(db_, cmd);
    db_.apply(cmd);
    bool_.commit(db_);
    ++version_;
    if (k() == 0) return out;
    DeltaBatch batch = index_->apply(db_, cmd);
    dispatch(batch);
    bool jchg = bool_.valuation() != J_;
    J_ = bool_.valuation();
    if (!batch.new_ids.empty()) extend_catalog(batch.new_ids);
    if (jchg) recompute_accepted();
    return out;
}

bool Engine::test(const Tuple& a) const {
    if (static_cast<int>(a.size()) != k()) throw std::invalid_argument("test tuple has the wrong arity");
    if (k() == 0) return bool_.answer();
    for (Const x : a) {
        ops::tick();
        if (!db_.in_adom(x)) return false;
    }
    const std::size_t n = a.size();
    std::vector<int> uf(n);
    std::iota(uf.begin(), uf.end(), 0);
    auto find = [&](int x) {
        while (uf[static_cast<std::size_t>(x)] != x) x = uf[static_cast<std::size_t>(x)];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (index_->lookup_gamma(Tuple{a[i], a[j]})) {
                int ri = find(static_cast<int>(i));
                int rj = find(static_cast<int>(j));
                if (ri != rj) uf[static_cast<std::size_t>(std::max(ri, rj))] = std::min(ri, rj);
            }
        }
    }
    // roots are smallest positions, so root order is component order
    Signature sig;
    sig.k = k();
    std::vector<int> comp_of(n, -1);
    for (std::size_t p = 0; p < n; ++p) {
        int root = find(static_cast<int>(p));
        if (comp_of[static_cast<std::size_t>(root)] < 0) {
            comp_of[static_cast<std::size_t>(root)] = static_cast<int>(sig.comps.size());
            sig.comps.emplace_back();
        }
        sig.comps[static_cast<std::size_t>(comp_of[static_cast<std::size_t>(root)])].positions |= 1ULL << p;
    }
    for (auto& c : sig.comps) {
        Tuple t;
        for (std::size_t p = 0; p < n; ++p) {
            if (c.positions >> p & 1u) t.push_back(a[p]);
        }
        auto id = index_->lookup_gamma(t);
        if (!id) return false;
        c.id = *id;
        c.arity = static_cast<int>(t.size());
    }
    ops::tick();
    return accepted_.count(sig.key()) != 0;
}

Count Engine::count() const {
    if (k() == 0) return bool_.answer() ? 1 : 0;
    return total_;
}

Tuple Engine::to_tuple(const SignatureView& v, const std::vector<Vid>& u) const {
    Tuple t(static_cast<std::size_t>(k()));
    ops::tick(t.size());
    for (std::size_t j = 0; j < v.sig.comps.size(); ++j) {
        const Tuple& part = index_->tuple_of(u[j]);
        std::size_t q = 0;
        for (int p : v.sig.positions_of(j)) t[static_cast<std::size_t>(p)] = part[q++];
    }
    return t;
}

bool Engine::enumerate(const EmitFn& emit, const EndFn& end) {
    if (enumerating_) throw ActiveEnumeration();
    struct Guard {
        bool& flag;
        explicit Guard(bool& f) : flag(f) { flag = true; }
        ~Guard() { flag = false; }
    } guard(enumerating_);
    if (k() == 0) {
        if (bool_.answer() && !emit(Tuple{})) return false;
        if (end) end();
        return true;
    }
    for (const auto& [key, vp] : live_) {
        const SignatureView& v = *vp;
        bool done = v.enumerator->enumerate_fast([&](const std::vector<Vid>& u) { return emit(to_tuple(v, u)); });
        if (!done) return false;
    }
    if (end) end();
    return true;
}

std::vector<const SignatureView*> Engine::views() const {
    std::vector<const SignatureView*> out;
    for (const auto& v : views_) out.push_back(v.get());
    return out;
}

std::string Engine::fingerprint() const {
    std::ostringstream os;
    os << db_.serialize() << "\nversion " << version_ << "\nJ " << J_ << "\nA";
    for (std::size_t j = 0; j < bool_.sentences(); ++j) os << ' ' << bool_.count(j);
    os << "\nans " << bool_.answer() << '\n';
    if (!index_) return os.str();
    IndexSnapshot snap = index_->snapshot();
    for (const auto& [t, id] : snap.gamma) {
        os << "g";
        for (Const c : t) os << ' ' << c;
        os << " : " << id << " v" << index_->vertex_of(t) << '\n';
    }
    os << "edges " << snap.edges.size() << '\n';
    for (const auto& [a, b] : snap.edges) {
        os << 'e';
        for (Const c : a) os << ' ' << c;
        os << " /";
        for (Const c : b) os << ' ' << c;
        os << '\n';
    }
    os << "catalog " << catalog_.size() << " accepted " << accepted_.size() << " total " << to_string(total_) << '\n';
    for (const auto& v : views_) {
        os << "view";
        for (const auto& c : v->sig.comps) os << " (" << c.id << ' ' << c.positions << ')';
        const ColoredGraph& g = *v->graph;
        os << " n3 " << to_string(v->counter->n3()) << " edges " << g.edge_count() << '\n';
        for (Vid u : g.vertices()) {
            std::vector<Vid> nb(g.neighbors(u).begin(), g.neighbors(u).end());
            std::sort(nb.begin(), nb.end());
            os << "  " << u << " m" << g.colour_mask(u) << " :";
            for (Vid w : nb) os << ' ' << w;
            os << '\n';
        }
        for (int j = 0; j < g.colours(); ++j) {
            os << "  list " << j << ':';
            for (Vid u : v->enumerator->list(j)) os << ' ' << u;
            os << '\n';
        }
    }
    return os.str();
}

}  // namespace dyndb
