#include "dyndb/logic.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace dyndb {

namespace {

using K = Formula::Kind;

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (f.kind) {
        case K::Eq:
        case K::Rel:
        case K::Sphere:
            for (const auto& v : f.vars) {
                if (!bound.count(v)) out.insert(v);
            }
            return;
        case K::Exists:
        case K::ExistsGeq:
        case K::ExistsMod: {
            bool fresh = bound.insert(f.vars[0]).second;
            collect_free(*f.kids[0], bound, out);
            if (fresh) bound.erase(f.vars[0]);
            return;
        }
        default:
            for (const auto& k : f.kids) collect_free(*k, bound, out);
    }
}

void first_occurrence(const Formula& f, std::set<std::string>& bound, std::vector<std::string>& out) {
    switch (f.kind) {
        case K::Eq:
        case K::Rel:
        case K::Sphere:
            for (const auto& v : f.vars) {
                if (!bound.count(v) && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
            }
            return;
        case K::Exists:
        case K::ExistsGeq:
        case K::ExistsMod: {
            bool fresh = bound.insert(f.vars[0]).second;
            first_occurrence(*f.kids[0], bound, out);
            if (fresh) bound.erase(f.vars[0]);
            return;
        }
        default:
            for (const auto& k : f.kids) first_occurrence(*k, bound, out);
    }
}

std::shared_ptr<Formula> node(K kind) {
    auto f = std::make_shared<Formula>();
    f->kind = kind;
    return f;
}

class QueryParser {
  public:
    QueryParser(const Schema& s, const std::vector<TypeLiteral>& types) : schema_(s), types_(types) {}

    FormulaPtr formula(const SExpr& e) {
        if (e.atom) {
            if (e.text == "true") return node(K::True);
            if (e.text == "false") return node(K::False);
            fail_at(e, "expected a formula, got '" + e.text + "'");
        }
        if (e.items.empty()) fail_at(e, "empty formula");
        const std::string& head = atom_text(e.items[0]);
        if (head == "and" || head == "or") {
            auto f = node(head == "and" ? K::And : K::Or);
            for (std::size_t i = 1; i < e.items.size(); ++i) f->kids.push_back(formula(e.items[i]));
            return f;
        }
        if (head == "not") {
            arity(e, 2);
            auto f = node(K::Not);
            f->kids.push_back(formula(e.items[1]));
            return f;
        }
        if (head == "=") {
            arity(e, 3);
            auto f = node(K::Eq);
            f->vars = {var(e.items[1]), var(e.items[2])};
            return f;
        }
        if (head == "exists" || head == "forall") {
            arity(e, 3);
            auto f = node(K::Exists);
            f->vars = {var(e.items[1])};
            if (head == "exists") {
                f->kids.push_back(formula(e.items[2]));
                return f;
            }
            auto inner = node(K::Not);
            inner->kids.push_back(formula(e.items[2]));
            f->kids.push_back(inner);
            auto outer = node(K::Not);
            outer->kids.push_back(f);
            return outer;
        }
        if (head == "exists>=") {
            arity(e, 4);
            auto f = node(K::ExistsGeq);
            f->m = atom_int(e.items[1]);
            if (f->m < 1) fail_at(e.items[1], "threshold must be >= 1");
            f->vars = {var(e.items[2])};
            f->kids.push_back(formula(e.items[3]));
            return f;
        }
        if (head == "existsmod") {
            arity(e, 5);
            auto f = node(K::ExistsMod);
            f->i = atom_int(e.items[1]);
            f->m = atom_int(e.items[2]);
            check_mod(e, f->i, f->m);
            f->vars = {var(e.items[3])};
            f->kids.push_back(formula(e.items[4]));
            return f;
        }
        if (head == "sphere") {
            arity(e, 3);
            auto f = node(K::Sphere);
            const TypeLiteral& t = type(e.items[1]);
            f->type = std::make_shared<NeighborhoodType>(t.type);
            f->type_name = t.name;
            if (e.items[2].atom) fail_at(e.items[2], "expected a variable list");
            for (const auto& v : e.items[2].items) f->vars.push_back(var(v));
            if (f->vars.size() != t.type.centres.size()) {
                fail_at(e, "type " + t.name + " has " + std::to_string(t.type.centres.size()) + " centres, got " +
                               std::to_string(f->vars.size()) + " variables");
            }
            return f;
        }
        if (head == "hanf") {
            if (e.items.size() < 2) fail_at(e, "malformed hanf sentence");
            const std::string& kind = atom_text(e.items[1]);
            std::shared_ptr<Formula> q;
            std::size_t tpos;
            if (kind == "atleast") {
                arity(e, 4);
                q = node(K::ExistsGeq);
                q->m = atom_int(e.items[2]);
                if (q->m < 1) fail_at(e.items[2], "threshold must be >= 1");
                tpos = 3;
            } else if (kind == "mod") {
                arity(e, 5);
                q = node(K::ExistsMod);
                q->i = atom_int(e.items[2]);
                q->m = atom_int(e.items[3]);
                check_mod(e, q->i, q->m);
                tpos = 4;
            } else {
                fail_at(e.items[1], "expected 'atleast' or 'mod'");
            }
            const TypeLiteral& t = type(e.items[tpos]);
            if (t.type.centres.size() != 1) fail_at(e.items[tpos], "hanf sentence needs a one-centre type");
            std::string v = "#h" + std::to_string(fresh_++);
            auto s = node(K::Sphere);
            s->type = std::make_shared<NeighborhoodType>(t.type);
            s->type_name = t.name;
            s->vars = {v};
            q->vars = {v};
            q->kids.push_back(s);
            return q;
        }
        int rel = schema_.index_of(head);
        if (rel < 0) fail_at(e.items[0], "unknown relation '" + head + "'");
        if (static_cast<int>(e.items.size()) - 1 != schema_.arity(rel)) {
            fail_at(e, "arity mismatch for " + head + ": expected " + std::to_string(schema_.arity(rel)));
        }
        auto f = node(K::Rel);
        f->rel = rel;
        for (std::size_t i = 1; i < e.items.size(); ++i) f->vars.push_back(var(e.items[i]));
        return f;
    }

  private:
    static void arity(const SExpr& e, std::size_t n) {
        if (e.items.size() != n) fail_at(e, "wrong number of arguments to " + e.items[0].text);
    }
    static void check_mod(const SExpr& e, long long i, long long m) {
        if (m < 2) fail_at(e, "modulus must be >= 2");
        if (i < 0 || i >= m) fail_at(e, "residue must satisfy 0 <= i < m");
    }
    static std::string var(const SExpr& e) {
        const std::string& v = atom_text(e);
        if (v.empty() || v[0] == '#') fail_at(e, "bad variable name");
        return v;
    }
    const TypeLiteral& type(const SExpr& e) {
        const std::string& n = atom_text(e);
        for (const auto& t : types_) {
            if (t.name == n) return t;
        }
        fail_at(e, "unknown type '" + n + "'");
    }

    const Schema& schema_;
    const std::vector<TypeLiteral>& types_;
    int fresh_ = 0;
};

}  // namespace

std::set<std::string> free_variables(const Formula& f) {
    std::set<std::string> bound, out;
    collect_free(f, bound, out);
    return out;
}

int quantifier_rank(const Formula& f) {
    int best = 0;
    for (const auto& k : f.kids) best = std::max(best, quantifier_rank(*k));
    if (f.kind == K::Exists || f.kind == K::ExistsGeq || f.kind == K::ExistsMod) ++best;
    return best;
}

int HnfQuery::radius() const {
    int r = 0;
    for (const auto& s : spheres) r = std::max(r, s.type.radius);
    return r;
}

Schema parse_schema(const std::string& text) {
    auto es = parse_sexprs(text);
    if (es.size() != 1 || !es[0].head_is("schema")) {
        if (es.empty()) throw ParseError("empty schema", 1, 1);
        fail_at(es[0], "expected (schema (R n) ...)");
    }
    std::vector<Schema::Relation> rels;
    for (std::size_t i = 1; i < es[0].items.size(); ++i) {
        const SExpr& r = es[0].items[i];
        if (r.atom || r.items.size() != 2) fail_at(r, "expected (name arity)");
        long long a = atom_int(r.items[1]);
        if (a < 1) fail_at(r.items[1], "arity must be >= 1");
        rels.push_back({atom_text(r.items[0]), static_cast<int>(a)});
    }
    try {
        return Schema(std::move(rels));
    } catch (const SchemaError& err) {
        fail_at(es[0], err.what());
    }
}

TypeLiteral parse_type_literal(const SExpr& e, const Schema& schema) {
    if (!e.head_is("type") || e.items.size() < 2) fail_at(e, "expected (type name ...)");
    TypeLiteral lit;
    lit.name = atom_text(e.items[1]);
    std::vector<std::string> elems;
    std::vector<std::string> centres;
    std::vector<const SExpr*> tuples;
    bool have_radius = false;
    for (std::size_t i = 2; i < e.items.size(); ++i) {
        const SExpr& c = e.items[i];
        if (c.atom || c.items.empty()) fail_at(c, "expected a type clause");
        const std::string& h = atom_text(c.items[0]);
        if (h == "elems") {
            for (std::size_t j = 1; j < c.items.size(); ++j) elems.push_back(atom_text(c.items[j]));
        } else if (h == "centres" || h == "centers") {
            for (std::size_t j = 1; j < c.items.size(); ++j) centres.push_back(atom_text(c.items[j]));
        } else if (h == "tuples") {
            for (std::size_t j = 1; j < c.items.size(); ++j) tuples.push_back(&c.items[j]);
        } else if (h == "radius") {
            if (c.items.size() != 2) fail_at(c, "expected (radius r)");
            long long r = atom_int(c.items[1]);
            if (r < 0) fail_at(c.items[1], "radius must be >= 0");
            lit.type.radius = static_cast<int>(r);
            have_radius = true;
        } else {
            fail_at(c, "unknown type clause '" + h + "'");
        }
    }
    if (!have_radius) fail_at(e, "type " + lit.name + " lacks a radius");
    if (centres.empty()) fail_at(e, "type " + lit.name + " has no centres");
    auto index = [&](const SExpr& where, const std::string& name) {
        auto it = std::find(elems.begin(), elems.end(), name);
        if (it == elems.end()) fail_at(where, "'" + name + "' is not an element of " + lit.name);
        return static_cast<int>(it - elems.begin());
    };
    for (std::size_t i = 0; i < elems.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (elems[i] == elems[j]) fail_at(e, "duplicate element '" + elems[i] + "'");
        }
    }
    lit.type.structure.n = static_cast<int>(elems.size());
    lit.type.structure.rels.resize(schema.size());
    for (const auto& c : centres) lit.type.centres.push_back(index(e, c));
    for (const SExpr* t : tuples) {
        if (t->atom || t->items.empty()) fail_at(*t, "expected (R a ...)");
        const std::string& rn = atom_text(t->items[0]);
        int rel = schema.index_of(rn);
        if (rel < 0) fail_at(*t, "unknown relation '" + rn + "'");
        if (static_cast<int>(t->items.size()) - 1 != schema.arity(rel)) fail_at(*t, "arity mismatch for " + rn);
        std::vector<int> lt;
        for (std::size_t j = 1; j < t->items.size(); ++j) lt.push_back(index(t->items[j], atom_text(t->items[j])));
        auto& dst = lit.type.structure.rels[static_cast<std::size_t>(rel)];
        if (std::find(dst.begin(), dst.end(), lt) == dst.end()) dst.push_back(lt);
    }
    if (!is_valid_type(lit.type)) fail_at(e, "type " + lit.name + ": some element is farther than the radius from every centre");
    return lit;
}

std::optional<HnfQuery> to_hnf(const Formula& f, const std::vector<std::string>& free) {
    HnfQuery q;
    q.free = free;
    bool ok = true;
    auto conv = [&](auto&& self, const Formula& g) -> HnfNode {
        HnfNode n;
        if (!ok) return n;
        switch (g.kind) {
            case K::True: n.kind = HnfNode::Kind::True; return n;
            case K::False: n.kind = HnfNode::Kind::False; return n;
            case K::Not:
            case K::And:
            case K::Or:
                n.kind = g.kind == K::Not ? HnfNode::Kind::Not : g.kind == K::And ? HnfNode::Kind::And : HnfNode::Kind::Or;
                for (const auto& c : g.kids) n.kids.push_back(self(self, *c));
                return n;
            case K::Sphere: {
                SphereAtom a;
                a.type = *g.type;
                a.id = canonicalize(a.type);
                for (const auto& v : g.vars) {
                    auto it = std::find(free.begin(), free.end(), v);
                    if (it == free.end()) {
                        ok = false;
                        return n;
                    }
                    a.positions.push_back(static_cast<int>(it - free.begin()));
                }
                n.kind = HnfNode::Kind::Sphere;
                n.leaf = static_cast<int>(q.spheres.size());
                q.spheres.push_back(std::move(a));
                return n;
            }
            case K::Exists:
            case K::ExistsGeq:
            case K::ExistsMod: {
                const Formula& body = *g.kids[0];
                if (body.kind != K::Sphere || body.vars.size() != 1 || body.vars[0] != g.vars[0]) {
                    ok = false;
                    return n;
                }
                HanfSentence h;
                h.kind = g.kind == K::ExistsMod ? HanfSentence::Kind::Mod : HanfSentence::Kind::AtLeast;
                h.m = g.kind == K::Exists ? 1 : g.m;
                h.i = g.i;
                h.type = *body.type;
                h.id = canonicalize(h.type);
                n.kind = HnfNode::Kind::Hanf;
                // repeated sentences share one leaf, so J has one bit per distinct sentence
                for (std::size_t j = 0; j < q.hanf.size(); ++j) {
                    const HanfSentence& o = q.hanf[j];
                    if (o.kind == h.kind && o.m == h.m && o.i == h.i && o.id == h.id) {
                        n.leaf = static_cast<int>(j);
                        return n;
                    }
                }
                n.leaf = static_cast<int>(q.hanf.size());
                q.hanf.push_back(std::move(h));
                return n;
            }
            default:
                ok = false;
                return n;
        }
    };
    q.root = conv(conv, f);
    if (!ok) return std::nullopt;
    return q;
}

void check_degree(const HnfQuery& q, int d) {
    for (const auto& h : q.hanf) {
        if (max_degree(h.type.structure) > d) throw TypeError("hanf sentence type exceeds degree bound");
    }
    for (const auto& s : q.spheres) {
        if (max_degree(s.type.structure) > d) throw TypeError("sphere type exceeds degree bound");
    }
}

ParsedQuery parse_query(const std::string& text, const Schema& schema) {
    auto es = parse_sexprs(text);
    ParsedQuery q;
    std::optional<std::vector<std::string>> declared;
    const SExpr* body = nullptr;
    for (const auto& e : es) {
        if (e.head_is("type")) {
            TypeLiteral t = parse_type_literal(e, schema);
            for (const auto& o : q.types) {
                if (o.name == t.name) fail_at(e, "duplicate type '" + t.name + "'");
            }
            q.types.push_back(std::move(t));
        } else if (e.head_is("free")) {
            declared.emplace();
            for (std::size_t i = 1; i < e.items.size(); ++i) {
                const std::string& v = atom_text(e.items[i]);
                if (std::find(declared->begin(), declared->end(), v) != declared->end()) {
                    fail_at(e.items[i], "variable '" + v + "' declared twice");
                }
                declared->push_back(v);
            }
        } else {
            if (body) fail_at(e, "more than one formula");
            body = &e;
        }
    }
    if (!body) throw ParseError("no formula", 1, 1);
    QueryParser p(schema, q.types);
    q.formula = p.formula(*body);
    std::set<std::string> fv = free_variables(*q.formula);
    if (declared) {
        for (const auto& v : fv) {
            if (std::find(declared->begin(), declared->end(), v) == declared->end()) {
                fail_at(*body, "free variable '" + v + "' is not declared");
            }
        }
        q.free = *declared;
    } else {
        std::set<std::string> bound;
        first_occurrence(*q.formula, bound, q.free);
    }
    q.hnf = to_hnf(*q.formula, q.free);
    return q;
}

namespace {

class Oracle {
  public:
    explicit Oracle(const Database& db) : db_(db), adom_(db.adom()) {}

    void guard(const Formula& f) const {
        double cost = std::pow(static_cast<double>(adom_.size()), quantifier_rank(f));
        if (cost > 1e8) throw OracleError("oracle refuses: |adom|^qr exceeds 1e8");
    }

    const std::vector<Const>& adom() const { return adom_; }

    bool eval(const Formula& f, Assignment& a) {
        bool closed = is_closed(f);
        if (closed) {
            auto it = closed_.find(&f);
            if (it != closed_.end()) return it->second;
        }
        bool v = eval_raw(f, a);
        if (closed) closed_[&f] = v;
        return v;
    }

  private:
    Const lookup(const Assignment& a, const std::string& v) const {
        auto it = a.find(v);
        if (it == a.end()) throw OracleError("unbound variable '" + v + "'");
        return it->second;
    }

    bool is_closed(const Formula& f) {
        auto it = closed_flag_.find(&f);
        if (it != closed_flag_.end()) return it->second;
        bool c = free_variables(f).empty();
        closed_flag_[&f] = c;
        return c;
    }

    long long count_witnesses(const Formula& f, Assignment& a, long long stop_at) {
        const std::string& x = f.vars[0];
        auto saved = a.find(x) == a.end() ? std::optional<Const>{} : std::optional<Const>{a[x]};
        long long n = 0;
        for (Const c : adom_) {
            a[x] = c;
            if (eval(*f.kids[0], a) && ++n == stop_at) break;
        }
        if (saved) {
            a[x] = *saved;
        } else {
            a.erase(x);
        }
        return n;
    }

    bool eval_raw(const Formula& f, Assignment& a) {
        switch (f.kind) {
            case K::True: return true;
            case K::False: return false;
            case K::Eq: return lookup(a, f.vars[0]) == lookup(a, f.vars[1]);
            case K::Rel: {
                Tuple t;
                for (const auto& v : f.vars) t.push_back(lookup(a, v));
                return db_.relation(f.rel).count(t) != 0;
            }
            case K::Not: return !eval(*f.kids[0], a);
            case K::And:
                for (const auto& k : f.kids) {
                    if (!eval(*k, a)) return false;
                }
                return true;
            case K::Or:
                for (const auto& k : f.kids) {
                    if (eval(*k, a)) return true;
                }
                return false;
            case K::Exists: return count_witnesses(f, a, 1) >= 1;
            case K::ExistsGeq: return count_witnesses(f, a, f.m) >= f.m;
            case K::ExistsMod: return count_witnesses(f, a, 0) % f.m == f.i;
            case K::Sphere: {
                Tuple t;
                for (const auto& v : f.vars) t.push_back(lookup(a, v));
                auto key = std::make_pair(&f, t);
                auto it = sphere_.find(key);
                if (it != sphere_.end()) return it->second;
                NeighborhoodDb nb = induced_neighborhood(db_, t, f.type->radius);
                std::vector<int> lc;
                LocalStructure ls = to_local(nb, t, lc);
                bool v = isomorphic_local(ls, lc, f.type->structure, f.type->centres);
                sphere_.emplace(std::move(key), v);
                return v;
            }
        }
        return false;
    }

    const Database& db_;
    std::vector<Const> adom_;
    std::unordered_map<const Formula*, bool> closed_;
    std::unordered_map<const Formula*, bool> closed_flag_;
    std::map<std::pair<const Formula*, Tuple>, bool> sphere_;
};

}  // namespace

bool eval_oracle(const Database& db, const Formula& f, const Assignment& alpha) {
    Oracle o(db);
    o.guard(f);
    Assignment a = alpha;
    return o.eval(f, a);
}

std::set<Tuple> eval_query_oracle(const Database& db, const Formula& f, const std::vector<std::string>& free) {
    Oracle o(db);
    o.guard(f);
    std::set<Tuple> out;
    const std::size_t k = free.size();
    const auto& dom = o.adom();
    if (k > 0 && dom.empty()) return out;
    std::vector<std::size_t> idx(k, 0);
    Assignment a;
    while (true) {
        Tuple t(k);
        for (std::size_t i = 0; i < k; ++i) {
            t[i] = dom[idx[i]];
            a[free[i]] = t[i];
        }
        if (o.eval(f, a)) out.insert(t);
        std::size_t p = k;
        while (p > 0 && ++idx[p - 1] == dom.size()) idx[--p] = 0;
        if (p == 0) break;
    }
    return out;
}

std::set<Tuple> eval_query_oracle(const Database& db, const ParsedQuery& q) {
    return eval_query_oracle(db, *q.formula, q.free);
}

}  // namespace dyndb
