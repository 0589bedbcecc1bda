#include "dyndb/session.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "dyndb/opcount.hpp"

namespace dyndb {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

Const parse_const(const std::string& tok, int lineno) {
    Const v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || v == 0) {
        throw ParseError("expected a positive integer constant, got '" + tok + "'", lineno, 1);
    }
    return v;
}

}  // namespace

StreamLine parse_stream_line(const std::string& raw, int lineno) {
    std::string line = raw.substr(0, raw.find('#'));
    auto toks = split_ws(line);
    StreamLine out;
    if (toks.empty()) return out;
    std::size_t i = 0;
    if (toks[0] == "update") {
        if (toks.size() < 2) throw ParseError("update needs + or -", lineno, 1);
        i = 1;
    }
    const std::string& head = toks[i];
    if (head == "+" || head == "-") {
        if (toks.size() < i + 2) throw ParseError("update needs a relation name", lineno, 1);
        out.kind = StreamLine::Kind::Update;
        out.update.kind = head == "+" ? UpdateKind::Insert : UpdateKind::Delete;
        out.update.relation = toks[i + 1];
        for (std::size_t j = i + 2; j < toks.size(); ++j) out.update.args.push_back(parse_const(toks[j], lineno));
        return out;
    }
    if (i != 0) throw ParseError("update needs + or -", lineno, 1);
    auto no_args = [&](StreamLine::Kind k) {
        if (toks.size() != 1) throw ParseError("'" + head + "' takes no arguments", lineno, 1);
        out.kind = k;
        return out;
    };
    if (head == "answer") return no_args(StreamLine::Kind::Answer);
    if (head == "count") return no_args(StreamLine::Kind::Count);
    if (head == "enumerate" || head == "enum") return no_args(StreamLine::Kind::Enumerate);
    if (head == "check") return no_args(StreamLine::Kind::Check);
    if (head == "test") {
        out.kind = StreamLine::Kind::Test;
        for (std::size_t j = 1; j < toks.size(); ++j) out.args.push_back(parse_const(toks[j], lineno));
        return out;
    }
    throw ParseError("unknown command '" + head + "'", lineno, 1);
}

std::string format_tuple(const Tuple& t) {
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(t[i]);
    }
    return s;
}

Session::Session(const Schema& schema, int d, ParsedQuery q, bool oracle_only) : q_(std::move(q)) {
    if (!oracle_only) {
        if (!q_.hnf) throw std::invalid_argument("query is not in Hanf normal form (use --oracle-only)");
        engine_ = std::make_unique<Engine>(schema, d, *q_.hnf);
    } else {
        db_ = std::make_unique<Database>(schema, d);
    }
}

UpdateOutcome Session::update(const UpdateCmd& cmd) {
    UpdateOutcome o = engine_ ? engine_->update(cmd) : db_->apply(cmd);
    switch (o) {
        case UpdateOutcome::Applied: ++tally_.applied; break;
        case UpdateOutcome::NoChange: ++tally_.nochange; break;
        case UpdateOutcome::RejectedDegree: ++tally_.rejected; break;
    }
    return o;
}

void Session::require_sentence() const {
    if (k() != 0) throw std::invalid_argument("answer needs a sentence; the query has free variables");
}

bool Session::answer() const {
    require_sentence();
    if (engine_) return engine_->answer();
    return !eval_query_oracle(db(), *q_.formula, q_.free).empty();
}

bool Session::test(const Tuple& a) const {
    if (static_cast<int>(a.size()) != k()) {
        throw std::invalid_argument("test needs " + std::to_string(k()) + " constants, got " + std::to_string(a.size()));
    }
    if (engine_) return engine_->test(a);
    return eval_query_oracle(db(), *q_.formula, q_.free).count(a) != 0;
}

Count Session::count() const {
    if (engine_) return engine_->count();
    return static_cast<Count>(eval_query_oracle(db(), *q_.formula, q_.free).size());
}

void Session::enumerate(std::ostream& out) {
    if (engine_) {
        engine_->enumerate(
            [&](const Tuple& t) {
                out << format_tuple(t) << '\n';
                return true;
            },
            [&] { out << "#done\n"; });
        return;
    }
    for (const auto& t : eval_query_oracle(db(), *q_.formula, q_.free)) out << format_tuple(t) << '\n';
    out << "#done\n";
}

std::optional<std::string> Session::check() {
    if (!engine_) return std::nullopt;
    std::set<Tuple> want = eval_query_oracle(db(), *q_.formula, q_.free);
    std::ostringstream msg;
    if (k() == 0 && engine_->answer() != !want.empty()) {
        msg << "answer: engine " << (engine_->answer() ? "yes" : "no") << ", oracle " << (want.empty() ? "no" : "yes");
        return msg.str();
    }
    if (engine_->count() != static_cast<Count>(want.size())) {
        msg << "count: engine " << to_string(engine_->count()) << ", oracle " << want.size();
        return msg.str();
    }
    std::vector<Tuple> got;
    int markers = 0;
    engine_->enumerate(
        [&](const Tuple& t) {
            got.push_back(t);
            return true;
        },
        [&] { ++markers; });
    if (markers != 1) return "enumerate: " + std::to_string(markers) + " end markers";
    std::set<Tuple> got_set(got.begin(), got.end());
    if (got_set.size() != got.size()) return std::string("enumerate: duplicate emission");
    if (got_set != want) {
        for (const auto& t : want) {
            if (!got_set.count(t)) return "enumerate: missing (" + format_tuple(t) + ")";
        }
        for (const auto& t : got_set) {
            if (!want.count(t)) return "enumerate: spurious (" + format_tuple(t) + ")";
        }
    }
    std::vector<Const> dom = db().adom();
    dom.push_back(dom.empty() ? 1 : dom.back() + 1);  // one constant outside adom
    Tuple t(static_cast<std::size_t>(k()));
    std::optional<std::string> bad;
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (bad) return;
        if (i == t.size()) {
            bool g = engine_->test(t);
            if (g != (want.count(t) != 0)) {
                bad = "test (" + format_tuple(t) + "): engine " + (g ? "member" : "nonmember") + ", oracle " +
                      (g ? "nonmember" : "member");
            }
            return;
        }
        for (Const c : dom) {
            t[i] = c;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return bad;
}

int Session::run_stream(std::istream& in, std::ostream& out, std::ostream& err, bool check_each) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        try {
            StreamLine sl = parse_stream_line(line, lineno);
            switch (sl.kind) {
                case StreamLine::Kind::Blank: break;
                case StreamLine::Kind::Update: {
                    UpdateOutcome o = update(sl.update);
                    if (o == UpdateOutcome::RejectedDegree) {
                        err << "line " << lineno << ": rejected (degree bound): " << line << '\n';
                    }
                    if (check_each) {
                        if (auto d = check()) {
                            out << "DIVERGENCE line " << lineno << ": " << *d << '\n';
                            return 3;
                        }
                    }
                    break;
                }
                case StreamLine::Kind::Answer: out << (answer() ? "yes" : "no") << '\n'; break;
                case StreamLine::Kind::Test: out << (test(sl.args) ? "member" : "nonmember") << '\n'; break;
                case StreamLine::Kind::Count: out << to_string(count()) << '\n'; break;
                case StreamLine::Kind::Enumerate: enumerate(out); break;
                case StreamLine::Kind::Check:
                    if (auto d = check()) {
                        out << "DIVERGENCE line " << lineno << ": " << *d << '\n';
                        return 3;
                    }
                    out << "OK\n";
                    break;
            }
        } catch (const ParseError& e) {
            err << "line " << lineno << ": " << e.what() << '\n';
            return 2;
        } catch (const SchemaError& e) {
            err << "line " << lineno << ": " << e.what() << '\n';
            return 2;
        } catch (const std::invalid_argument& e) {
            err << "line " << lineno << ": " << e.what() << '\n';
            return 2;
        }
    }
    err << "updates: " << tally_.applied << " applied, " << tally_.nochange << " nochange, " << tally_.rejected
        << " rejected\n";
    return 0;
}

UpdateCmd random_update(const Database& db, std::mt19937_64& rng, Const max_const, double insert_bias) {
    const Schema& s = db.schema();
    std::uniform_int_distribution<std::size_t> pick_rel(0, s.size() - 1);
    std::uniform_int_distribution<Const> pick_const(1, max_const);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    int rel = static_cast<int>(pick_rel(rng));
    UpdateCmd cmd;
    cmd.relation = s.relations[static_cast<std::size_t>(rel)].name;
    bool insert = coin(rng) < insert_bias;
    const auto& stored = db.relation(rel);
    if (!insert && !stored.empty() && coin(rng) < 0.9) {
        std::vector<Tuple> ts(stored.begin(), stored.end());
        std::sort(ts.begin(), ts.end());
        std::uniform_int_distribution<std::size_t> pick(0, ts.size() - 1);
        cmd.kind = UpdateKind::Delete;
        cmd.args = ts[pick(rng)];
        return cmd;
    }
    cmd.kind = insert ? UpdateKind::Insert : UpdateKind::Delete;
    for (int i = 0; i < s.arity(rel); ++i) cmd.args.push_back(pick_const(rng));
    return cmd;
}

std::vector<UpdateCmd> generate_workload(const Schema& schema, const std::string& generator, std::size_t n,
                                         std::uint64_t seed) {
    std::vector<UpdateCmd> out;
    if (generator == "path") {
        for (const auto& r : schema.relations) {
            if (r.arity == 1) {
                for (Const i = 3; i <= n; i += 3) out.push_back({UpdateKind::Insert, r.name, {i}});
            } else if (r.arity == 2) {
                for (Const i = 1; i < n; ++i) out.push_back({UpdateKind::Insert, r.name, {i, i + 1}});
            }
        }
        return out;
    }
    if (generator == "random") {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<Const> pick(1, std::max<Const>(1, n));
        for (const auto& r : schema.relations) {
            std::size_t count = r.arity == 1 ? n / 3 : n;
            for (std::size_t j = 0; j < count; ++j) {
                UpdateCmd c{UpdateKind::Insert, r.name, {}};
                for (int a = 0; a < r.arity; ++a) c.args.push_back(pick(rng));
                out.push_back(std::move(c));
            }
        }
        return out;
    }
    throw std::invalid_argument("unknown generator '" + generator + "'");
}

std::vector<BenchRow> run_bench(const Schema& schema, int d, const HnfQuery& q, const std::string& generator,
                                const std::vector<std::size_t>& sizes, std::size_t emissions, std::uint64_t seed) {
    std::vector<BenchRow> rows;
    for (std::size_t n : sizes) {
        BenchRow row;
        row.size = n;
        Engine e(schema, d, q);
        auto work = generate_workload(schema, generator, n, seed);
        auto t0 = ops::now();
        for (const auto& c : work) e.update(c);
        row.preprocess = ops::now() - t0;

        std::mt19937_64 rng(seed);
        std::vector<UpdateCmd> applied;
        for (const auto& c : work) {
            if (e.db().contains(e.db().schema().index_of(c.relation), c.args)) applied.push_back(c);
        }
        if (!applied.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, applied.size() - 1);
            for (int round = 0; round < 200; ++round) {
                UpdateCmd c = applied[pick(rng)];
                c.kind = UpdateKind::Delete;
                ops::Span s1;
                e.update(c);
                row.update_max = std::max(row.update_max, s1.elapsed());
                c.kind = UpdateKind::Insert;
                ops::Span s2;
                e.update(c);
                row.update_max = std::max(row.update_max, s2.elapsed());
            }
        }
        {
            ops::Span s;
            (void)e.count();
            row.count_ops = s.elapsed();
        }
        if (e.k() >= 1) {
            std::uniform_int_distribution<Const> base(1, std::max<Const>(1, n));
            std::uniform_int_distribution<Const> off(0, 3);
            for (int round = 0; round < 200; ++round) {
                Tuple t;
                Const b = base(rng);
                for (int i = 0; i < e.k(); ++i) t.push_back(round % 2 ? base(rng) : b + off(rng));
                ops::Span s;
                (void)e.test(t);
                row.test_max = std::max(row.test_max, s.elapsed());
            }
        }
        std::uint64_t last = ops::now();
        e.enumerate([&](const Tuple&) {
            std::uint64_t now = ops::now();
            row.delay_max = std::max(row.delay_max, now - last);
            last = now;
            return ++row.emitted < emissions;
        });
        rows.push_back(row);
    }
    return rows;
}

std::string format_bench(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "size preprocess update_max count_ops test_max delay_max emitted\n";
    for (const auto& r : rows) {
        os << r.size << ' ' << r.preprocess << ' ' << r.update_max << ' ' << r.count_ops << ' ' << r.test_max << ' '
           << r.delay_max << ' ' << r.emitted << '\n';
    }
    return os.str();
}

}  // namespace dyndb
