#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dyndb/logic.hpp"
#include "dyndb/session.hpp"

using namespace dyndb;

namespace {

constexpr int kUsage = 1;
constexpr int kParse = 2;
constexpr int kDivergence = 3;

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic query evaluation over bounded-degree databases"};
    std::string schema_path, query_path, stream_path, mode = "count", gen = "path";
    int degree = 3;
    std::uint64_t seed = 1;
    bool oracle_only = false;
    std::vector<std::size_t> sizes{1000, 10000, 100000};
    std::size_t emissions = 10000;
    std::size_t steps = 200;
    app.add_option("--schema", schema_path, "schema file")->required();
    app.add_option("--query", query_path, "query file")->required();
    app.add_option("--stream", stream_path, "update stream file");
    app.add_option("--degree", degree, "degree bound d (>= 2)");
    app.add_option("--mode", mode, "answer|test|count|enum|check|bench")
        ->check(CLI::IsMember({"answer", "test", "count", "enum", "check", "bench"}));
    app.add_option("--seed", seed, "random seed for check and bench");
    app.add_flag("--oracle-only", oracle_only, "evaluate with the exhaustive oracle only");
    app.add_option("--gen", gen, "bench generator: path|random");
    app.add_option("--sizes", sizes, "bench database sizes")->delimiter(',');
    app.add_option("--emissions", emissions, "bench: emissions to time per size");
    app.add_option("--steps", steps, "check: random updates when no stream is given");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    std::string schema_text, query_text;
    if (!read_file(schema_path, schema_text)) {
        std::cerr << "cannot read " << schema_path << '\n';
        return kUsage;
    }
    if (!read_file(query_path, query_text)) {
        std::cerr << "cannot read " << query_path << '\n';
        return kUsage;
    }
    Schema schema;
    ParsedQuery query;
    try {
        schema = parse_schema(schema_text);
        query = parse_query(query_text, schema);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const SchemaError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const TypeError& e) {
        std::cerr << "query error: " << e.what() << '\n';
        return kParse;
    }

    try {
        if (mode == "bench") {
            if (!query.hnf) {
                std::cerr << "bench needs a query in Hanf normal form\n";
                return kUsage;
            }
            auto rows = run_bench(schema, degree, *query.hnf, gen, sizes, emissions, seed);
            std::cout << format_bench(rows);
            return 0;
        }
        if (mode == "check" && oracle_only) {
            std::cerr << "check compares the engine with the oracle; drop --oracle-only\n";
            return kUsage;
        }
        Session session(schema, degree, query, oracle_only);
        bool check_each = mode == "check";
        if (!stream_path.empty()) {
            std::ifstream in(stream_path);
            if (!in) {
                std::cerr << "cannot read " << stream_path << '\n';
                return kUsage;
            }
            int rc = session.run_stream(in, std::cout, std::cerr, check_each);
            if (rc != 0) return rc;
        } else if (check_each) {
            std::mt19937_64 rng(seed);
            for (std::size_t step = 1; step <= steps; ++step) {
                UpdateCmd cmd = random_update(session.db(), rng, 12);
                session.update(cmd);
                if (auto d = session.check()) {
                    std::cout << "DIVERGENCE step " << step << ": " << *d << '\n';
                    return kDivergence;
                }
            }
        }
        if (mode == "answer") {
            std::cout << (session.answer() ? "yes" : "no") << '\n';
        } else if (mode == "count") {
            std::cout << to_string(session.count()) << '\n';
        } else if (mode == "enum") {
            session.enumerate(std::cout);
        } else if (mode == "check") {
            std::cout << "OK\n";
        } else if (mode == "test") {
            std::string line;
            int lineno = 0;
            while (std::getline(std::cin, line)) {
                ++lineno;
                std::istringstream is(line.substr(0, line.find('#')));
                Tuple t;
                std::string tok;
                bool ok = true;
                while (is >> tok) {
                    try {
                        std::size_t used = 0;
                        unsigned long long v = std::stoull(tok, &used);
                        if (used != tok.size() || v == 0) throw std::invalid_argument(tok);
                        t.push_back(v);
                    } catch (const std::exception&) {
                        std::cerr << "stdin line " << lineno << ": bad constant '" << tok << "'\n";
                        ok = false;
                        break;
                    }
                }
                if (!ok) return kParse;
                if (t.empty()) continue;
                std::cout << (session.test(t) ? "member" : "nonmember") << '\n';
            }
        }
    } catch (const OracleError& e) {
        std::cerr << "oracle refused: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const TypeError& e) {
        std::cerr << "query error: " << e.what() << '\n';
        return kParse;
    }
    return 0;
}
