#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dyndb/database.hpp"
#include "dyndb/engine.hpp"
#include "dyndb/logic.hpp"

namespace dyndb {

// One parsed line of an update stream.
struct StreamLine {
    enum class Kind { Blank, Update, Answer, Test, Count, Enumerate, Check };
    Kind kind = Kind::Blank;
    UpdateCmd update;
    Tuple args;  // test
};

// Throws ParseError (column 1) on malformed lines.
StreamLine parse_stream_line(const std::string& line, int lineno);

struct UpdateTally {
    std::size_t applied = 0;
    std::size_t nochange = 0;
    std::size_t rejected = 0;
};

// Drives one query over one database: the dynamic engine when the query is
// in Hanf normal form, or the exhaustive oracle alone.
class Session {
  public:
    Session(const Schema& schema, int d, ParsedQuery q, bool oracle_only = false);

    int k() const { return static_cast<int>(q_.free.size()); }
    bool oracle_only() const { return !engine_; }
    const Database& db() const { return engine_ ? engine_->db() : *db_; }
    Engine* engine() { return engine_.get(); }
    const UpdateTally& tally() const { return tally_; }

    UpdateOutcome update(const UpdateCmd& cmd);
    bool answer() const;
    bool test(const Tuple& a) const;
    Count count() const;
    // One tuple per line, then "#done".
    void enumerate(std::ostream& out);

    // Compares every facility against the oracle; returns the first divergence.
    std::optional<std::string> check();

    // Executes a stream; commands write to out, rejected updates are reported
    // on err with their line numbers. Returns 3 on a check divergence, else 0.
    int run_stream(std::istream& in, std::ostream& out, std::ostream& err, bool check_each = false);

  private:
    void require_sentence() const;

    ParsedQuery q_;
    std::unique_ptr<Engine> engine_;
    std::unique_ptr<Database> db_;  // oracle-only
    UpdateTally tally_;
};

std::string format_tuple(const Tuple& t);

// A random command over db's schema with constants in [1, max_const];
// deletions usually pick a stored tuple.
UpdateCmd random_update(const Database& db, std::mt19937_64& rng, Const max_const, double insert_bias = 0.6);

struct BenchRow {
    std::size_t size = 0;
    std::uint64_t preprocess = 0;  // total ops to build
    std::uint64_t update_max = 0;
    std::uint64_t count_ops = 0;
    std::uint64_t test_max = 0;
    std::uint64_t delay_max = 0;
    std::size_t emitted = 0;
};

// Generators: "path" (binary relations along a path, unary relations on
// every third element) and "random" (random bounded-degree edges).
std::vector<UpdateCmd> generate_workload(const Schema& schema, const std::string& generator, std::size_t n,
                                         std::uint64_t seed);

std::vector<BenchRow> run_bench(const Schema& schema, int d, const HnfQuery& q, const std::string& generator,
                                const std::vector<std::size_t>& sizes, std::size_t emissions, std::uint64_t seed);

std::string format_bench(const std::vector<BenchRow>& rows);

}  // namespace dyndb
