#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dyndb/answer_bool.hpp"
#include "dyndb/colored_graph.hpp"
#include "dyndb/counter.hpp"
#include "dyndb/database.hpp"
#include "dyndb/enumerator.hpp"
#include "dyndb/index_set.hpp"
#include "dyndb/logic.hpp"
#include "dyndb/sphere_index.hpp"

namespace dyndb {

class ActiveEnumeration : public std::runtime_error {
  public:
    ActiveEnumeration() : std::runtime_error("update rejected: enumeration in progress") {}
};

// Coloured graph for one signature: colour j holds the extent of the j-th
// component type, edges are the conflict edges among those tuples.
struct SignatureView {
    Signature sig;
    std::string key;
    std::unique_ptr<ColoredGraph> graph;
    std::unique_ptr<PatternCounter> counter;
    std::unique_ptr<SkipEnumerator> enumerator;
    bool accepted = false;
    Count counted = 0;  // contribution to the total count
};

// Dynamic evaluation of one HNF query: Boolean answers for sentences,
// membership tests, counts and enumeration for k >= 1.
class Engine {
  public:
    using EmitFn = std::function<bool(const Tuple&)>;
    using EndFn = std::function<void()>;

    Engine(const Schema& schema, int d, const HnfQuery& q);

    UpdateOutcome update(const UpdateCmd& cmd);

    const Database& db() const { return db_; }
    const HnfQuery& query() const { return q_; }
    int k() const { return q_.k(); }
    std::uint64_t version() const { return version_; }

    bool answer() const;
    bool test(const Tuple& a) const;
    Count count() const;
    // Returns false if the sink stopped early (no end marker then).
    bool enumerate(const EmitFn& emit, const EndFn& end = {});
    bool enumerating() const { return enumerating_; }

    HanfValuation valuation() const { return bool_.valuation(); }
    const BoolState& bool_state() const { return bool_; }
    const SphereIndex* index() const { return index_.get(); }
    std::size_t signature_count() const { return catalog_.size(); }
    std::size_t accepted_count() const { return accepted_.size(); }
    std::vector<const SignatureView*> views() const;

    // Deterministic dump of every maintained structure.
    std::string fingerprint() const;

  private:
    struct SigEntry {
        Signature sig;
        std::vector<bool> accept;  // per Hanf valuation
        SignatureView* view = nullptr;
    };

    void extend_catalog(const std::vector<TypeId>& new_ids);
    void add_signature(const Signature& sig);
    void populate(SignatureView& v);
    void dispatch(const DeltaBatch& batch);
    void recompute_accepted();
    void refresh(SignatureView& v);
    Tuple to_tuple(const SignatureView& v, const std::vector<Vid>& u) const;

    Database db_;
    HnfQuery q_;
    int r_ = 0;
    BoolState bool_;
    std::unique_ptr<SphereIndex> index_;
    std::map<std::string, SigEntry> catalog_;
    std::unordered_set<std::string> accepted_;
    std::map<std::string, const SignatureView*> live_;  // accepted views with n3 > 0
    std::vector<std::unique_ptr<SignatureView>> views_;
    std::unordered_map<TypeId, std::vector<SignatureView*>> views_by_id_;
    HanfValuation J_ = 0;
    Count total_ = 0;
    std::uint64_t version_ = 0;
    bool enumerating_ = false;
};

}  // namespace dyndb
