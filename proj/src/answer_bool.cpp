#include "dyndb/answer_bool.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "dyndb/opcount.hpp"

namespace dyndb {

BoolState::BoolState(const HnfQuery& q)
    : hanf_(q.hanf), root_(q.root), sentence_(q.spheres.empty()), A_(q.hanf.size(), 0) {
    if (hanf_.size() > static_cast<std::size_t>(kMaxHanfSentences)) throw std::invalid_argument("too many Hanf sentences");
    refold();
}

void BoolState::refold() {
    J_ = 0;
    for (std::size_t j = 0; j < hanf_.size(); ++j) {
        if (hanf_[j].holds(A_[j])) J_ |= HanfValuation{1} << j;
    }
    if (!sentence_) {
        ans_ = false;
        return;
    }
    HnfQuery q;
    q.root = root_;
    ans_ = q.fold([&](int j) { return (J_ >> j & 1u) != 0; }, [](int) { return false; });
}

namespace {

// Type ids of each element at each needed radius, computed once per phase.
class TypeCache {
  public:
    explicit TypeCache(const Database& db) : db_(db) {}
    TypeId get(Const a, int r) {
        auto key = std::make_pair(a, r);
        auto it = ids_.find(key);
        if (it != ids_.end()) return it->second;
        TypeId id = canonicalize(type_of(db_, Tuple{a}, r));
        ops::tick();
        ids_.emplace(key, id);
        return id;
    }

  private:
    const Database& db_;
    std::map<std::pair<Const, int>, TypeId> ids_;
};

Tuple distinct(const Tuple& t) {
    Tuple c = t;
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

}  // namespace

void BoolState::prepare(const Database& before, const UpdateCmd& cmd) {
    Tuple consts = distinct(cmd.args);
    TypeCache cache(before);
    pending_.assign(hanf_.size(), {});
    for (std::size_t j = 0; j < hanf_.size(); ++j) {
        int r = hanf_[j].type.radius;
        pending_[j] = ball(before, consts, r);
        for (Const a : pending_[j]) {
            if (!before.in_adom(a)) continue;
            if (cache.get(a, r) != hanf_[j].id) continue;
            if (A_[j] == 0) throw std::logic_error("Hanf counter underflow");
            --A_[j];
        }
    }
    prepared_ = true;
}

void BoolState::commit(const Database& after) {
    if (!prepared_) throw std::logic_error("commit without prepare");
    TypeCache cache(after);
    for (std::size_t j = 0; j < hanf_.size(); ++j) {
        int r = hanf_[j].type.radius;
        for (Const a : pending_[j]) {
            if (!after.in_adom(a)) continue;
            if (cache.get(a, r) == hanf_[j].id) ++A_[j];
        }
    }
    prepared_ = false;
    pending_.clear();
    refold();
}

void bool_update(BoolState& s, const Database& before, const Database& after, const UpdateCmd& cmd) {
    s.prepare(before, cmd);
    s.commit(after);
}

}  // namespace dyndb
