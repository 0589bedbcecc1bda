#include "dyndb/colored_graph.hpp"

#include <algorithm>

#include "dyndb/opcount.hpp"

namespace dyndb {

namespace {
const std::unordered_set<Vid> kEmpty;
}

ColoredGraph::ColoredGraph(int colours) : c_(colours), sizes_(static_cast<std::size_t>(colours), 0) {
    if (colours < 1 || colours > 32) throw std::invalid_argument("colour count must be in [1, 32]");
}

void ColoredGraph::notify_before(const GraphOp& op) {
    for (auto* o : obs_) o->before(*this, op);
}

void ColoredGraph::notify_after(const GraphOp& op) {
    for (auto* o : obs_) o->after(*this, op);
}

void ColoredGraph::bump_degree(std::size_t from, std::size_t to) {
    if (from > 0) {
        auto it = deg_hist_.find(static_cast<int>(from));
        if (--it->second == 0) deg_hist_.erase(it);
    }
    if (to > 0) ++deg_hist_[static_cast<int>(to)];
}

bool ColoredGraph::in_colour(Vid v, int i) const {
    ops::tick();
    auto it = nodes_.find(v);
    return it != nodes_.end() && (it->second.mask >> i & 1u);
}

std::uint32_t ColoredGraph::colour_mask(Vid v) const {
    auto it = nodes_.find(v);
    return it == nodes_.end() ? 0u : it->second.mask;
}

bool ColoredGraph::adjacent(Vid u, Vid v) const {
    ops::tick();
    auto it = nodes_.find(u);
    return it != nodes_.end() && it->second.adj.count(v) != 0;
}

const std::unordered_set<Vid>& ColoredGraph::neighbors(Vid v) const {
    auto it = nodes_.find(v);
    return it == nodes_.end() ? kEmpty : it->second.adj;
}

std::vector<Vid> ColoredGraph::vertices() const {
    std::vector<Vid> out;
    out.reserve(nodes_.size());
    for (const auto& [v, _] : nodes_) out.push_back(v);
    std::sort(out.begin(), out.end());
    return out;
}

bool ColoredGraph::add_to_colour(Vid v, int i) {
    if (i < 0 || i >= c_) throw std::out_of_range("colour index");
    if (v == kVoid) throw std::invalid_argument("reserved vertex id");
    auto it = nodes_.find(v);
    if (it != nodes_.end() && (it->second.mask >> i & 1u)) return false;
    GraphOp op{GraphOp::Kind::AddColour, v, kVoid, i};
    notify_before(op);
    nodes_[v].mask |= 1u << i;
    ++sizes_[static_cast<std::size_t>(i)];
    notify_after(op);
    return true;
}

bool ColoredGraph::remove_from_colour(Vid v, int i) {
    auto it = nodes_.find(v);
    if (it == nodes_.end() || !(it->second.mask >> i & 1u)) return false;
    if (it->second.mask == (1u << i) && !it->second.adj.empty()) {
        throw std::logic_error("vertex leaves the graph with incident edges");
    }
    GraphOp op{GraphOp::Kind::RemoveColour, v, kVoid, i};
    notify_before(op);
    it->second.mask &= ~(1u << i);
    --sizes_[static_cast<std::size_t>(i)];
    if (it->second.mask == 0) nodes_.erase(it);
    notify_after(op);
    return true;
}

bool ColoredGraph::add_edge(Vid u, Vid v) {
    auto iu = nodes_.find(u);
    auto iv = nodes_.find(v);
    if (iu == nodes_.end() || iv == nodes_.end()) throw std::logic_error("edge endpoint not in graph");
    if (iu->second.adj.count(v)) return false;
    GraphOp op{GraphOp::Kind::AddEdge, u, v, -1};
    notify_before(op);
    bump_degree(iu->second.adj.size(), iu->second.adj.size() + 1);
    iu->second.adj.insert(v);
    if (u != v) {
        bump_degree(iv->second.adj.size(), iv->second.adj.size() + 1);
        iv->second.adj.insert(u);
    }
    ++edges_;
    notify_after(op);
    return true;
}

bool ColoredGraph::remove_edge(Vid u, Vid v) {
    auto iu = nodes_.find(u);
    if (iu == nodes_.end() || !iu->second.adj.count(v)) return false;
    auto iv = nodes_.find(v);
    GraphOp op{GraphOp::Kind::RemoveEdge, u, v, -1};
    notify_before(op);
    bump_degree(iu->second.adj.size(), iu->second.adj.size() - 1);
    iu->second.adj.erase(v);
    if (u != v) {
        bump_degree(iv->second.adj.size(), iv->second.adj.size() - 1);
        iv->second.adj.erase(u);
    }
    --edges_;
    notify_after(op);
    return true;
}

}  // namespace dyndb
