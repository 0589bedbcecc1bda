#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace dyndb {

using Vid = std::uint32_t;
constexpr Vid kVoid = 0xffffffffu;

struct GraphOp {
    enum class Kind { AddColour, RemoveColour, AddEdge, RemoveEdge };
    Kind kind;
    Vid u;
    Vid v;       // edges only
    int colour;  // colour ops only
};

class ColoredGraph;

class GraphObserver {
  public:
    virtual ~GraphObserver() = default;
    virtual void before(const ColoredGraph&, const GraphOp&) {}
    virtual void after(const ColoredGraph&, const GraphOp&) {}
};

// Undirected graph with c vertex colours (a vertex may carry several).
// Self-loops are allowed. A vertex exists while it carries a colour; its
// edges must be removed before it loses the last one.
class ColoredGraph {
  public:
    explicit ColoredGraph(int colours);

    int colours() const { return c_; }

    // Each returns false (and notifies nobody) if nothing changes.
    bool add_to_colour(Vid v, int i);
    bool remove_from_colour(Vid v, int i);
    bool add_edge(Vid u, Vid v);
    bool remove_edge(Vid u, Vid v);

    bool has_vertex(Vid v) const { return nodes_.count(v) != 0; }
    bool in_colour(Vid v, int i) const;
    std::uint32_t colour_mask(Vid v) const;
    bool adjacent(Vid u, Vid v) const;
    const std::unordered_set<Vid>& neighbors(Vid v) const;
    std::size_t colour_size(int i) const { return sizes_[static_cast<std::size_t>(i)]; }
    std::size_t vertex_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_; }
    // Maximum number of neighbours (a self-loop counts), 0 when edgeless.
    int max_degree() const { return deg_hist_.empty() ? 0 : deg_hist_.rbegin()->first; }
    std::vector<Vid> vertices() const;  // sorted

    void attach(GraphObserver* o) { obs_.push_back(o); }

  private:
    struct Node {
        std::uint32_t mask = 0;
        std::unordered_set<Vid> adj;
    };
    void notify_before(const GraphOp& op);
    void notify_after(const GraphOp& op);
    void bump_degree(std::size_t from, std::size_t to);

    int c_;
    std::unordered_map<Vid, Node> nodes_;
    std::vector<std::size_t> sizes_;
    std::map<int, int> deg_hist_;  // degree -> number of vertices (degree > 0 only)
    std::size_t edges_ = 0;
    std::vector<GraphObserver*> obs_;
};

}  // namespace dyndb
