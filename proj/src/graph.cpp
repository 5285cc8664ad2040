#include "creditnet/graph.hpp"

#include <algorithm>

namespace creditnet {

SimpleGraph::SimpleGraph(LedgerSnapshot const& snapshot)
{
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(snapshot.link_count());
    for (LinkIndex i = 0; i < snapshot.link_count(); ++i)
        edges.push_back(snapshot.endpoints(i));
    build(snapshot.wallet_count(), std::move(edges));
}

SimpleGraph SimpleGraph::from_edges(std::size_t vertex_count, std::span<std::pair<Vertex, Vertex> const> edges)
{
    SimpleGraph g;
    g.build(vertex_count, std::vector<std::pair<Vertex, Vertex>>(edges.begin(), edges.end()));
    return g;
}

void SimpleGraph::build(std::size_t vertex_count, std::vector<std::pair<Vertex, Vertex>> edges)
{
    std::vector<std::pair<Vertex, Vertex>> arcs;
    arcs.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
        if (u == v)
            continue;
        arcs.emplace_back(u, v);
        arcs.emplace_back(v, u);
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

    offsets_.assign(vertex_count + 1, 0);
    for (auto const& [u, v] : arcs)
        ++offsets_[u + 1];
    for (std::size_t i = 1; i < offsets_.size(); ++i)
        offsets_[i] += offsets_[i - 1];
    adjacency_.resize(arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i)
        adjacency_[i] = arcs[i].second;
}

bool SimpleGraph::adjacent(Vertex u, Vertex v) const
{
    auto const n = neighbors(u);
    return std::binary_search(n.begin(), n.end(), v);
}

std::size_t Components::largest_size() const
{
    return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

std::uint32_t Components::largest() const
{
    // max_element returns the first maximum, i.e. the lowest label.
    return static_cast<std::uint32_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
}

Components connected_components(SimpleGraph const& graph, std::span<std::uint8_t const> removed)
{
    auto const n = graph.vertex_count();
    Components out;
    out.label.assign(n, Components::no_component);
    std::vector<Vertex> stack;
    for (Vertex start = 0; start < n; ++start) {
        if (out.label[start] != Components::no_component || (!removed.empty() && removed[start]))
            continue;
        auto const id = static_cast<std::uint32_t>(out.sizes.size());
        std::size_t size = 0;
        out.label[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            Vertex const v = stack.back();
            stack.pop_back();
            ++size;
            for (Vertex w : graph.neighbors(v)) {
                if (out.label[w] != Components::no_component || (!removed.empty() && removed[w]))
                    continue;
                out.label[w] = id;
                stack.push_back(w);
            }
        }
        out.sizes.push_back(size);
    }
    return out;
}

}  // namespace creditnet
