#pragma once

#include "creditnet/snapshot.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace creditnet {

using Vertex = std::uint32_t;

/// One byte per vertex/wallet; non-zero means set.
using Mask = std::vector<std::uint8_t>;

/// Simple undirected graph: parallel per-currency links and link direction
/// are collapsed. Vertex i is wallet i of the snapshot it was built from.
class SimpleGraph {
public:
    SimpleGraph() = default;
    explicit SimpleGraph(LedgerSnapshot const& snapshot);

    /// Duplicate and self edges are dropped.
    static SimpleGraph from_edges(std::size_t vertex_count, std::span<std::pair<Vertex, Vertex> const> edges);

    std::size_t vertex_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }

    /// Sorted ascending.
    std::span<Vertex const> neighbors(Vertex v) const
    {
        return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }
    std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
    bool adjacent(Vertex u, Vertex v) const;

private:
    void build(std::size_t vertex_count, std::vector<std::pair<Vertex, Vertex>> edges);

    std::vector<std::size_t> offsets_;
    std::vector<Vertex> adjacency_;
};

/// Connected-component labelling. Vertices flagged in `removed` get label
/// `no_component`. Labels are assigned in order of each component's smallest
/// vertex, so component 0 holds the smallest surviving vertex.
struct Components {
    static constexpr std::uint32_t no_component = UINT32_MAX;

    std::vector<std::uint32_t> label;
    std::vector<std::size_t> sizes;

    std::size_t largest_size() const;
    /// Largest component; ties go to the lowest label.
    std::uint32_t largest() const;
};

Components connected_components(SimpleGraph const& graph, std::span<std::uint8_t const> removed = {});

}  // namespace creditnet
