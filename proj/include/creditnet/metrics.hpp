#pragma once

#include "creditnet/graph.hpp"
#include "creditnet/snapshot.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace creditnet {

struct MetricsReport {
    std::size_t n_wallets = 0;
    /// Ordered wallet pairs joined by at least one link, in that direction.
    std::size_t n_links = 0;
    std::size_t n_simple_edges = 0;
    double avg_degree = 0;
    /// Mean of local clustering coefficients (degree < 2 counts as 0).
    double clustering = 0;
    /// Global transitivity: 3 * triangles / connected triples.
    double transitivity = 0;
    double assortativity = 0;
    double density = 0;
};

/// 2 * edges / vertices.
double average_degree(std::size_t vertices, std::size_t simple_edges);
/// directed_edges / (vertices * (vertices - 1)).
double density(std::size_t vertices, std::size_t directed_edges);

/// Throws EmptySnapshot.
MetricsReport basic_metrics(LedgerSnapshot const& snapshot);
MetricsReport basic_metrics(SimpleGraph const& graph, std::size_t directed_edges);

/// Pearson correlation of the degrees at either end of each edge, every edge
/// taken in both directions. 0 when all degrees are equal.
double degree_assortativity(SimpleGraph const& graph);

/// Second-largest eigenvalue modulus of the lazy walk (I + D^-1 A) / 2,
/// by power iteration deflated against the stationary direction.
/// Throws Disconnected, ConvergenceFailure.
double lazy_walk_slem(SimpleGraph const& graph, double tolerance = 1e-9, int max_iterations = 100'000);

/// (mu / (2 (1 - mu))) * ln(1 / (2 epsilon)).
double mixing_bound(double mu, double epsilon);

/// Lower bound on the mixing time of the lazy walk at `epsilon` in (0, 0.5).
/// Throws Disconnected, ConvergenceFailure, ConfigError.
double mixing_time_lower_bound(LedgerSnapshot const& snapshot, double epsilon);
double mixing_time_lower_bound(SimpleGraph const& graph, double epsilon);

struct CommunityAssignment {
    double resolution = 1;
    /// Wallet index order. Community ids are numbered by smallest member.
    std::vector<WalletId> wallets;
    std::vector<std::uint32_t> community;
    double modularity = 0;
    /// Modularity after each pass.
    std::vector<double> pass_modularity;

    std::size_t count() const;
    /// Members per community, ascending by id.
    std::vector<std::size_t> sizes() const;
};

/// Resolution-scaled modularity of a partition of the simple collapse.
double modularity(SimpleGraph const& graph, std::span<std::uint32_t const> community, double resolution = 1);

/// Two-phase Louvain. Nodes are visited in a seeded shuffled order; a node
/// moves only for a strictly positive gain, ties going to the lowest
/// community id.
CommunityAssignment louvain(LedgerSnapshot const& snapshot, double resolution, std::uint64_t seed);
CommunityAssignment louvain(SimpleGraph const& graph, double resolution, std::uint64_t seed);

enum class Color { U, G, MM };

std::string_view to_string(Color color) noexcept;

/// Colour per wallet from its role.
std::vector<Color> role_colors(LedgerSnapshot const& snapshot);

/// Counts of connected three-node induced subgraphs, keyed by shape and
/// colours: "path:<end>-<centre>-<end>" and "triangle:<a>-<b>-<c>", colours in
/// name order (ends only, for paths).
struct MotifCensus {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;

    std::map<std::string, double> frequencies() const;
    /// Key with the highest count, ties to the smallest key; empty if none.
    std::string most_frequent() const;
};

/// `threads` > 1 splits the centre vertices across workers; the result does
/// not depend on it.
MotifCensus motif_census(SimpleGraph const& graph, std::span<Color const> colors, unsigned threads = 1);
MotifCensus motif_census(LedgerSnapshot const& snapshot, unsigned threads = 1);
/// Throws InvariantViolation if `coloring` misses a wallet.
MotifCensus motif_census(LedgerSnapshot const& snapshot, std::map<WalletId, Color> const& coloring,
                         unsigned threads = 1);

}  // namespace creditnet
