#pragma once

#include "creditnet/graph.hpp"
#include "creditnet/snapshot.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace creditnet {

/// Resolved no_ripple value for one side of a link:
///  1. a wallet with default_ripple allows rippling on all its links;
///  2. otherwise an explicit per-link flag is used as given;
///  3. an absent flag means rippling is allowed.
bool effective_no_ripple(LedgerSnapshot const& snapshot, LinkIndex link, Side side);

/// Rewrites every link so both sides carry their resolved flag. Idempotent.
LedgerSnapshot normalize_flags(LedgerSnapshot const& snapshot);

/// Sub-snapshot induced by the wallets with `keep[i]` set. Links and offers
/// touching dropped wallets are dropped too.
LedgerSnapshot induced_subsnapshot(LedgerSnapshot const& snapshot, std::span<std::uint8_t const> keep);

/// Largest weakly connected component (links taken as undirected). Ties go to
/// the component holding the lexicographically smallest wallet id.
/// Throws EmptySnapshot.
LedgerSnapshot largest_connected_component(LedgerSnapshot const& snapshot);

}  // namespace creditnet
