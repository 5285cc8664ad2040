#pragma once

#include "creditnet/snapshot.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace creditnet {

/// Reads a line-delimited snapshot. Record kinds: wallet, link, offer, meta.
/// Unknown fields are ignored; unknown kinds are a ParseError. Structural
/// problems (balance above limit, dangling endpoints, duplicate links) throw
/// InvariantViolation. `gateways` is merged into the registry.
LedgerSnapshot read_snapshot(std::istream& in, std::span<WalletId const> gateways = {});
LedgerSnapshot load_snapshot(std::filesystem::path const& path, std::span<WalletId const> gateways = {});

/// Canonical output: meta, then wallets, links and offers in snapshot order.
/// Wallets in the gateway registry carry "gateway": true.
void write_snapshot(std::ostream& out, LedgerSnapshot const& snapshot);
void save_snapshot(std::filesystem::path const& path, LedgerSnapshot const& snapshot);

/// One wallet id per line; '#' starts a comment.
std::vector<WalletId> read_gateway_registry(std::istream& in);
std::vector<WalletId> load_gateway_registry(std::filesystem::path const& path);

}  // namespace creditnet
