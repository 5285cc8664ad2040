#pragma once

#include "creditnet/settlement.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace creditnet {

/// Reads a transaction log. `id` is kept when present and computed otherwise.
/// Without hops, `offers_used` and `intermediaries` come from the record, and
/// `source_amount` defaults to `amount` for same-currency transactions.
std::vector<Transaction> read_txlog(std::istream& in);
std::vector<Transaction> load_txlog(std::filesystem::path const& path);

void write_txlog(std::ostream& out, std::span<Transaction const> log);
void save_txlog(std::filesystem::path const& path, std::span<Transaction const> log);

/// One line of a settlement request file.
///   payment:      {sender, receiver, amount, currency, max_source?, source_currency?, max_hops?, timestamp?}
///   circular_xrp: {kind:"circular_xrp", wallet, pay_xrp, currency, issuer, max_hops?, timestamp?}
struct CircularXrpIntent {
    WalletId wallet;
    Amount pay_xrp;
    Currency currency;
    WalletId issuer;
    int max_hops = 6;
};

struct SettlementRequest {
    std::variant<TxIntent, CircularXrpIntent> intent;
    std::optional<Timestamp> timestamp;
};

std::vector<SettlementRequest> read_requests(std::istream& in);
std::vector<SettlementRequest> load_requests(std::filesystem::path const& path);

}  // namespace creditnet
