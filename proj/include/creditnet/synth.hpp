#pragma once

#include "creditnet/snapshot.hpp"

#include <cstdint>
#include <vector>

namespace creditnet {

struct LimitPolicy {
    enum class Kind { unbounded, multiple_of_balance };

    Kind kind = Kind::unbounded;
    Amount multiple = Amount::from_units(1);

    static LimitPolicy unbounded() { return {}; }
    static LimitPolicy multiple_of_balance(Amount k) { return {Kind::multiple_of_balance, k}; }
};

/// Gateway-centric topology: every gateway issues credit to its own users,
/// and gateways are linked to one another round-robin over gateway pairs.
struct SynthConfig {
    int n_gateways = 1;
    int users_per_gateway = 1;
    /// Total gateway-to-gateway links, spread over pairs (0,1), (0,2), ...
    /// first, then repeated with alternating direction and further currencies.
    int inter_gateway_links = 0;
    std::vector<Currency> currencies{Currency("USD")};
    Amount balance_min = Amount::from_units(0);
    Amount balance_max = Amount::from_units(100);
    LimitPolicy limit_policy;
    /// Fraction of user links whose user side allows rippling.
    double ripple_policy = 0.0;
    std::uint64_t seed = 0;
    /// Extra users each holding two currencies with one gateway and an offer
    /// between them. Needs at least two currencies.
    int market_makers = 0;
    Timestamp timestamp{};
};

/// Pure function of the config (seed included). Throws ConfigError.
LedgerSnapshot generate_synthetic(SynthConfig const& config);

}  // namespace creditnet
