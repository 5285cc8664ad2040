#include "creditnet/synth.hpp"

#include "creditnet/error.hpp"
#include "creditnet/random.hpp"

#include <string>

namespace creditnet {

namespace {

std::string padded(int value, int width)
{
    std::string digits = std::to_string(value);
    if (static_cast<int>(digits.size()) < width)
        digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
    return digits;
}

int width_for(int count)
{
    return static_cast<int>(std::to_string(count > 0 ? count - 1 : 0).size());
}

void check(SynthConfig const& c)
{
    auto fail = [](std::string const& why) { throw Error(ErrorKind::config, why); };
    if (c.n_gateways <= 0)
        fail("n_gateways must be positive");
    if (c.users_per_gateway <= 0)
        fail("users_per_gateway must be positive");
    if (c.inter_gateway_links < 0 || c.market_makers < 0)
        fail("link and market maker counts must be non-negative");
    if (c.currencies.empty())
        fail("at least one currency is required");
    for (auto const& cur : c.currencies) {
        if (cur.is_xrp())
            fail("XRP cannot be a credit link currency");
    }
    if (c.balance_min.is_negative() || c.balance_max < c.balance_min)
        fail("balance range must satisfy 0 <= min <= max");
    if (!(c.ripple_policy >= 0.0 && c.ripple_policy <= 1.0))
        fail("ripple_policy must lie in [0, 1]");
    if (c.limit_policy.kind == LimitPolicy::Kind::multiple_of_balance && c.limit_policy.multiple < Amount::from_units(1))
        fail("limit multiple must be at least 1");
    long long const pairs = static_cast<long long>(c.n_gateways) * (c.n_gateways - 1) / 2;
    long long const capacity = pairs * 2 * static_cast<long long>(c.currencies.size());
    if (c.inter_gateway_links > capacity)
        fail("inter_gateway_links exceeds the " + std::to_string(capacity) + " distinct gateway links available");
    if (c.market_makers > 0 && c.currencies.size() < 2)
        fail("market makers need at least two currencies");
}

class Generator {
public:
    explicit Generator(SynthConfig const& config) : config_(config), rng_(config.seed) {}

    Amount balance()
    {
        // Whole cents keep fixtures readable.
        std::int64_t const lo = (config_.balance_min.micros() + 9'999) / 10'000;
        std::int64_t const hi = config_.balance_max.micros() / 10'000;
        if (hi < lo)
            return config_.balance_min;
        return Amount::from_micros(rng_.between(lo, hi) * 10'000);
    }

    Limit limit_for(Amount balance) const
    {
        if (config_.limit_policy.kind == LimitPolicy::Kind::unbounded)
            return Limit::unbounded();
        return Limit(balance.scaled(config_.limit_policy.multiple.micros(), Amount::scale, Rounding::floor));
    }

    Currency const& pick_currency()
    {
        return config_.currencies[rng_.below(config_.currencies.size())];
    }

    Rng& rng() { return rng_; }

private:
    SynthConfig const& config_;
    Rng rng_;
};

}  // namespace

LedgerSnapshot generate_synthetic(SynthConfig const& config)
{
    check(config);
    Generator gen(config);
    LedgerSnapshot::Parts parts;
    parts.timestamp = config.timestamp;

    int const gw_width = width_for(config.n_gateways);
    int const user_width = width_for(config.users_per_gateway);
    std::vector<WalletId> gateways;
    for (int g = 0; g < config.n_gateways; ++g) {
        WalletId id("gw" + padded(g, gw_width));
        parts.wallets.push_back(Wallet{id, Amount::from_units(1000), true, Role::gateway, 0});
        parts.gateway_registry.push_back(id);
        gateways.push_back(id);
    }

    for (int g = 0; g < config.n_gateways; ++g) {
        for (int u = 0; u < config.users_per_gateway; ++u) {
            WalletId user("u" + padded(g, gw_width) + "." + padded(u, user_width));
            parts.wallets.push_back(Wallet{user, Amount::from_units(100), false, Role::user, 0});
            Amount const balance = gen.balance();
            CreditLink link{gateways[static_cast<std::size_t>(g)], user, gen.pick_currency(), balance,
                            gen.limit_for(balance), false, !gen.rng().chance(config.ripple_policy)};
            parts.links.push_back(std::move(link));
        }
    }

    // Round r over all gateway pairs: even rounds point from the lower to the
    // higher gateway, odd rounds the other way; every two rounds move to the
    // next currency.
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < config.n_gateways; ++a)
        for (int b = a + 1; b < config.n_gateways; ++b)
            pairs.emplace_back(a, b);
    for (int k = 0; k < config.inter_gateway_links; ++k) {
        auto const [a, b] = pairs[static_cast<std::size_t>(k) % pairs.size()];
        auto const round = static_cast<std::size_t>(k) / pairs.size();
        bool const forward = round % 2 == 0;
        Currency const& currency = config.currencies[(round / 2) % config.currencies.size()];
        Amount const balance = gen.balance();
        WalletId const& x = gateways[static_cast<std::size_t>(forward ? a : b)];
        WalletId const& y = gateways[static_cast<std::size_t>(forward ? b : a)];
        parts.links.push_back(CreditLink{x, y, currency, balance, gen.limit_for(balance), false, false});
    }

    int const mm_width = width_for(config.market_makers);
    for (int m = 0; m < config.market_makers; ++m) {
        WalletId maker("mm" + padded(m, mm_width));
        parts.wallets.push_back(Wallet{maker, Amount::from_units(100), false, Role::market_maker, 0});
        WalletId const& gateway = gateways[static_cast<std::size_t>(m % config.n_gateways)];
        Currency const& takes = config.currencies[0];
        Currency const& gives = config.currencies[1];
        Amount const takes_balance = gen.balance();
        Amount gives_balance = gen.balance();
        parts.links.push_back(CreditLink{gateway, maker, takes, takes_balance, Limit::unbounded(), false, false});
        parts.links.push_back(
            CreditLink{gateway, maker, gives, gives_balance, gen.limit_for(gives_balance), false, false});
        if (gives_balance.is_positive()) {
            // Price within +-10% of parity, in thousandths.
            std::int64_t const per_mille = gen.rng().between(900, 1100);
            Amount const takes_amount = gives_balance.scaled(per_mille, 1000, Rounding::ceil);
            parts.offers.push_back(ExchangeOffer{maker.str() + "-0", maker, gives, takes, gives_balance,
                                                 takes_amount, config.timestamp, std::nullopt});
        }
    }

    return LedgerSnapshot::make(std::move(parts));
}

}  // namespace creditnet
