#include "creditnet/error.hpp"
#include "creditnet/ledger.hpp"
#include "creditnet/random.hpp"
#include "creditnet/settlement.hpp"
#include "creditnet/synth.hpp"

#include "doctest.h"
#include "example_network.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

using namespace creditnet;
using fixture::amt;
using fixture::balance;

namespace {

TxIntent intent(std::string const& from, std::string const& to, std::string const& amount, std::string const& currency)
{
    TxIntent i;
    i.sender = WalletId(from);
    i.receiver = WalletId(to);
    i.deliver_amount = amt(amount);
    i.deliver_currency = Currency(currency);
    return i;
}

std::vector<std::string> route(std::vector<PathHop> const& hops)
{
    std::vector<std::string> names;
    if (hops.empty())
        return names;
    names.push_back(hops.front().from.str());
    for (auto const& h : hops) {
        if (h.kind != HopKind::offer_consume)
            names.push_back(h.to.str());
    }
    return names;
}

ErrorKind kind_of(std::function<void()> const& fn)
{
    try {
        fn();
    } catch (Error const& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::io;
}

// Net position per (wallet, currency) taken from the changes list.
std::map<std::pair<WalletId, Currency>, Amount> change_map(LedgerSnapshot const& a, LedgerSnapshot const& b)
{
    std::map<std::pair<WalletId, Currency>, Amount> m;
    for (auto const& [k, v] : position_changes(a, b))
        m[k] = v;
    return m;
}

}  // namespace

TEST_CASE("hop kinds round-trip through their names")
{
    for (auto k : {HopKind::link_increase, HopKind::link_decrease, HopKind::offer_consume, HopKind::xrp_transfer})
        CHECK(parse_hop_kind(to_string(k)) == k);
    CHECK(kind_of([] { parse_hop_kind("teleport"); }) == ErrorKind::parse);
}

TEST_CASE("rippling between two links of one wallet")
{
    auto parts = fixture::example_parts();
    auto const s = LedgerSnapshot::make(parts);
    auto const& bob = s.links()[*s.find_link(WalletId("Bitstamp"), WalletId("Bob"), Currency("USD"))];
    auto const& charles = s.links()[*s.find_link(WalletId("Bitstamp"), WalletId("Charles"), Currency("USD"))];
    auto const& daisy_eur = s.links()[*s.find_link(WalletId("GateHub"), WalletId("Daisy"), Currency("EUR"))];
    auto const& daisy_usd = s.links()[*s.find_link(WalletId("Bitstamp"), WalletId("Daisy"), Currency("USD"))];

    CHECK(rippling_allowed(s, WalletId("Bitstamp"), bob, charles));
    CHECK_FALSE(rippling_allowed(s, WalletId("Daisy"), daisy_usd, daisy_eur));
    CHECK(kind_of([&] { rippling_allowed(s, WalletId("Bob"), bob, charles); }) == ErrorKind::not_incident);

    // Bitstamp without default_ripple and its own side flag set on one link.
    for (auto& w : parts.wallets) {
        if (w.id.str() == "Bitstamp")
            w.default_ripple = false;
    }
    for (auto& l : parts.links) {
        if (l.creditor.str() == "Charles" && l.debtor.str() == "Bitstamp")
            l.no_ripple_debtor = true;
    }
    auto const blocked = LedgerSnapshot::make(parts);
    auto const& bob2 = blocked.links()[*blocked.find_link(WalletId("Bitstamp"), WalletId("Bob"), Currency("USD"))];
    auto const& charles2 =
        blocked.links()[*blocked.find_link(WalletId("Bitstamp"), WalletId("Charles"), Currency("USD"))];
    CHECK_FALSE(rippling_allowed(blocked, WalletId("Bitstamp"), bob2, charles2));
    // The counterparty's flag is not Bitstamp's concern.
    CHECK(rippling_allowed(blocked, WalletId("Charles"), charles2,
                           blocked.links()[*blocked.find_link(WalletId("GateHub"), WalletId("Charles"),
                                                              Currency("USD"))]));
}

TEST_CASE("Alice pays Edward 1 USD through Bitstamp, Charles and GateHub")
{
    auto const s = fixture::example_network();
    auto const paths = find_paths(s, intent("Alice", "Edward", "1", "USD"));
    REQUIRE_FALSE(paths.empty());
    CHECK(route(paths.front().hops) ==
          std::vector<std::string>{"Alice", "Bitstamp", "Charles", "GateHub", "Edward"});
    CHECK(paths.front().transfers == 4);
    CHECK(paths.front().hops[0].kind == HopKind::link_decrease);
    CHECK(paths.front().hops[1].kind == HopKind::link_increase);
    CHECK(paths.front().hops[2].kind == HopKind::link_decrease);
    CHECK(paths.front().hops[3].kind == HopKind::link_increase);

    auto const [after, tx] = execute_transaction(s, intent("Alice", "Edward", "1", "USD"));
    CHECK(balance(after, "Bitstamp", "Alice", "USD") == amt("0"));
    CHECK(balance(after, "Bitstamp", "Charles", "USD") == amt("101"));
    CHECK(balance(after, "GateHub", "Charles", "USD") == amt("49"));
    CHECK(balance(after, "GateHub", "Edward", "USD") == amt("6"));
    CHECK(tx.amount == amt("1"));
    CHECK(tx.source_amount == amt("1"));
    CHECK(tx.intermediaries == 3);
    CHECK(tx.offers_used == 0);
    CHECK_FALSE(tx.circular);
    CHECK_FALSE(tx.cross_currency);
    CHECK(tx.id.size() == 64);
    // Input untouched.
    CHECK(balance(s, "Bitstamp", "Alice", "USD") == amt("1"));
}

TEST_CASE("Bob pays Edward 40 USD and Bitstamp ripples")
{
    auto const s = fixture::example_network();
    auto const [after, tx] = execute_transaction(s, intent("Bob", "Edward", "40", "USD"));
    CHECK(balance(after, "Bitstamp", "Bob", "USD") == amt("860"));
    CHECK(balance(after, "Bitstamp", "Charles", "USD") == amt("140"));
    CHECK(balance(after, "GateHub", "Charles", "USD") == amt("10"));
    CHECK(balance(after, "GateHub", "Edward", "USD") == amt("45"));
    auto changes = change_map(s, after);
    CHECK(changes.count({WalletId("Bitstamp"), Currency("USD")}) == 0);
    CHECK(changes.count({WalletId("Charles"), Currency("USD")}) == 0);
    CHECK(changes[{WalletId("Bob"), Currency("USD")}] == amt("-40"));
    CHECK(changes[{WalletId("Edward"), Currency("USD")}] == amt("40"));
}

TEST_CASE("Bob pays Fanny 100 EUR with USD through Daisy's offer")
{
    auto const s = fixture::example_network();
    auto i = intent("Bob", "Fanny", "100", "EUR");
    i.max_source = SourceCap{amt("120"), Currency("USD")};
    auto const [after, tx] = execute_transaction(s, i);
    CHECK(balance(after, "Bitstamp", "Bob", "USD") == amt("780"));
    CHECK(balance(after, "Bitstamp", "Daisy", "USD") == amt("120"));
    CHECK(balance(after, "GateHub", "Daisy", "EUR") == amt("200"));
    CHECK(balance(after, "GateHub", "Fanny", "EUR") == amt("100"));
    CHECK(tx.source_amount == amt("120"));
    CHECK(tx.offers_used == 1);
    CHECK(tx.cross_currency);
    // Offer fully consumed; Daisy no longer makes a market.
    CHECK(after.offers().empty());
    CHECK(after.wallet(WalletId("Daisy")).role == Role::user);

    auto changes = change_map(s, after);
    CHECK(changes[{WalletId("Daisy"), Currency("USD")}] == amt("120"));
    CHECK(changes[{WalletId("Daisy"), Currency("EUR")}] == amt("-100"));

    i.max_source = SourceCap{amt("110"), Currency("USD")};
    CHECK(kind_of([&] { execute_transaction(s, i); }) == ErrorKind::source_cap_exceeded);
}

TEST_CASE("partial fill of an offer rounds in the maker's favour")
{
    auto const s = fixture::example_network();
    auto i = intent("Bob", "Fanny", "10.000001", "EUR");
    i.max_source = SourceCap{amt("1000"), Currency("USD")};
    auto const [after, tx] = execute_transaction(s, i);
    // 10.000001 * 1.2 = 12.0000012, rounded up to the micro.
    CHECK(tx.source_amount == amt("12.000002"));
    REQUIRE(after.offers().size() == 1);
    CHECK(after.offers()[0].gives_amount == amt("89.999999"));
    CHECK(after.offers()[0].takes_amount == amt("107.999998"));
}

TEST_CASE("blocked intermediary yields NoPath")
{
    auto parts = fixture::example_parts();
    for (auto& l : parts.links) {
        if (l.debtor.str() == "GateHub" && l.creditor.str() == "Charles")
            l.no_ripple_creditor = true;
    }
    auto const s = LedgerSnapshot::make(parts);
    CHECK(kind_of([&] { find_paths(s, intent("Alice", "Edward", "1", "USD")); }) == ErrorKind::no_path);
    CHECK(kind_of([&] { execute_transaction(s, intent("Alice", "Edward", "1", "USD")); }) == ErrorKind::no_path);
}

TEST_CASE("sender without residual capacity has no path")
{
    auto parts = fixture::example_parts();
    parts.wallets.push_back(fixture::wallet("Gus"));
    // Gus owes Bitstamp nothing more (limit reached) and holds nothing.
    parts.links.push_back(fixture::link("Gus", "Bitstamp", "USD", "10", "10"));
    auto const s = LedgerSnapshot::make(parts);
    CHECK(kind_of([&] { find_paths(s, intent("Gus", "Edward", "1", "USD")); }) == ErrorKind::no_path);
}

TEST_CASE("amount above total path capacity is NoPath, nothing applied")
{
    auto const s = fixture::example_network();
    CHECK(kind_of([&] { execute_transaction(s, intent("Alice", "Edward", "2", "USD")); }) == ErrorKind::no_path);
    CHECK(kind_of([&] { execute_transaction(s, intent("Alice", "Edward", "0", "USD")); }) ==
          ErrorKind::invalid_amount);
    CHECK(kind_of([&] { execute_transaction(s, intent("Alice", "Nobody", "1", "USD")); }) ==
          ErrorKind::unknown_wallet);
}

TEST_CASE("multi-path fill takes paths in order")
{
    // s -> a -> t and s -> b -> t, each carrying 3.
    LedgerSnapshot::Parts p;
    for (auto const* n : {"a", "b", "s", "t"})
        p.wallets.push_back(fixture::wallet(n, "0", true));
    p.links = {fixture::link("s", "a", "USD", "0", "3"), fixture::link("a", "t", "USD", "0", "3"),
               fixture::link("s", "b", "USD", "0", "3"), fixture::link("b", "t", "USD", "0", "3")};
    auto const s = LedgerSnapshot::make(p);
    auto const paths = find_paths(s, intent("s", "t", "5", "USD"));
    REQUIRE(paths.size() == 2);
    CHECK(route(paths[0].hops) == std::vector<std::string>{"s", "a", "t"});
    CHECK(route(paths[1].hops) == std::vector<std::string>{"s", "b", "t"});
    CHECK(paths[0].capacity == amt("3"));

    auto const [after, tx] = execute_transaction(s, intent("s", "t", "5", "USD"));
    CHECK(balance(after, "s", "a", "USD") == amt("3"));
    CHECK(balance(after, "s", "b", "USD") == amt("2"));
    CHECK(tx.hops.size() == 4);
    CHECK(tx.hops[2].path == 1);
}

TEST_CASE("paying back along the same route restores balances")
{
    auto const s = fixture::example_network();
    auto const forward = execute_transaction(s, intent("Bob", "Edward", "40", "USD"));
    auto const back = execute_transaction(forward.snapshot, intent("Edward", "Bob", "40", "USD"));
    CHECK(back.snapshot.links() == s.links());
}

TEST_CASE("path enumeration agrees with exhaustive search on small graphs")
{
    Rng rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        int const n = 3 + static_cast<int>(rng.below(4));
        LedgerSnapshot::Parts p;
        std::vector<std::string> names;
        for (int v = 0; v < n; ++v) {
            names.push_back("w" + std::to_string(v));
            p.wallets.push_back(fixture::wallet(names.back(), "0", true));
        }
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                if (!rng.chance(0.6))
                    continue;
                bool const flip = rng.chance(0.5);
                auto const balance = std::to_string(rng.below(3));
                auto const limit = rng.chance(0.3) ? std::string("inf") : std::to_string(2 + rng.below(2));
                p.links.push_back(fixture::link(names[flip ? b : a], names[flip ? a : b], "USD", balance, limit));
            }
        }
        auto const s = LedgerSnapshot::make(p);

        // Oracle: depth-first over simple paths, each hop with residual room.
        std::map<std::pair<std::string, std::string>, bool> usable;
        for (auto const& l : p.links) {
            bool const room = !l.limit.is_bounded() || l.balance < l.limit.bound();
            usable[{l.debtor.str(), l.creditor.str()}] = room;
            usable[{l.creditor.str(), l.debtor.str()}] = l.balance.is_positive();
        }
        int const max_hops = 1 + static_cast<int>(rng.below(4));
        std::vector<std::vector<std::string>> expected;
        std::vector<std::string> stack{"w0"};
        std::function<void()> dfs = [&] {
            if (stack.back() == names[static_cast<std::size_t>(n - 1)]) {
                expected.push_back(stack);
                return;
            }
            if (static_cast<int>(stack.size()) - 1 == max_hops)
                return;
            for (auto const& next : names) {
                auto it = usable.find({stack.back(), next});
                if (it == usable.end() || !it->second)
                    continue;
                if (std::find(stack.begin(), stack.end(), next) != stack.end())
                    continue;
                stack.push_back(next);
                dfs();
                stack.pop_back();
            }
        };
        dfs();
        std::sort(expected.begin(), expected.end(), [](auto const& a, auto const& b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        });

        auto i = intent("w0", names.back(), "1", "USD");
        i.max_hops = max_hops;
        PathSearchOptions unlimited;
        unlimited.max_candidates = 100000;
        if (expected.empty()) {
            CHECK(kind_of([&] { find_paths(s, i, unlimited); }) == ErrorKind::no_path);
            continue;
        }
        // The search stops after the shortest layer that fills max_candidates,
        // so with an unlimited budget it reports every route.
        auto const got = find_paths(s, i, unlimited);
        std::vector<std::vector<std::string>> routes;
        for (auto const& c : got)
            routes.push_back(route(c.hops));
        CHECK(routes == expected);
    }
}

TEST_CASE("circular XRP payment buys credit through an offer")
{
    LedgerSnapshot::Parts p;
    p.wallets = {fixture::wallet("PayRoutes", "0", true), fixture::wallet("maker", "0"),
                 fixture::wallet("victim", "100")};
    p.links = {fixture::link("PayRoutes", "victim", "USD", "0", "1000"),
               fixture::link("PayRoutes", "maker", "USD", "500", "1000")};
    ExchangeOffer o;
    o.id = "o1";
    o.owner = WalletId("maker");
    o.takes_currency = Currency::xrp();
    o.takes_amount = amt("1000");
    o.gives_currency = Currency("USD");
    o.gives_amount = amt("730");
    p.offers.push_back(o);
    p.gateway_registry = {WalletId("PayRoutes")};
    auto const s = LedgerSnapshot::make(p);

    auto const [after, tx] = execute_circular_xrp(s, WalletId("victim"), amt("10"), Currency("USD"),
                                                  WalletId("PayRoutes"));
    CHECK(balance(after, "PayRoutes", "victim", "USD") == amt("7.3"));
    CHECK(after.wallet(WalletId("victim")).xrp == amt("90"));
    CHECK(after.wallet(WalletId("maker")).xrp == amt("10"));
    CHECK(tx.circular);
    CHECK(tx.cross_currency);
    CHECK(tx.involves_xrp());
    CHECK(tx.source_amount == amt("10"));
    CHECK(tx.amount == amt("7.3"));

    CHECK(kind_of([&] {
              execute_circular_xrp(s, WalletId("victim"), amt("0"), Currency("USD"), WalletId("PayRoutes"));
          }) == ErrorKind::invalid_amount);
    CHECK(kind_of([&] {
              execute_circular_xrp(s, WalletId("victim"), amt("101"), Currency("USD"), WalletId("PayRoutes"));
          }) == ErrorKind::insufficient_xrp);
    CHECK(kind_of([&] {
              execute_circular_xrp(s, WalletId("victim"), amt("10"), Currency("EUR"), WalletId("PayRoutes"));
          }) == ErrorKind::no_path);
}

TEST_CASE("two stacked offers convert XRP to EUR to USD")
{
    LedgerSnapshot::Parts p;
    p.wallets = {fixture::wallet("GW", "0", true), fixture::wallet("PayRoutes", "0", true),
                 fixture::wallet("m1", "0"), fixture::wallet("m2", "0"), fixture::wallet("w", "100")};
    p.links = {fixture::link("GW", "m1", "EUR", "50", "inf"), fixture::link("GW", "m2", "EUR", "0", "inf"),
               fixture::link("PayRoutes", "m2", "USD", "100", "inf"),
               fixture::link("PayRoutes", "w", "USD", "0", "inf")};
    ExchangeOffer a;
    a.id = "a";
    a.owner = WalletId("m1");
    a.takes_currency = Currency::xrp();
    a.takes_amount = amt("100");
    a.gives_currency = Currency("EUR");
    a.gives_amount = amt("50");
    ExchangeOffer b;
    b.id = "b";
    b.owner = WalletId("m2");
    b.takes_currency = Currency("EUR");
    b.takes_amount = amt("40");
    b.gives_currency = Currency("USD");
    b.gives_amount = amt("80");
    p.offers = {a, b};
    auto const s = LedgerSnapshot::make(p);

    auto const [after, tx] = execute_circular_xrp(s, WalletId("w"), amt("10"), Currency("USD"),
                                                  WalletId("PayRoutes"));
    // 10 XRP * 0.5 EUR/XRP * 2 USD/EUR
    CHECK(tx.amount == amt("10"));
    CHECK(tx.offers_used == 2);
    CHECK(balance(after, "PayRoutes", "w", "USD") == amt("10"));
    CHECK(balance(after, "GW", "m1", "EUR") == amt("45"));
    CHECK(balance(after, "GW", "m2", "EUR") == amt("5"));
    CHECK(after.wallet(WalletId("w")).xrp == amt("90"));
}

TEST_CASE("direct XRP payment is rejected, XRP delivered through an offer is fine")
{
    LedgerSnapshot::Parts p;
    p.wallets = {fixture::wallet("GW", "0", true), fixture::wallet("a", "10"), fixture::wallet("b", "0"),
                 fixture::wallet("mm", "500")};
    p.links = {fixture::link("GW", "a", "USD", "20", "inf"), fixture::link("GW", "mm", "USD", "0", "inf")};
    ExchangeOffer o;
    o.id = "x";
    o.owner = WalletId("mm");
    o.takes_currency = Currency("USD");
    o.takes_amount = amt("10");
    o.gives_currency = Currency::xrp();
    o.gives_amount = amt("200");
    p.offers = {o};
    auto const s = LedgerSnapshot::make(p);

    CHECK(kind_of([&] { execute_transaction(s, intent("a", "b", "1", "XRP")); }) == ErrorKind::no_path);

    auto i = intent("a", "b", "100", "XRP");
    i.max_source = SourceCap{amt("20"), Currency("USD")};
    auto const [after, tx] = execute_transaction(s, i);
    CHECK(tx.source_amount == amt("5"));
    CHECK(after.wallet(WalletId("b")).xrp == amt("100"));
    CHECK(after.wallet(WalletId("mm")).xrp == amt("400"));
    CHECK(balance(after, "GW", "a", "USD") == amt("15"));
    CHECK(balance(after, "GW", "mm", "USD") == amt("5"));
}

TEST_CASE("random payments on synthetic networks conserve intermediaries")
{
    SynthConfig cfg;
    cfg.n_gateways = 3;
    cfg.users_per_gateway = 6;
    cfg.inter_gateway_links = 4;
    cfg.currencies = {Currency("USD"), Currency("EUR")};
    cfg.limit_policy = LimitPolicy::multiple_of_balance(amt("3"));
    cfg.ripple_policy = 0.5;
    cfg.market_makers = 2;
    cfg.seed = 11;
    auto s = generate_synthetic(cfg);
    Rng rng(3);
    int executed = 0;
    for (int t = 0; t < 300; ++t) {
        auto const& a = s.wallets()[rng.below(s.wallet_count())];
        auto const& b = s.wallets()[rng.below(s.wallet_count())];
        if (a.id == b.id)
            continue;
        auto i = intent(a.id.str(), b.id.str(), std::to_string(1 + rng.below(20)), rng.chance(0.5) ? "USD" : "EUR");
        try {
            auto const result = execute_transaction(s, i);
            std::set<WalletId> makers;
            for (auto const& h : result.transaction.hops) {
                if (h.kind == HopKind::offer_consume)
                    makers.insert(h.from);
            }
            for (auto const& [key, delta] : position_changes(s, result.snapshot)) {
                if (key.first == a.id || key.first == b.id || makers.count(key.first))
                    continue;
                CHECK(delta.is_zero());
            }
            for (auto const& l : result.snapshot.links()) {
                CHECK_FALSE(l.balance.is_negative());
                if (l.limit.is_bounded())
                    CHECK(l.balance <= l.limit.bound());
            }
            s = result.snapshot;
            ++executed;
        } catch (Error const& e) {
            CHECK((e.kind() == ErrorKind::no_path || e.kind() == ErrorKind::source_cap_exceeded));
        }
    }
    CHECK(executed > 50);
}

TEST_CASE("transaction ids depend on content only")
{
    auto const s = fixture::example_network();
    auto const a = execute_transaction(s, intent("Alice", "Edward", "1", "USD"));
    auto const b = execute_transaction(s, intent("Alice", "Edward", "1", "USD"));
    CHECK(a.transaction.id == b.transaction.id);
    auto const c = execute_transaction(s, intent("Alice", "Edward", "0.5", "USD"));
    CHECK(a.transaction.id != c.transaction.id);
    auto const d = execute_transaction(s, intent("Alice", "Edward", "1", "USD"), parse_timestamp("2016-01-01"));
    CHECK(a.transaction.id != d.transaction.id);
}
