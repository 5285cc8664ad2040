#include "creditnet/error.hpp"
#include "creditnet/graph.hpp"
#include "creditnet/ledger.hpp"
#include "creditnet/snapshot_io.hpp"
#include "creditnet/synth.hpp"

#include "doctest.h"
#include "example_network.hpp"

#include <sstream>

using namespace creditnet;
using fixture::amt;

namespace {

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

LedgerSnapshot read(std::string const& text)
{
    std::istringstream in(text);
    return read_snapshot(in);
}

std::string dump(LedgerSnapshot const& s)
{
    std::ostringstream out;
    write_snapshot(out, s);
    return out.str();
}

SynthConfig small_config()
{
    SynthConfig cfg;
    cfg.n_gateways = 2;
    cfg.users_per_gateway = 3;
    cfg.inter_gateway_links = 1;
    cfg.seed = 42;
    return cfg;
}

}  // namespace

TEST_CASE("minimal snapshot file")
{
    auto const s = read(R"({"kind":"wallet","id":"a","xrp":"10","default_ripple":false}
{"kind":"wallet","id":"b","xrp":0,"default_ripple":true}

{"kind":"link","debtor":"a","creditor":"b","currency":"USD","balance":"5","limit":"inf","extra":1}
)");
    CHECK(s.wallet_count() == 2);
    CHECK(s.link_count() == 1);
    CHECK_FALSE(s.links()[0].limit.is_bounded());
    CHECK(s.wallet(WalletId("b")).default_ripple);
    CHECK_FALSE(s.links()[0].no_ripple_debtor.has_value());
}

TEST_CASE("snapshot file errors")
{
    auto const bad_limit = R"({"kind":"wallet","id":"a","xrp":"0","default_ripple":false}
{"kind":"wallet","id":"b","xrp":"0","default_ripple":false}
{"kind":"link","debtor":"a","creditor":"b","currency":"USD","balance":"5","limit":"3"})";
    CHECK(kind_of([&] { read(bad_limit); }) == ErrorKind::invariant_violation);

    auto const dangling = R"({"kind":"wallet","id":"a","xrp":"0","default_ripple":false}
{"kind":"link","debtor":"a","creditor":"z","currency":"USD","balance":"0","limit":"3"})";
    CHECK(kind_of([&] { read(dangling); }) == ErrorKind::invariant_violation);

    auto const duplicate = R"({"kind":"wallet","id":"a","xrp":"0","default_ripple":false}
{"kind":"wallet","id":"b","xrp":"0","default_ripple":false}
{"kind":"link","debtor":"a","creditor":"b","currency":"USD","balance":"0","limit":"3"}
{"kind":"link","debtor":"a","creditor":"b","currency":"USD","balance":"1","limit":"3"})";
    CHECK(kind_of([&] { read(duplicate); }) == ErrorKind::invariant_violation);

    auto const xrp_link = R"({"kind":"wallet","id":"a","xrp":"0","default_ripple":false}
{"kind":"wallet","id":"b","xrp":"0","default_ripple":false}
{"kind":"link","debtor":"a","creditor":"b","currency":"XRP","balance":"0","limit":"3"})";
    CHECK(kind_of([&] { read(xrp_link); }) == ErrorKind::invariant_violation);

    auto const self_link = R"({"kind":"wallet","id":"a","xrp":"0","default_ripple":false}
{"kind":"link","debtor":"a","creditor":"a","currency":"USD","balance":"0","limit":"3"})";
    CHECK(kind_of([&] { read(self_link); }) == ErrorKind::invariant_violation);

    try {
        read("{\"kind\":\"wallet\",\"id\":\"a\",\"xrp\":\"0\"}\nnot json\n");
        FAIL("expected ParseError");
    } catch (ParseError const& e) {
        CHECK(e.line() == 2);
    }
    try {
        read("{\"kind\":\"wallet\",\"id\":\"a\",\"xrp\":\"0\"}\n{\"kind\":\"gizmo\"}\n");
        FAIL("expected ParseError");
    } catch (ParseError const& e) {
        CHECK(e.line() == 2);
    }
    try {
        read("{\"kind\":\"wallet\",\"id\":\"a\",\"xrp\":\"-1\"}\n");
        FAIL("expected an error");
    } catch (Error const& e) {
        CHECK((e.kind() == ErrorKind::invariant_violation || e.kind() == ErrorKind::parse));
    }
}

TEST_CASE("save then load gives an equal snapshot")
{
    auto cfg = small_config();
    cfg.currencies = {Currency("USD"), Currency("EUR")};
    cfg.market_makers = 2;
    cfg.limit_policy = LimitPolicy::multiple_of_balance(amt("2"));
    cfg.ripple_policy = 0.5;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.seed = seed;
        auto const s = generate_synthetic(cfg);
        auto const back = read(dump(s));
        CHECK(back == s);
        CHECK(dump(back) == dump(s));
    }
    auto const f = fixture::example_network();
    CHECK(read(dump(f)) == f);
}

TEST_CASE("roles")
{
    auto const s = fixture::example_network();
    CHECK(s.wallet(WalletId("Bitstamp")).role == Role::gateway);
    CHECK(s.wallet(WalletId("Daisy")).role == Role::market_maker);
    CHECK(s.wallet(WalletId("Alice")).role == Role::user);
    CHECK(s.is_gateway(WalletId("GateHub")));
    CHECK_FALSE(s.is_gateway(WalletId("Alice")));
    CHECK(to_string(Role::market_maker) == "market_maker");

    auto parts = fixture::example_parts();
    parts.gateway_registry.push_back(WalletId("Nobody"));
    CHECK(LedgerSnapshot::make(parts).gateway_registry().size() == 2);
}

TEST_CASE("gateway registry file")
{
    std::istringstream in("# gateways\nBitstamp\n\n  GateHub  # trailing\n");
    auto const ids = read_gateway_registry(in);
    REQUIRE(ids.size() == 2);
    CHECK(ids[1].str() == "GateHub");
}

TEST_CASE("flag normalization")
{
    LedgerSnapshot::Parts p;
    p.wallets = {fixture::wallet("a"), fixture::wallet("b"), fixture::wallet("g", "0", true)};
    auto l1 = fixture::link("a", "b", "USD", "0", "1");
    auto l2 = fixture::link("g", "a", "USD", "0", "1");
    l2.no_ripple_debtor = true;  // g's side, overridden by default_ripple
    l2.no_ripple_creditor = true;
    auto l3 = fixture::link("b", "g", "USD", "0", "1");
    l3.no_ripple_debtor = false;
    p.links = {l1, l2, l3};
    auto const s = LedgerSnapshot::make(p);
    auto const n = normalize_flags(s);
    auto const& ab = n.links()[*n.find_link(WalletId("a"), WalletId("b"), Currency("USD"))];
    CHECK(ab.no_ripple_debtor == false);
    CHECK(ab.no_ripple_creditor == false);
    auto const& ga = n.links()[*n.find_link(WalletId("g"), WalletId("a"), Currency("USD"))];
    CHECK(ga.no_ripple_debtor == false);
    CHECK(ga.no_ripple_creditor == true);
    auto const& bg = n.links()[*n.find_link(WalletId("b"), WalletId("g"), Currency("USD"))];
    CHECK(bg.no_ripple_debtor == false);
    CHECK(bg.no_ripple_creditor == false);
    CHECK(normalize_flags(n) == n);
}

TEST_CASE("largest connected component")
{
    auto chain = [](std::vector<std::string> const& names, LedgerSnapshot::Parts& p) {
        for (auto const& n : names)
            p.wallets.push_back(fixture::wallet(n));
        for (std::size_t i = 1; i < names.size(); ++i)
            p.links.push_back(fixture::link(names[i - 1], names[i], "USD", "0", "1"));
    };
    {
        LedgerSnapshot::Parts p;
        chain({"a", "b", "c"}, p);
        auto const s = LedgerSnapshot::make(p);
        CHECK(largest_connected_component(s) == s);
    }
    {
        LedgerSnapshot::Parts p;
        chain({"a", "b"}, p);
        chain({"c", "d", "e", "f", "g"}, p);
        ExchangeOffer o;
        o.id = "o";
        o.owner = WalletId("a");
        o.gives_currency = Currency("EUR");
        o.takes_currency = Currency("USD");
        o.gives_amount = amt("1");
        o.takes_amount = amt("1");
        p.offers.push_back(o);
        auto const lcc = largest_connected_component(LedgerSnapshot::make(p));
        CHECK(lcc.wallet_count() == 5);
        CHECK(lcc.offers().empty());
        CHECK(lcc.link_count() == 4);
        CHECK(largest_connected_component(lcc) == lcc);
    }
    {
        LedgerSnapshot::Parts p;
        chain({"x", "y", "z"}, p);
        chain({"m", "b", "q"}, p);
        auto const lcc = largest_connected_component(LedgerSnapshot::make(p));
        CHECK(lcc.find_wallet(WalletId("b")).has_value());
        CHECK(lcc.wallet_count() == 3);
    }
    CHECK(kind_of([] { largest_connected_component(LedgerSnapshot::make({})); }) == ErrorKind::empty_snapshot);
}

TEST_CASE("synthetic generator")
{
    auto const s = generate_synthetic(small_config());
    CHECK(s.wallet_count() == 8);
    CHECK(s.link_count() == 7);
    CHECK(dump(s) == dump(generate_synthetic(small_config())));
    auto other = small_config();
    other.seed = 43;
    CHECK(dump(generate_synthetic(other)) != dump(s));

    auto closed = small_config();
    closed.ripple_policy = 0.0;
    auto const c = generate_synthetic(closed);
    for (auto const& l : c.links()) {
        if (!c.is_gateway(l.creditor))
            CHECK(l.no_ripple_creditor == true);
        if (!c.is_gateway(l.debtor))
            CHECK(l.no_ripple_debtor == true);
    }

    auto bad = small_config();
    bad.n_gateways = 0;
    CHECK(kind_of([&] { generate_synthetic(bad); }) == ErrorKind::config);
    bad = small_config();
    bad.inter_gateway_links = 3;  // one pair, one currency, two directions
    CHECK(kind_of([&] { generate_synthetic(bad); }) == ErrorKind::config);
}

TEST_CASE("simple graph collapse and components")
{
    auto const s = fixture::example_network();
    SimpleGraph const g(s);
    CHECK(g.vertex_count() == 8);
    CHECK(g.edge_count() == 8);
    auto const comps = connected_components(g);
    CHECK(comps.sizes.size() == 1);

    std::vector<std::pair<Vertex, Vertex>> edges{{0, 1}, {1, 0}, {1, 2}, {3, 4}, {4, 4}};
    auto const h = SimpleGraph::from_edges(6, edges);
    CHECK(h.edge_count() == 3);
    CHECK(h.adjacent(1, 2));
    CHECK_FALSE(h.adjacent(0, 2));
    auto const c = connected_components(h);
    CHECK(c.sizes == std::vector<std::size_t>{3, 2, 1});
    CHECK(c.largest() == 0);
    Mask removed(6, 0);
    removed[1] = 1;
    auto const d = connected_components(h, removed);
    CHECK(d.label[1] == Components::no_component);
    CHECK(d.largest_size() == 2);
    CHECK(d.largest() == 2);  // {3,4} after {0} and {2}
}
