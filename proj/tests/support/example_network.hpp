#pragma once

// The six-user, two-gateway example network with one market maker (Daisy).

#include "creditnet/snapshot.hpp"

#include <string>

namespace fixture {

using namespace creditnet;

inline Amount amt(std::string const& text) { return Amount::parse(text); }

inline CreditLink link(std::string const& debtor, std::string const& creditor, std::string const& currency,
                       std::string const& balance, std::string const& limit)
{
    CreditLink l;
    l.debtor = WalletId(debtor);
    l.creditor = WalletId(creditor);
    l.currency = Currency(currency);
    l.balance = amt(balance);
    l.limit = Limit::parse(limit);
    return l;
}

inline Wallet wallet(std::string const& id, std::string const& xrp = "0", bool default_ripple = false)
{
    Wallet w;
    w.id = WalletId(id);
    w.xrp = amt(xrp);
    w.default_ripple = default_ripple;
    return w;
}

inline LedgerSnapshot::Parts example_parts()
{
    LedgerSnapshot::Parts p;
    p.timestamp = parse_timestamp("2015-03-01T00:00:00Z");
    for (auto const* name : {"Alice", "Bob", "Charles", "Daisy", "Edward", "Fanny"})
        p.wallets.push_back(wallet(name, "50"));
    p.wallets.push_back(wallet("Bitstamp", "1000", true));
    p.wallets.push_back(wallet("GateHub", "1000", true));
    p.links = {
        link("Bitstamp", "Alice", "USD", "1", "inf"),
        link("Bitstamp", "Bob", "USD", "900", "1000"),
        link("Bitstamp", "Charles", "USD", "100", "200"),
        link("GateHub", "Charles", "USD", "50", "100"),
        link("GateHub", "Edward", "USD", "5", "100"),
        link("Bitstamp", "Daisy", "USD", "0", "500"),
        link("GateHub", "Daisy", "EUR", "300", "1000"),
        link("GateHub", "Fanny", "EUR", "0", "500"),
    };
    ExchangeOffer offer;
    offer.id = "daisy-usd-eur";
    offer.owner = WalletId("Daisy");
    offer.gives_currency = Currency("EUR");
    offer.gives_amount = amt("100");
    offer.takes_currency = Currency("USD");
    offer.takes_amount = amt("120");
    offer.created_at = parse_timestamp("2015-02-01T00:00:00Z");
    p.offers.push_back(offer);
    p.gateway_registry = {WalletId("Bitstamp"), WalletId("GateHub")};
    return p;
}

inline LedgerSnapshot example_network() { return LedgerSnapshot::make(example_parts()); }

inline Amount balance(LedgerSnapshot const& s, std::string const& debtor, std::string const& creditor,
                      std::string const& currency)
{
    auto i = s.find_link(WalletId(debtor), WalletId(creditor), Currency(currency));
    if (!i)
        throw std::runtime_error("no link " + debtor + "->" + creditor);
    return s.links()[*i].balance;
}

}  // namespace fixture
