#include "creditnet/snapshot_io.hpp"

#include "jsonl.hpp"

#include <fstream>
#include <sstream>

namespace creditnet {

using jsonl::json;
using jsonl::ordered_json;

namespace {

std::ifstream open_input(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::io, "cannot open " + path.string());
    return in;
}

}  // namespace

LedgerSnapshot read_snapshot(std::istream& in, std::span<WalletId const> gateways)
{
    LedgerSnapshot::Parts parts;
    parts.gateway_registry.assign(gateways.begin(), gateways.end());

    jsonl::for_each_record(in, [&](json const& record, std::size_t line) {
        std::string const kind = jsonl::require_string(record, "kind", line);
        try {
            if (kind == "wallet") {
                Wallet w;
                w.id = WalletId(jsonl::require_string(record, "id", line));
                w.xrp = jsonl::optional_amount(record, "xrp", line, Amount{});
                w.default_ripple = jsonl::optional_bool(record, "default_ripple", line).value_or(false);
                if (auto it = record.find("tx_count"); it != record.end() && it->is_number_unsigned())
                    w.tx_count = it->get<std::uint64_t>();
                if (jsonl::optional_bool(record, "gateway", line).value_or(false))
                    parts.gateway_registry.push_back(w.id);
                parts.wallets.push_back(std::move(w));
            } else if (kind == "link") {
                CreditLink l;
                l.debtor = WalletId(jsonl::require_string(record, "debtor", line));
                l.creditor = WalletId(jsonl::require_string(record, "creditor", line));
                l.currency = Currency(jsonl::require_string(record, "currency", line));
                l.balance = jsonl::require_amount(record, "balance", line);
                auto const& limit = jsonl::require(record, "limit", line);
                l.limit = limit.is_string() ? Limit::parse(limit.get<std::string>())
                                            : Limit(jsonl::to_amount(limit, line, "limit"));
                l.no_ripple_debtor = jsonl::optional_bool(record, "nr_debtor", line);
                l.no_ripple_creditor = jsonl::optional_bool(record, "nr_creditor", line);
                parts.links.push_back(std::move(l));
            } else if (kind == "offer") {
                parts.offers.push_back(jsonl::offer_from_json(record, line));
            } else if (kind == "meta") {
                parts.timestamp = jsonl::require_timestamp(record, "timestamp", line);
            } else {
                throw ParseError(line, "unknown record kind '" + kind + "'");
            }
        } catch (ParseError const&) {
            throw;
        } catch (Error const& e) {
            throw ParseError(line, e.what());
        }
    });
    return LedgerSnapshot::make(std::move(parts));
}

LedgerSnapshot load_snapshot(std::filesystem::path const& path, std::span<WalletId const> gateways)
{
    auto in = open_input(path);
    return read_snapshot(in, gateways);
}

void write_snapshot(std::ostream& out, LedgerSnapshot const& snapshot)
{
    ordered_json meta;
    meta["kind"] = "meta";
    meta["timestamp"] = format_timestamp(snapshot.timestamp());
    out << meta.dump() << '\n';

    for (auto const& w : snapshot.wallets()) {
        ordered_json r;
        r["kind"] = "wallet";
        r["id"] = w.id.str();
        r["xrp"] = w.xrp.to_string();
        r["default_ripple"] = w.default_ripple;
        if (snapshot.is_gateway(w.id))
            r["gateway"] = true;
        if (w.tx_count > 0)
            r["tx_count"] = w.tx_count;
        out << r.dump() << '\n';
    }
    for (auto const& l : snapshot.links()) {
        ordered_json r;
        r["kind"] = "link";
        r["debtor"] = l.debtor.str();
        r["creditor"] = l.creditor.str();
        r["currency"] = l.currency.str();
        r["balance"] = l.balance.to_string();
        r["limit"] = l.limit.to_string();
        if (l.no_ripple_debtor)
            r["nr_debtor"] = *l.no_ripple_debtor;
        if (l.no_ripple_creditor)
            r["nr_creditor"] = *l.no_ripple_creditor;
        out << r.dump() << '\n';
    }
    for (auto const& o : snapshot.offers())
        out << jsonl::offer_to_json(o).dump() << '\n';
}

void save_snapshot(std::filesystem::path const& path, LedgerSnapshot const& snapshot)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::io, "cannot write " + path.string());
    write_snapshot(out, snapshot);
}

std::vector<WalletId> read_gateway_registry(std::istream& in)
{
    std::vector<WalletId> ids;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        auto const first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        auto const last = line.find_last_not_of(" \t\r");
        try {
            ids.emplace_back(line.substr(first, last - first + 1));
        } catch (Error const& e) {
            throw ParseError(number, e.what());
        }
    }
    return ids;
}

std::vector<WalletId> load_gateway_registry(std::filesystem::path const& path)
{
    auto in = open_input(path);
    return read_gateway_registry(in);
}

}  // namespace creditnet
