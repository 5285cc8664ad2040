#include "creditnet/txlog.hpp"

#include "jsonl.hpp"

#include <fstream>

namespace creditnet {

using jsonl::json;
using jsonl::ordered_json;

namespace {

int optional_int(json const& record, char const* key, std::size_t line, int fallback)
{
    auto it = record.find(key);
    if (it == record.end() || it->is_null())
        return fallback;
    if (!it->is_number_integer())
        throw ParseError(line, std::string("field '") + key + "' must be an integer");
    return it->get<int>();
}

PathHop hop_from_json(json const& h, std::size_t line)
{
    if (!h.is_object())
        throw ParseError(line, "hop is not an object");
    PathHop hop;
    hop.kind = parse_hop_kind(jsonl::require_string(h, "kind", line));
    hop.from = WalletId(jsonl::require_string(h, "from", line));
    hop.to = WalletId(jsonl::require_string(h, "to", line));
    hop.currency = Currency(jsonl::require_string(h, "currency", line));
    hop.amount = jsonl::require_amount(h, "amount", line);
    hop.path = optional_int(h, "path", line, 0);
    if (hop.kind == HopKind::offer_consume) {
        hop.offer_id = jsonl::require_string(h, "offer_id", line);
        hop.out_currency = Currency(jsonl::require_string(h, "out_currency", line));
        hop.out_amount = jsonl::require_amount(h, "out_amount", line);
    }
    return hop;
}

ordered_json hop_to_json(PathHop const& h)
{
    ordered_json r;
    r["kind"] = std::string(to_string(h.kind));
    r["from"] = h.from.str();
    r["to"] = h.to.str();
    r["currency"] = h.currency.str();
    r["amount"] = h.amount.to_string();
    if (h.kind == HopKind::offer_consume) {
        r["offer_id"] = h.offer_id;
        r["out_currency"] = h.out_currency.str();
        r["out_amount"] = h.out_amount.to_string();
    }
    r["path"] = h.path;
    return r;
}

Transaction tx_from_json(json const& record, std::size_t line)
{
    Transaction tx;
    tx.timestamp = jsonl::require_timestamp(record, "timestamp", line);
    tx.sender = WalletId(jsonl::require_string(record, "sender", line));
    tx.receiver = WalletId(jsonl::require_string(record, "receiver", line));
    tx.amount = jsonl::require_amount(record, "amount", line);
    tx.currency = Currency(jsonl::require_string(record, "currency", line));
    auto const source = record.find("source_currency");
    tx.source_currency = source != record.end() && source->is_string() ? Currency(source->get<std::string>())
                                                                       : tx.currency;
    if (auto it = record.find("hops"); it != record.end() && !it->is_null()) {
        if (!it->is_array())
            throw ParseError(line, "field 'hops' must be an array");
        for (auto const& h : *it)
            tx.hops.push_back(hop_from_json(h, line));
    }
    if (record.contains("source_amount")) {
        tx.source_amount = jsonl::require_amount(record, "source_amount", line);
    } else if (!tx.hops.empty()) {
        // First hop of every path carries what the sender paid.
        int last_path = -1;
        for (auto const& h : tx.hops) {
            if (h.path != last_path)
                tx.source_amount += h.amount;
            last_path = h.path;
        }
    } else if (tx.source_currency == tx.currency) {
        tx.source_amount = tx.amount;
    }
    tx.offers_used = optional_int(record, "offers_used", line, 0);
    tx.intermediaries = optional_int(record, "intermediaries", line, 0);
    finalize_transaction(tx);
    if (auto it = record.find("id"); it != record.end() && it->is_string())
        tx.id = it->get<std::string>();
    return tx;
}

std::ifstream open_input(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::io, "cannot open " + path.string());
    return in;
}

template <typename Fn>
auto at_line(std::size_t line, Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (ParseError const&) {
        throw;
    } catch (Error const& e) {
        throw ParseError(line, e.what());
    }
}

}  // namespace

std::vector<Transaction> read_txlog(std::istream& in)
{
    std::vector<Transaction> log;
    jsonl::for_each_record(in, [&](json const& record, std::size_t line) {
        log.push_back(at_line(line, [&] { return tx_from_json(record, line); }));
    });
    return log;
}

std::vector<Transaction> load_txlog(std::filesystem::path const& path)
{
    auto in = open_input(path);
    return read_txlog(in);
}

void write_txlog(std::ostream& out, std::span<Transaction const> log)
{
    for (auto const& tx : log) {
        ordered_json r;
        r["id"] = tx.id;
        r["timestamp"] = format_timestamp(tx.timestamp);
        r["sender"] = tx.sender.str();
        r["receiver"] = tx.receiver.str();
        r["amount"] = tx.amount.to_string();
        r["currency"] = tx.currency.str();
        r["source_amount"] = tx.source_amount.to_string();
        r["source_currency"] = tx.source_currency.str();
        auto hops = ordered_json::array();
        for (auto const& h : tx.hops)
            hops.push_back(hop_to_json(h));
        r["hops"] = std::move(hops);
        r["offers_used"] = tx.offers_used;
        r["intermediaries"] = tx.intermediaries;
        out << r.dump() << '\n';
    }
}

void save_txlog(std::filesystem::path const& path, std::span<Transaction const> log)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::io, "cannot write " + path.string());
    write_txlog(out, log);
}

std::vector<SettlementRequest> read_requests(std::istream& in)
{
    std::vector<SettlementRequest> requests;
    jsonl::for_each_record(in, [&](json const& record, std::size_t line) {
        at_line(line, [&] {
            SettlementRequest req;
            req.timestamp = jsonl::optional_timestamp(record, "timestamp", line);
            auto const kind = record.value("kind", std::string("payment"));
            if (kind == "circular_xrp") {
                CircularXrpIntent c;
                c.wallet = WalletId(jsonl::require_string(record, "wallet", line));
                c.pay_xrp = jsonl::require_amount(record, "pay_xrp", line);
                c.currency = Currency(jsonl::require_string(record, "currency", line));
                c.issuer = WalletId(jsonl::require_string(record, "issuer", line));
                c.max_hops = optional_int(record, "max_hops", line, 6);
                req.intent = c;
            } else if (kind == "payment") {
                TxIntent i;
                i.sender = WalletId(jsonl::require_string(record, "sender", line));
                i.receiver = WalletId(jsonl::require_string(record, "receiver", line));
                i.deliver_amount = jsonl::require_amount(record, "amount", line);
                i.deliver_currency = Currency(jsonl::require_string(record, "currency", line));
                if (record.contains("max_source")) {
                    auto const cur = record.value("source_currency", i.deliver_currency.str());
                    i.max_source = SourceCap{jsonl::require_amount(record, "max_source", line), Currency(cur)};
                }
                i.max_hops = optional_int(record, "max_hops", line, 6);
                req.intent = i;
            } else {
                throw ParseError(line, "unknown request kind '" + kind + "'");
            }
            requests.push_back(std::move(req));
        });
    });
    return requests;
}

std::vector<SettlementRequest> load_requests(std::filesystem::path const& path)
{
    auto in = open_input(path);
    return read_requests(in);
}

}  // namespace creditnet
