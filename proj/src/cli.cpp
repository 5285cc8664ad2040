#include "creditnet/cli.hpp"

#include "creditnet/error.hpp"
#include "creditnet/hash.hpp"
#include "creditnet/health.hpp"
#include "creditnet/ledger.hpp"
#include "creditnet/liquidity.hpp"
#include "creditnet/metrics.hpp"
#include "creditnet/offers.hpp"
#include "creditnet/rates.hpp"
#include "creditnet/settlement.hpp"
#include "creditnet/snapshot_io.hpp"
#include "creditnet/synth.hpp"
#include "creditnet/txlog.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

namespace creditnet::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

enum class Level { error, warn, info, debug };

Level log_level()
{
    char const* env = std::getenv("CREDITNET_LOG");
    std::string_view const v = env ? env : "";
    if (v == "debug")
        return Level::debug;
    if (v == "info")
        return Level::info;
    if (v == "error" || v == "quiet")
        return Level::error;
    return Level::warn;
}

Timestamp now()
{
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::vector<std::string> split(std::string const& text, char sep)
{
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        if (!item.empty())
            parts.push_back(item);
    }
    return parts;
}

ordered_json number_or_null(double v)
{
    return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json ids_json(std::span<WalletId const> ids)
{
    auto out = ordered_json::array();
    for (auto const& w : ids)
        out.push_back(w.str());
    return out;
}

struct Common {
    std::string format = "json";
    std::string out = "out";
    unsigned threads = 0;
};

// State shared by every command while it runs: input digests, the output
// directory and the manifest.
class Context {
public:
    Context(std::string command, std::vector<std::string> args, Common const& common, std::ostream& err)
        : command_(std::move(command)), args_(std::move(args)), common_(common), err_(err), level_(log_level()),
          started_(now())
    {
    }

    bool csv() const { return common_.format == "csv"; }
    unsigned threads() const
    {
        if (common_.threads > 0)
            return common_.threads;
        return std::max(1u, std::thread::hardware_concurrency());
    }
    void set_seed(std::uint64_t seed) { seed_ = seed; }

    void log(Level level, std::string const& message) const
    {
        static char const* const names[] = {"error", "warn", "info", "debug"};
        if (level <= level_)
            err_ << "[" << names[static_cast<int>(level)] << "] " << message << '\n';
    }

    fs::path const& input(std::string const& path)
    {
        inputs_.emplace_back(path, sha256_file(path));
        log(Level::debug, "input " + path + " sha256 " + inputs_.back().second);
        return path_store_.emplace_back(path);
    }

    LedgerSnapshot snapshot(std::string const& path, std::string const& gateways)
    {
        std::vector<WalletId> registry;
        if (!gateways.empty())
            registry = load_gateway_registry(input(gateways));
        auto s = load_snapshot(input(path), registry);
        log(Level::info, "snapshot " + path + ": " + std::to_string(s.wallet_count()) + " wallets, " +
                             std::to_string(s.link_count()) + " links");
        return s;
    }

    RateTable rates(std::string const& path)
    {
        if (path.empty())
            return RateTable{};
        return load_rate_table(input(path));
    }

    std::vector<Transaction> txlog(std::string const& path)
    {
        auto log_entries = load_txlog(input(path));
        log(Level::info, "transaction log " + path + ": " + std::to_string(log_entries.size()) + " records");
        return log_entries;
    }

    void write(std::string const& name, std::string const& content)
    {
        fs::create_directories(common_.out);
        auto const path = fs::path(common_.out) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw Error(ErrorKind::io, "cannot write " + path.string());
        out << content;
        out.close();
        if (!out)
            throw Error(ErrorKind::io, "cannot write " + path.string());
        outputs_.emplace_back(name, sha256_hex(content));
        log(Level::info, "wrote " + path.string());
    }

    void report(ordered_json const& json) { write(command_ + ".json", json.dump(2) + "\n"); }
    void report_csv(std::string const& csv) { write(command_ + ".csv", csv); }

    void finish()
    {
        ordered_json m;
        m["command"] = command_;
        m["arguments"] = args_;
        m["version"] = version;
        m["seed"] = seed_ ? ordered_json(*seed_) : ordered_json(nullptr);
        m["inputs"] = ordered_json::array();
        for (auto const& [path, digest] : inputs_)
            m["inputs"].push_back({{"path", path}, {"sha256", digest}});
        m["outputs"] = ordered_json::array();
        for (auto const& [name, digest] : outputs_)
            m["outputs"].push_back({{"file", name}, {"sha256", digest}});
        m["started"] = format_timestamp(started_);
        m["finished"] = format_timestamp(now());
        fs::create_directories(common_.out);
        std::ofstream out(fs::path(common_.out) / (command_ + ".manifest.json"), std::ios::binary);
        out << m.dump(2) << '\n';
        if (!out)
            throw Error(ErrorKind::io, "cannot write the run manifest");
    }

private:
    std::string command_;
    std::vector<std::string> args_;
    Common common_;
    std::ostream& err_;
    Level level_;
    Timestamp started_;
    std::optional<std::uint64_t> seed_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<fs::path> path_store_;
    std::vector<std::pair<std::string, std::string>> outputs_;
};

using Action = std::function<void(Context&)>;

struct Command {
    CLI::App* app = nullptr;
    Common common;
    Action action;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", c.out, "Output directory");
    sub->add_option("--threads", c.threads, "Worker threads (default: all cores)");
    sub->allow_extras();
}

TimeInterval window_of(std::string const& from, std::string const& to)
{
    return TimeInterval{parse_timestamp(from), parse_timestamp(to)};
}

std::pair<Currency, Currency> parse_pair(std::string const& text)
{
    auto const sep = text.find_first_of("/,");
    if (sep == std::string::npos)
        throw Error(ErrorKind::config, "pair must look like XRP/BTC");
    return {Currency(text.substr(0, sep)), Currency(text.substr(sep + 1))};
}

std::vector<WalletId> wallet_list(std::string const& csv, std::string const& file, Context& ctx)
{
    std::vector<WalletId> ids;
    for (auto const& s : split(csv, ','))
        ids.emplace_back(s);
    if (!file.empty()) {
        auto const more = load_gateway_registry(ctx.input(file));
        ids.insert(ids.end(), more.begin(), more.end());
    }
    return ids;
}

// ------------------------------------------------------------ subcommands

void add_validate(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("validate", "Check a snapshot file and summarize it");
    auto snapshot = std::make_shared<std::string>();
    auto gateways = std::make_shared<std::string>();
    sub->add_option("--snapshot", *snapshot, "Snapshot file")->required();
    sub->add_option("--gateways", *gateways, "Gateway registry file");
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        auto const s = ctx.snapshot(*snapshot, *gateways);
        std::map<std::string, std::size_t> roles;
        std::set<std::string> currencies;
        for (auto const& w : s.wallets())
            ++roles[std::string(to_string(w.role))];
        for (auto const& l : s.links())
            currencies.insert(l.currency.str());
        if (ctx.csv()) {
            std::ostringstream out;
            out << "field,value\nwallets," << s.wallet_count() << "\nlinks," << s.link_count() << "\noffers,"
                << s.offers().size() << "\ngateways," << s.gateway_registry().size() << '\n';
            ctx.report_csv(out.str());
            return;
        }
        ordered_json r;
        r["valid"] = true;
        r["timestamp"] = format_timestamp(s.timestamp());
        r["wallets"] = s.wallet_count();
        r["links"] = s.link_count();
        r["offers"] = s.offers().size();
        r["gateways"] = ids_json(s.gateway_registry());
        r["roles"] = roles;
        r["currencies"] = currencies;
        ctx.report(r);
    };
}

void add_synth(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("synth", "Generate a synthetic gateway-centric snapshot");
    struct Opts {
        SynthConfig cfg;
        std::string currencies = "USD";
        std::string balance_min = "0";
        std::string balance_max = "100";
        std::string limit_multiple;
        std::string timestamp = "2017-01-01T00:00:00Z";
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--n-gateways", o->cfg.n_gateways)->required();
    sub->add_option("--users-per-gateway", o->cfg.users_per_gateway)->required();
    sub->add_option("--inter-gateway-links", o->cfg.inter_gateway_links);
    sub->add_option("--currencies", o->currencies, "Comma-separated currency codes");
    sub->add_option("--balance-min", o->balance_min);
    sub->add_option("--balance-max", o->balance_max);
    sub->add_option("--limit-multiple", o->limit_multiple, "Limits as a multiple of balance (default unbounded)");
    sub->add_option("--ripple-policy", o->cfg.ripple_policy, "Fraction of user links allowing rippling");
    sub->add_option("--market-makers", o->cfg.market_makers);
    sub->add_option("--seed", o->cfg.seed);
    sub->add_option("--timestamp", o->timestamp);
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        auto cfg = o->cfg;
        cfg.currencies.clear();
        for (auto const& c : split(o->currencies, ','))
            cfg.currencies.emplace_back(c);
        cfg.balance_min = Amount::parse(o->balance_min);
        cfg.balance_max = Amount::parse(o->balance_max);
        if (!o->limit_multiple.empty())
            cfg.limit_policy = LimitPolicy::multiple_of_balance(Amount::parse(o->limit_multiple));
        cfg.timestamp = parse_timestamp(o->timestamp);
        ctx.set_seed(cfg.seed);
        auto const s = generate_synthetic(cfg);
        std::ostringstream out;
        write_snapshot(out, s);
        ctx.write("synth.jsonl", out.str());
    };
}

void add_settle(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("settle", "Apply settlement requests to a snapshot");
    struct Opts {
        std::string snapshot, gateways, requests;
        bool stop_on_error = false;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--snapshot", o->snapshot)->required();
    sub->add_option("--gateways", o->gateways);
    sub->add_option("--requests", o->requests, "Request file, one JSON object per line")->required();
    sub->add_flag("--stop-on-error", o->stop_on_error, "Fail on the first request that cannot settle");
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        auto state = ctx.snapshot(o->snapshot, o->gateways);
        auto const requests = load_requests(ctx.input(o->requests));
        std::vector<Transaction> log;
        auto failures = ordered_json::array();
        for (std::size_t i = 0; i < requests.size(); ++i) {
            auto const& req = requests[i];
            try {
                auto exec = std::visit(
                    [&](auto const& intent) -> Execution {
                        using T = std::decay_t<decltype(intent)>;
                        if constexpr (std::is_same_v<T, TxIntent>)
                            return execute_transaction(state, intent, req.timestamp);
                        else
                            return execute_circular_xrp(state, intent.wallet, intent.pay_xrp, intent.currency,
                                                        intent.issuer, req.timestamp, intent.max_hops);
                    },
                    req.intent);
                state = exec.snapshot;
                log.push_back(std::move(exec.transaction));
            } catch (Error const& e) {
                if (o->stop_on_error)
                    throw;
                ctx.log(Level::warn, "request " + std::to_string(i + 1) + ": " + e.what());
                failures.push_back({{"request", i + 1}, {"error", std::string(to_string(e.kind()))},
                                    {"message", e.what()}});
            }
        }
        std::ostringstream tx_out;
        write_txlog(tx_out, log);
        ctx.write("settle.txlog.jsonl", tx_out.str());
        std::ostringstream snap_out;
        write_snapshot(snap_out, state);
        ctx.write("settle.snapshot.jsonl", snap_out.str());
        if (ctx.csv()) {
            std::ostringstream out;
            out << "id,sender,receiver,amount,currency,source_amount,source_currency\n";
            for (auto const& t : log)
                out << t.id << ',' << t.sender.str() << ',' << t.receiver.str() << ',' << t.amount.to_string() << ','
                    << t.currency.str() << ',' << t.source_amount.to_string() << ',' << t.source_currency.str()
                    << '\n';
            ctx.report_csv(out.str());
            return;
        }
        ordered_json r;
        r["requests"] = requests.size();
        r["settled"] = log.size();
        r["failed"] = failures;
        auto ids = ordered_json::array();
        for (auto const& t : log)
            ids.push_back(t.id);
        r["transactions"] = ids;
        ctx.report(r);
    };
}

void add_metrics(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("metrics", "Structural metrics of the wallet graph");
    struct Opts {
        std::string snapshot, gateways;
        bool lcc = false;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--snapshot", o->snapshot)->required();
    sub->add_option("--gateways", o->gateways);
    sub->add_flag("--lcc", o->lcc, "Restrict to the largest connected component");
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        auto s = ctx.snapshot(o->snapshot, o->gateways);
        if (o->lcc)
            s = largest_connected_component(s);
        auto const m = basic_metrics(s);
        std::vector<std::pair<std::string, ordered_json>> const fields{
            {"wallets", m.n_wallets},           {"links", m.n_links},
            {"simple_edges", m.n_simple_edges}, {"avg_degree", number_or_null(m.avg_degree)},
            {"density", number_or_null(m.density)}, {"clustering", number_or_null(m.clustering)},
            {"transitivity", number_or_null(m.transitivity)}, {"assortativity", number_or_null(m.assortativity)},
        };
        if (ctx.csv()) {
            std::ostringstream out;
            out << "metric,value\n";
            for (auto const& [k, v] : fields)
                out << k << ',' << v.dump() << '\n';
            ctx.report_csv(out.str());
            return;
        }
        ordered_json r;
        for (auto const& [k, v] : fields)
            r[k] = v;
        ctx.report(r);
    };
}

void add_communities(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("communities", "Louvain community detection");
    struct Opts {
        std::string snapshot, gateways;
        double resolution = 1.0;
        std::uint64_t seed = 0;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--snapshot", o->snapshot)->required();
    sub->add_option("--gateways", o->gateways);
    sub->add_option("--resolution", o->resolution);
    sub->add_option("--seed", o->seed);
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        ctx.set_seed(o->seed);
        auto const s = ctx.snapshot(o->snapshot, o->gateways);
        auto const c = louvain(s, o->resolution, o->seed);
        if (ctx.csv()) {
            std::ostringstream out;
            out << "wallet,community\n";
            for (std::size_t i = 0; i < c.wallets.size(); ++i)
                out << c.wallets[i].str() << ',' << c.community[i] << '\n';
            ctx.report_csv(out.str());
            return;
        }
        ordered_json r;
        r["resolution"] = c.resolution;
        r["communities"] = c.count();
        r["modularity"] = c.modularity;
        r["pass_modularity"] = c.pass_modularity;
        r["sizes"] = c.sizes();
        auto members = ordered_json::object();
        for (std::size_t i = 0; i < c.wallets.size(); ++i)
            members[c.wallets[i].str()] = c.community[i];
        r["assignment"] = members;
        ctx.report(r);
    };
}

void add_motifs(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("motifs", "Coloured three-node motif census");
    struct Opts {
        std::string snapshot, gateways, coloring;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--snapshot", o->snapshot)->required();
    sub->add_option("--gateways", o->gateways);
    sub->add_option("--coloring", o->coloring, "CSV wallet,colour (U, G or MM); default: roles");
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        auto const s = ctx.snapshot(o->snapshot, o->gateways);
        MotifCensus census;
        if (o->coloring.empty()) {
            census = motif_census(s, ctx.threads());
        } else {
            std::ifstream in(ctx.input(o->coloring));
            std::map<WalletId, Color> colors;
            std::string line;
            std::size_t n = 0;
            while (std::getline(in, line)) {
                ++n;
                auto const f = split(line, ',');
                if (f.empty() || (n == 1 && f[0] == "wallet"))
                    continue;
                if (f.size() != 2)
                    throw ParseError(n, "expected wallet,colour");
                auto colour = f[1];
                if (!colour.empty() && colour.back() == '\r')
                    colour.pop_back();
                if (colour == "U")
                    colors[WalletId(f[0])] = Color::U;
                else if (colour == "G")
                    colors[WalletId(f[0])] = Color::G;
                else if (colour == "MM")
                    colors[WalletId(f[0])] = Color::MM;
                else
                    throw ParseError(n, "unknown colour '" + colour + "'");
            }
            census = motif_census(s, colors, ctx.threads());
        }
        auto const freq = census.frequencies();
        if (ctx.csv()) {
            std::ostringstream out;
            out << "motif,count,frequency\n";
            for (auto const& [k, v] : census.counts)
                out << k << ',' << v << ',' << ordered_json(freq.at(k)).dump() << '\n';
            ctx.report_csv(out.str());
            return;
        }
        ordered_json r;
        r["total"] = census.total;
        r["most_frequent"] = census.most_frequent();
        auto motifs = ordered_json::object();
        for (auto const& [k, v] : census.counts)
            motifs[k] = {{"count", v}, {"frequency", freq.at(k)}};
        r["motifs"] = motifs;
        ctx.report(r);
    };
}

void add_mixing(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("mixing", "Lower bound on the lazy-walk mixing time");
    struct Opts {
        std::string snapshot, gateways;
        double epsilon = 0.10;
        double tolerance = 1e-9;
        int max_iterations = 100'000;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--snapshot", o->snapshot)->required();
    sub->add_option("--gateways", o->gateways);
    sub->add_option("--epsilon", o->epsilon, "Distance to stationarity, in (0, 0.5)");
    sub->add_option("--tolerance", o->tolerance);
    sub->add_option("--max-iterations", o->max_iterations);
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        auto const s = ctx.snapshot(o->snapshot, o->gateways);
        auto const lcc = largest_connected_component(s);
        SimpleGraph const graph(lcc);
        auto const mu = lazy_walk_slem(graph, o->tolerance, o->max_iterations);
        auto const bound = mixing_bound(mu, o->epsilon);
        if (ctx.csv()) {
            std::ostringstream out;
            out << "component_wallets,slem,epsilon,lower_bound\n"
                << lcc.wallet_count() << ',' << ordered_json(mu).dump() << ',' << ordered_json(o->epsilon).dump()
                << ',' << ordered_json(bound).dump() << '\n';
            ctx.report_csv(out.str());
            return;
        }
        ordered_json r;
        r["component_wallets"] = lcc.wallet_count();
        r["slem"] = mu;
        r["epsilon"] = o->epsilon;
        r["lower_bound"] = number_or_null(bound);
        ctx.report(r);
    };
}

void add_liquidity(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("liquidity", "Sampled pairwise liquidity by maximum flow");
    struct Opts {
        std::string snapshot, gateways, rates, keep, target;
        std::size_t pairs = 1000;
        std::uint64_t seed = 0;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--snapshot", o->snapshot)->required();
    sub->add_option("--gateways", o->gateways);
    sub->add_option("--currencies", o->keep, "Comma-separated currencies to keep")->required();
    sub->add_option("--rates", o->rates, "Rate table CSV, needed when converting");
    sub->add_option("--target", o->target, "Common currency (default: the single kept currency)");
    sub->add_option("--pairs", o->pairs);
    sub->add_option("--seed", o->seed);
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        ctx.set_seed(o->seed);
        auto const s = ctx.snapshot(o->snapshot, o->gateways);
        std::vector<Currency> keep;
        for (auto const& c : split(o->keep, ','))
            keep.emplace_back(c);
        auto net = prune_by_currency(s, keep);
        if (keep.size() > 1 || !o->target.empty()) {
            if (o->target.empty())
                throw Error(ErrorKind::config, "--target is required with several currencies");
            net = convert_to_common(net, ctx.rates(o->rates), Currency(o->target));
        }
        auto const graph = to_flow_graph(net);
        auto const sample = liquidity_sample(graph, o->pairs, o->seed, ctx.threads());
        auto value = [](FlowValue const& f) { return f.unbounded ? std::string("inf") : f.value.to_string(); };
        if (ctx.csv()) {
            std::ostringstream out;
            out << "source,sink,flow,endpoint_bound,has_liquidity\n";
            for (auto const& p : sample.pairs)
                out << p.source.str() << ',' << p.sink.str() << ',' << value(p.flow) << ','
                    << value(p.endpoint_bound) << ',' << (p.has_liquidity ? "true" : "false") << '\n';
            ctx.report_csv(out.str());
            return;
        }
        ordered_json r;
        r["wallets"] = graph.nodes().size();
        r["arcs"] = graph.arcs().size();
        r["pairs"] = sample.pairs.size();
        r["fraction_with_liquidity"] = sample.fraction;
        auto pairs = ordered_json::array();
        for (auto const& p : sample.pairs)
            pairs.push_back({{"source", p.source.str()},
                             {"sink", p.sink.str()},
                             {"flow", value(p.flow)},
                             {"endpoint_bound", value(p.endpoint_bound)},
                             {"has_liquidity", p.has_liquidity}});
        r["sample"] = pairs;
        ctx.report(r);
    };
}

void add_rippling_risk(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("rippling-risk", "Wallets prone to rippling and the credit at risk");
    struct Opts {
        std::string snapshot, gateways, rates, target = "USD";
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--snapshot", o->snapshot)->required();
    sub->add_option("--gateways", o->gateways);
    sub->add_option("--rates", o->rates);
    sub->add_option("--target", o->target);
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        auto const s = ctx.snapshot(o->snapshot, o->gateways);
        auto const r = rippling_risk_scan(s, ctx.rates(o->rates), Currency(o->target));
        if (ctx.csv()) {
            std::ostringstream out;
            out << "wallet,currency,rippling_links\n";
            for (auto const& p : r.prone)
                for (auto const& c : p.currencies)
                    out << p.wallet.str() << ',' << c.currency.str() << ',' << c.counterparties.size() << '\n';
            ctx.report_csv(out.str());
            return;
        }
        ordered_json j;
        j["target"] = r.target.str();
        j["prone_wallets"] = r.prone.size();
        j["credit_at_risk"] = r.credit_at_risk.to_string();
        j["gateway_links"] = r.gateway_links;
        j["limit_gap_exposure"] = r.limit_gap_exposure.to_string();
        auto prone = ordered_json::array();
        for (auto const& p : r.prone) {
            auto cs = ordered_json::array();
            for (auto const& c : p.currencies)
                cs.push_back({{"currency", c.currency.str()}, {"counterparties", ids_json(c.counterparties)}});
            prone.push_back({{"wallet", p.wallet.str()}, {"currencies", cs}});
        }
        j["prone"] = prone;
        ctx.report(j);
    };
}

void add_resilience(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("resilience", "Largest component under removal of disruptive wallets");
    struct Opts {
        std::string snapshot, gateways, txlog, criterion = "degree", order;
        std::size_t k = 100;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--snapshot", o->snapshot)->required();
    sub->add_option("--gateways", o->gateways);
    sub->add_option("--criterion", o->criterion, "degree or tx_frequency")
        ->check(CLI::IsMember({"degree", "tx_frequency"}));
    sub->add_option("--k", o->k, "Wallets to remove");
    sub->add_option("--txlog", o->txlog, "Transaction log (tx_frequency)");
    sub->add_option("--order", o->order, "Explicit removal order, one wallet per line");
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        auto const s = ctx.snapshot(o->snapshot, o->gateways);
        std::vector<WalletId> order;
        std::vector<RankedWallet> ranked;
        if (!o->order.empty()) {
            order = load_gateway_registry(ctx.input(o->order));
        } else {
            std::optional<std::vector<Transaction>> log;
            if (!o->txlog.empty())
                log = ctx.txlog(o->txlog);
            std::optional<std::span<Transaction const>> view;
            if (log)
                view = std::span<Transaction const>(*log);
            ranked = select_disruptive(s, view, o->k, parse_disruption_criterion(o->criterion));
            for (auto const& w : ranked)
                order.push_back(w.wallet);
        }
        auto const rec = removal_analysis(s, order);
        if (ctx.csv()) {
            ctx.report_csv(resilience_csv(rec));
            return;
        }
        ordered_json r;
        r["criterion"] = o->order.empty() ? o->criterion : "explicit";
        r["wallets"] = rec.initial_wallets;
        r["initial_lcc"] = rec.initial_lcc;
        auto steps = ordered_json::array();
        for (std::size_t i = 0; i < rec.removed.size(); ++i) {
            ordered_json step{{"removed", rec.removed[i].str()}};
            if (!ranked.empty())
                step["score"] = ranked[i].score;
            step["lcc_size"] = rec.lcc_sizes[i];
            step["rsl_factor"] = number_or_null(rec.rsl_factors[i]);
            steps.push_back(step);
        }
        r["removals"] = steps;
        ctx.report(r);
        ctx.write("resilience.csv", resilience_csv(rec));
    };
}

void add_stuck_credit(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("stuck-credit", "Credit stuck with a faulty gateway");
    struct Opts {
        std::string snapshot, gateways, gateway, rates, target = "USD";
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--snapshot", o->snapshot)->required();
    sub->add_option("--gateways", o->gateways);
    sub->add_option("--gateway", o->gateway, "Gateway wallet id")->required();
    sub->add_option("--rates", o->rates);
    sub->add_option("--target", o->target);
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        auto const s = ctx.snapshot(o->snapshot, o->gateways);
        auto const r = stuck_credit(s, WalletId(o->gateway), ctx.rates(o->rates), Currency(o->target));
        if (ctx.csv()) {
            std::ostringstream out;
            out << "wallet,currency,balance,movable,reason,stuck_converted\n";
            for (auto const& l : r.links)
                out << l.wallet.str() << ',' << l.currency.str() << ',' << l.balance.to_string() << ','
                    << l.movable.to_string() << ',' << (l.reason ? to_string(*l.reason) : "none") << ','
                    << l.stuck_converted.to_string() << '\n';
            ctx.report_csv(out.str());
            return;
        }
        ordered_json j;
        j["gateway"] = r.gateway.str();
        j["target"] = r.target.str();
        j["wallets_no_rippling"] = ids_json(r.wallets_no_rippling);
        j["wallets_rippling_no_tx"] = ids_json(r.wallets_rippling_no_tx);
        j["stuck_total"] = r.stuck_total.to_string();
        auto links = ordered_json::array();
        for (auto const& l : r.links)
            links.push_back({{"wallet", l.wallet.str()},
                             {"currency", l.currency.str()},
                             {"balance", l.balance.to_string()},
                             {"movable", l.movable.to_string()},
                             {"reason", l.reason ? ordered_json(to_string(*l.reason)) : ordered_json(nullptr)},
                             {"stuck_converted", l.stuck_converted.to_string()}});
        j["links"] = links;
        ctx.report(j);
    };
}

void add_acquisition(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("acquisition", "How victims of a gateway acquired credit");
    struct Opts {
        std::string txlog, victims, victims_file, gateway, rates, target = "USD", from, to;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--txlog", o->txlog)->required();
    sub->add_option("--victims", o->victims, "Comma-separated wallet ids");
    sub->add_option("--victims-file", o->victims_file, "One wallet id per line");
    sub->add_option("--gateway", o->gateway)->required();
    sub->add_option("--rates", o->rates);
    sub->add_option("--target", o->target);
    sub->add_option("--from", o->from, "Window start (UTC)")->required();
    sub->add_option("--to", o->to, "Window end (UTC, exclusive)")->required();
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        auto const log = ctx.txlog(o->txlog);
        auto const victims = wallet_list(o->victims, o->victims_file, ctx);
        auto const r = credit_acquisition(log, victims, WalletId(o->gateway), ctx.rates(o->rates),
                                          Currency(o->target), window_of(o->from, o->to));
        auto rate = [](std::optional<double> v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
        if (ctx.csv()) {
            std::ostringstream out;
            out << "class,count,received\ninbound," << r.inbound.count << ',' << r.inbound.received.to_string()
                << "\ncircular," << r.circular.count << ',' << r.circular.received.to_string() << '\n';
            ctx.report_csv(out.str());
            return;
        }
        ordered_json j;
        j["gateway"] = r.gateway.str();
        j["target"] = r.target.str();
        j["window"] = {{"from", format_timestamp(r.window.start)}, {"to", format_timestamp(r.window.end)}};
        auto cls = [](AcquisitionClass const& c) {
            return ordered_json{{"count", c.count}, {"received", c.received.to_string()}, {"transactions", c.tx_ids}};
        };
        j["inbound"] = cls(r.inbound);
        j["circular"] = cls(r.circular);
        auto paid = ordered_json::object();
        for (auto const& [c, a] : r.circular_paid)
            paid[c.str()] = a.to_string();
        j["circular_paid"] = paid;
        j["rate_simple"] = rate(r.simple_rate);
        j["rate_volume_weighted"] = rate(r.weighted_rate);
        ctx.report(j);
    };
}

void add_classify(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("classify-tx", "Prune and bucket a transaction log");
    struct Opts {
        std::string txlog, snapshot, gateways, exclude;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--txlog", o->txlog)->required();
    sub->add_option("--snapshot", o->snapshot)->required();
    sub->add_option("--gateways", o->gateways);
    sub->add_option("--exclude", o->exclude, "Transaction ids to discard as anomalous, one per line");
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        auto const log = ctx.txlog(o->txlog);
        auto const s = ctx.snapshot(o->snapshot, o->gateways);
        AnomalyPredicate anomalous;
        if (!o->exclude.empty()) {
            std::set<std::string> ids;
            for (auto const& w : load_gateway_registry(ctx.input(o->exclude)))
                ids.insert(w.str());
            anomalous = [ids](Transaction const& t) { return ids.contains(t.id); };
        }
        auto const r = classify_transactions(log, s, anomalous);
        std::vector<std::pair<char const*, std::size_t>> const fields{
            {"input", r.input},
            {"pruned_unknown_endpoint", r.pruned_unknown_endpoint},
            {"pruned_direct_xrp", r.pruned_direct_xrp},
            {"pruned_anomalous", r.pruned_anomalous},
            {"classified", r.classified},
            {"circular", r.circular},
            {"circular_cross_currency", r.circular_cross_currency},
            {"cross_currency_noncircular", r.cross_currency_noncircular},
            {"offers_used", r.offers_used},
            {"intermediaries_0", r.intermediaries_0},
            {"intermediaries_1", r.intermediaries_1},
            {"intermediaries_2plus", r.intermediaries_2plus},
            {"involving_xrp", r.involving_xrp},
            {"not_involving_xrp", r.not_involving_xrp},
        };
        if (ctx.csv()) {
            std::ostringstream out;
            out << "bucket,count\n";
            for (auto const& [k, v] : fields)
                out << k << ',' << v << '\n';
            ctx.report_csv(out.str());
            return;
        }
        ordered_json j;
        for (auto const& [k, v] : fields)
            j[k] = v;
        ctx.report(j);
    };
}

void add_stale_offers(CLI::App& app, std::vector<Command>& commands)
{
    auto& cmd = commands.emplace_back();
    auto* sub = cmd.app = app.add_subcommand("stale-offers", "Gains from offers priced off the reference rate");
    struct Opts {
        std::string txlog, offers, rate_series, pair = "XRP/BTC", reference = "USD", from, to;
        int max_gap_hours = 24;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--txlog", o->txlog)->required();
    sub->add_option("--offers", o->offers, "Offer observations, one JSON object per line")->required();
    sub->add_option("--rate-series", o->rate_series, "CSV timestamp,base,quote,rate")->required();
    sub->add_option("--pair", o->pair, "Currency pair, e.g. XRP/BTC");
    sub->add_option("--reference", o->reference);
    sub->add_option("--from", o->from)->required();
    sub->add_option("--to", o->to)->required();
    sub->add_option("--max-gap-hours", o->max_gap_hours, "Oldest usable reference sample");
    add_common(sub, cmd.common);
    cmd.action = [=](Context& ctx) {
        auto const log = ctx.txlog(o->txlog);
        auto const history = load_offer_history(ctx.input(o->offers));
        auto const rates = load_rate_series(ctx.input(o->rate_series), std::chrono::hours(o->max_gap_hours));
        auto const r = stale_offer_report(log, history, rates, parse_pair(o->pair), window_of(o->from, o->to),
                                          Currency(o->reference));
        if (ctx.csv()) {
            ctx.report_csv(rate_points_csv(r));
            return;
        }
        ordered_json j;
        j["pair"] = {r.pair.first.str(), r.pair.second.str()};
        j["reference"] = r.reference.str();
        j["window"] = {{"from", format_timestamp(r.window.start)}, {"to", format_timestamp(r.window.end)}};
        j["at_risk_total"] = r.at_risk_total.to_string();
        auto offers = ordered_json::array();
        for (auto const& e : r.offers)
            offers.push_back({{"id", e.offer.id},
                              {"owner", e.offer.owner.str()},
                              {"observed_at", format_timestamp(*e.offer.observed_at)},
                              {"at_risk", e.at_risk.to_string()},
                              {"realized", e.realized.to_string()},
                              {"fills", e.fills}});
        j["offers"] = offers;
        auto exploits = ordered_json::array();
        Amount realized;
        for (auto const& e : r.exploits) {
            realized += e.gain;
            exploits.push_back({{"wallet", e.wallet.str()}, {"gain", e.gain.to_string()}, {"transactions", e.tx_ids}});
        }
        j["exploiting_wallets"] = r.exploits.size();
        j["realized_gains"] = realized.to_string();
        j["exploits"] = exploits;
        auto points = ordered_json::array();
        for (auto const& p : r.points)
            points.push_back({{"timestamp", format_timestamp(p.at)},
                              {"tx", p.tx_id},
                              {"tx_rate", p.tx_rate},
                              {"reference_rate", p.reference_rate},
                              {"side", "pays_" + p.paid.str()},
                              {"gain", p.gain.to_string()}});
        j["points"] = points;
        ctx.report(j);
        ctx.write("stale-offers.csv", rate_points_csv(r));
    };
}

}  // namespace

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Credit network ledger analysis", args.empty() ? "creditnet" : args[0]};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);
    app.allow_extras();
    std::vector<Command> commands;
    commands.reserve(16);
    add_validate(app, commands);
    add_synth(app, commands);
    add_settle(app, commands);
    add_metrics(app, commands);
    add_communities(app, commands);
    add_motifs(app, commands);
    add_mixing(app, commands);
    add_liquidity(app, commands);
    add_rippling_risk(app, commands);
    add_resilience(app, commands);
    add_stuck_credit(app, commands);
    add_acquisition(app, commands);
    add_classify(app, commands);
    add_stale_offers(app, commands);

    std::vector<char const*> argv;
    for (auto const& a : args)
        argv.push_back(a.c_str());
    if (argv.empty())
        argv.push_back("creditnet");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return 0;
    } catch (CLI::CallForVersion const&) {
        out << version << '\n';
        return 0;
    } catch (CLI::ParseError const& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    Command* chosen = nullptr;
    for (auto& c : commands) {
        if (c.app->parsed())
            chosen = &c;
    }
    // One diagnostic per unknown flag; stray values after a flag are its
    // arguments.
    std::vector<std::string> extras = app.remaining();
    if (chosen) {
        auto const more = chosen->app->remaining();
        extras.insert(extras.end(), more.begin(), more.end());
    }
    bool bad = false;
    bool after_flag = false;
    for (auto const& e : extras) {
        if (e.rfind("-", 0) == 0) {
            err << "usage error: unknown option " << e << '\n';
            bad = after_flag = true;
        } else if (!after_flag) {
            err << "usage error: unexpected argument " << e << '\n';
            bad = true;
        }
    }
    if (bad || !chosen)
        return 2;

    try {
        Context ctx(chosen->app->get_name(), std::vector<std::string>(args.begin() + (args.empty() ? 0 : 1), args.end()),
                    chosen->common, err);
        chosen->action(ctx);
        ctx.finish();
    } catch (Error const& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::config ? 2 : 1;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace creditnet::cli
