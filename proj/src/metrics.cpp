#include "creditnet/metrics.hpp"

#include "creditnet/error.hpp"
#include "creditnet/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

namespace creditnet {

double average_degree(std::size_t vertices, std::size_t simple_edges)
{
    if (vertices == 0)
        throw Error(ErrorKind::empty_snapshot, "no wallets");
    return 2.0 * static_cast<double>(simple_edges) / static_cast<double>(vertices);
}

double density(std::size_t vertices, std::size_t directed_edges)
{
    if (vertices == 0)
        throw Error(ErrorKind::empty_snapshot, "no wallets");
    if (vertices == 1)
        return 0;
    double const v = static_cast<double>(vertices);
    return static_cast<double>(directed_edges) / (v * (v - 1));
}

double degree_assortativity(SimpleGraph const& graph)
{
    double sum_x = 0;
    double sum_x2 = 0;
    double sum_xy = 0;
    double pairs = 0;
    for (Vertex u = 0; u < graph.vertex_count(); ++u) {
        double const du = static_cast<double>(graph.degree(u));
        for (Vertex v : graph.neighbors(u)) {
            double const dv = static_cast<double>(graph.degree(v));
            sum_x += du;
            sum_x2 += du * du;
            sum_xy += du * dv;
            pairs += 1;
        }
    }
    if (pairs == 0)
        return 0;
    double const mean = sum_x / pairs;
    double const var = sum_x2 / pairs - mean * mean;
    if (std::abs(var) < 1e-12)
        return 0;
    return (sum_xy / pairs - mean * mean) / var;
}

MetricsReport basic_metrics(SimpleGraph const& graph, std::size_t directed_edges)
{
    MetricsReport r;
    r.n_wallets = graph.vertex_count();
    r.n_links = directed_edges;
    r.n_simple_edges = graph.edge_count();
    r.avg_degree = average_degree(r.n_wallets, r.n_simple_edges);
    r.density = density(r.n_wallets, directed_edges);

    double local_sum = 0;
    double triangles3 = 0;  // each triangle seen once per corner
    double triples = 0;
    for (Vertex v = 0; v < graph.vertex_count(); ++v) {
        auto const nb = graph.neighbors(v);
        double const k = static_cast<double>(nb.size());
        if (nb.size() < 2)
            continue;
        double links = 0;
        for (std::size_t i = 0; i < nb.size(); ++i) {
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                if (graph.adjacent(nb[i], nb[j]))
                    links += 1;
            }
        }
        double const possible = k * (k - 1) / 2;
        local_sum += links / possible;
        triangles3 += links;
        triples += possible;
    }
    r.clustering = local_sum / static_cast<double>(r.n_wallets);
    r.transitivity = triples > 0 ? triangles3 / triples : 0;
    r.assortativity = degree_assortativity(graph);
    return r;
}

MetricsReport basic_metrics(LedgerSnapshot const& snapshot)
{
    if (snapshot.empty())
        throw Error(ErrorKind::empty_snapshot, "no wallets");
    std::set<std::pair<WalletIndex, WalletIndex>> directed;
    for (LinkIndex l = 0; l < snapshot.link_count(); ++l)
        directed.insert(snapshot.endpoints(l));
    return basic_metrics(SimpleGraph(snapshot), directed.size());
}

double lazy_walk_slem(SimpleGraph const& graph, double tolerance, int max_iterations)
{
    std::size_t const n = graph.vertex_count();
    if (n < 2)
        throw Error(ErrorKind::disconnected, "mixing needs at least two wallets");
    if (connected_components(graph).sizes.size() != 1)
        throw Error(ErrorKind::disconnected, "graph is not connected");

    std::vector<double> inv_sqrt(n);
    std::vector<double> top(n);
    double norm = 0;
    for (Vertex v = 0; v < n; ++v) {
        double const d = static_cast<double>(graph.degree(v));
        inv_sqrt[v] = 1 / std::sqrt(d);
        top[v] = std::sqrt(d);
        norm += d;
    }
    for (auto& t : top)
        t /= std::sqrt(norm);

    auto deflate = [&](std::vector<double>& x) {
        double const dot = std::inner_product(x.begin(), x.end(), top.begin(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            x[i] -= dot * top[i];
    };
    auto normalize = [&](std::vector<double>& x) {
        double const len = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
        if (len > 0) {
            for (auto& v : x)
                v /= len;
        }
        return len;
    };

    Rng rng(0x9e3779b97f4a7c15ULL);
    std::vector<double> x(n);
    for (auto& v : x)
        v = rng.unit() - 0.5;
    deflate(x);
    if (normalize(x) == 0)
        return 0;

    std::vector<double> y(n);
    double previous = -1;
    int stalled = 0;
    for (int it = 0; it < max_iterations; ++it) {
        // y = (x + D^-1/2 A D^-1/2 x) / 2
        for (Vertex v = 0; v < n; ++v) {
            double s = 0;
            for (Vertex u : graph.neighbors(v))
                s += inv_sqrt[u] * x[u];
            y[v] = 0.5 * (x[v] + inv_sqrt[v] * s);
        }
        deflate(y);
        double const rho = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
        double residual = 0;
        for (std::size_t i = 0; i < n; ++i)
            residual += (y[i] - rho * x[i]) * (y[i] - rho * x[i]);
        // Squared residual bounds the eigenvalue error.
        if (residual < tolerance)
            return std::abs(rho);
        stalled = std::abs(rho - previous) < tolerance * 1e-4 ? stalled + 1 : 0;
        if (stalled >= 1000)
            return std::abs(rho);
        previous = rho;
        if (normalize(y) == 0)
            return 0;
        std::swap(x, y);
    }
    throw Error(ErrorKind::convergence_failure,
                "power iteration did not converge in " + std::to_string(max_iterations) + " iterations");
}

double mixing_bound(double mu, double epsilon)
{
    if (!(epsilon > 0 && epsilon < 0.5))
        throw Error(ErrorKind::config, "epsilon must lie in (0, 0.5)");
    return mu / (2 * (1 - mu)) * std::log(1 / (2 * epsilon));
}

double mixing_time_lower_bound(SimpleGraph const& graph, double epsilon)
{
    if (!(epsilon > 0 && epsilon < 0.5))
        throw Error(ErrorKind::config, "epsilon must lie in (0, 0.5)");
    return mixing_bound(lazy_walk_slem(graph), epsilon);
}

double mixing_time_lower_bound(LedgerSnapshot const& snapshot, double epsilon)
{
    return mixing_time_lower_bound(SimpleGraph(snapshot), epsilon);
}

// ---------------------------------------------------------------- Louvain

namespace {

struct WeightedGraph {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // self loops hold A_ii
    std::vector<double> k;
    double m2 = 0;

    std::size_t size() const { return adj.size(); }

    void finish()
    {
        k.assign(adj.size(), 0);
        m2 = 0;
        for (std::size_t i = 0; i < adj.size(); ++i) {
            for (auto const& [_, w] : adj[i])
                k[i] += w;
            m2 += k[i];
        }
    }
};

WeightedGraph weighted(SimpleGraph const& g)
{
    WeightedGraph w;
    w.adj.resize(g.vertex_count());
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        for (Vertex u : g.neighbors(v))
            w.adj[v].emplace_back(u, 1.0);
    }
    w.finish();
    return w;
}

double weighted_modularity(WeightedGraph const& g, std::vector<std::uint32_t> const& comm, double resolution)
{
    if (g.m2 == 0)
        return 0;
    std::vector<double> in(g.size(), 0);
    std::vector<double> tot(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        tot[comm[i]] += g.k[i];
        for (auto const& [j, w] : g.adj[i]) {
            if (comm[j] == comm[i])
                in[comm[i]] += w;
        }
    }
    double q = 0;
    for (std::size_t c = 0; c < g.size(); ++c)
        q += in[c] / g.m2 - resolution * (tot[c] / g.m2) * (tot[c] / g.m2);
    return q;
}

/// Renumbers to 0..K-1 by first appearance; returns K.
std::uint32_t compact(std::vector<std::uint32_t>& comm)
{
    std::vector<std::uint32_t> map(comm.size(), UINT32_MAX);
    std::uint32_t next = 0;
    for (auto& c : comm) {
        if (map[c] == UINT32_MAX)
            map[c] = next++;
        c = map[c];
    }
    return next;
}

bool local_moving(WeightedGraph const& g, std::vector<std::uint32_t>& comm, double resolution, Rng& rng)
{
    constexpr double eps = 1e-12;
    std::size_t const n = g.size();
    if (g.m2 == 0)
        return false;
    std::vector<double> tot(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        tot[comm[i]] += g.k[i];
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<double> w_to(n, 0);
    std::vector<std::uint32_t> touched;
    bool any = false;
    for (;;) {
        bool moved = false;
        for (auto i : order) {
            std::uint32_t const old = comm[i];
            touched.clear();
            for (auto const& [j, w] : g.adj[i]) {
                if (j == i)
                    continue;
                if (w_to[comm[j]] == 0)
                    touched.push_back(comm[j]);
                w_to[comm[j]] += w;
            }
            tot[old] -= g.k[i];
            double const ki = g.k[i];
            double const base = w_to[old] - resolution * tot[old] * ki / g.m2;
            std::uint32_t best = old;
            double best_gain = base;
            for (auto c : touched) {
                if (c == old)
                    continue;
                double const gain = w_to[c] - resolution * tot[c] * ki / g.m2;
                if (gain <= base + eps)
                    continue;
                if (best == old || gain > best_gain + eps || (std::abs(gain - best_gain) <= eps && c < best)) {
                    best = c;
                    best_gain = gain;
                }
            }
            for (auto c : touched)
                w_to[c] = 0;
            w_to[old] = 0;
            tot[best] += ki;
            if (best != old) {
                comm[i] = best;
                moved = true;
                any = true;
            }
        }
        if (!moved)
            break;
    }
    return any;
}

WeightedGraph aggregate(WeightedGraph const& g, std::vector<std::uint32_t> const& comm, std::uint32_t count)
{
    std::vector<std::map<std::uint32_t, double>> rows(count);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (auto const& [j, w] : g.adj[i])
            rows[comm[i]][comm[j]] += w;
    }
    WeightedGraph out;
    out.adj.resize(count);
    for (std::uint32_t c = 0; c < count; ++c)
        out.adj[c].assign(rows[c].begin(), rows[c].end());
    out.finish();
    return out;
}

}  // namespace

std::size_t CommunityAssignment::count() const
{
    return community.empty() ? 0 : *std::max_element(community.begin(), community.end()) + 1;
}

std::vector<std::size_t> CommunityAssignment::sizes() const
{
    std::vector<std::size_t> s(count(), 0);
    for (auto c : community)
        ++s[c];
    return s;
}

double modularity(SimpleGraph const& graph, std::span<std::uint32_t const> community, double resolution)
{
    if (community.size() != graph.vertex_count())
        throw Error(ErrorKind::invariant_violation, "partition size does not match the graph");
    std::vector<std::uint32_t> comm(community.begin(), community.end());
    compact(comm);
    return weighted_modularity(weighted(graph), comm, resolution);
}

CommunityAssignment louvain(SimpleGraph const& graph, double resolution, std::uint64_t seed)
{
    if (!(resolution > 0))
        throw Error(ErrorKind::config, "resolution must be positive");
    CommunityAssignment result;
    result.resolution = resolution;
    std::size_t const n = graph.vertex_count();
    WeightedGraph const base = weighted(graph);
    Rng rng(seed);

    std::vector<std::uint32_t> part(n);
    std::iota(part.begin(), part.end(), 0);
    bool first = true;
    for (;;) {
        // Local moves on the original vertices, starting from the current
        // partition, so the result is a fixed point at the finest level too.
        bool const moved = local_moving(base, part, resolution, rng);
        if (moved)
            result.pass_modularity.push_back(weighted_modularity(base, part, resolution));
        if (!moved && !first)
            break;
        first = false;

        std::uint32_t count = compact(part);
        WeightedGraph level = aggregate(base, part, count);
        for (;;) {
            std::vector<std::uint32_t> c(level.size());
            std::iota(c.begin(), c.end(), 0);
            if (!local_moving(level, c, resolution, rng))
                break;
            count = compact(c);
            for (auto& p : part)
                p = c[p];
            result.pass_modularity.push_back(weighted_modularity(base, part, resolution));
            level = aggregate(level, c, count);
        }
    }

    // Number communities by their smallest member.
    std::vector<std::uint32_t> map(n, UINT32_MAX);
    std::uint32_t next = 0;
    for (auto& p : part) {
        if (map[p] == UINT32_MAX)
            map[p] = next++;
        p = map[p];
    }
    result.community = std::move(part);
    result.modularity = weighted_modularity(base, result.community, resolution);
    return result;
}

CommunityAssignment louvain(LedgerSnapshot const& snapshot, double resolution, std::uint64_t seed)
{
    auto result = louvain(SimpleGraph(snapshot), resolution, seed);
    for (auto const& w : snapshot.wallets())
        result.wallets.push_back(w.id);
    return result;
}

// ---------------------------------------------------------------- motifs

std::string_view to_string(Color color) noexcept
{
    switch (color) {
    case Color::U: return "U";
    case Color::G: return "G";
    case Color::MM: return "MM";
    }
    return "U";
}

std::vector<Color> role_colors(LedgerSnapshot const& snapshot)
{
    std::vector<Color> colors;
    colors.reserve(snapshot.wallet_count());
    for (auto const& w : snapshot.wallets()) {
        switch (w.role) {
        case Role::gateway: colors.push_back(Color::G); break;
        case Role::market_maker: colors.push_back(Color::MM); break;
        case Role::user: colors.push_back(Color::U); break;
        }
    }
    return colors;
}

std::map<std::string, double> MotifCensus::frequencies() const
{
    std::map<std::string, double> f;
    for (auto const& [key, n] : counts)
        f[key] = total > 0 ? static_cast<double>(n) / static_cast<double>(total) : 0.0;
    return f;
}

std::string MotifCensus::most_frequent() const
{
    std::string best;
    std::uint64_t best_count = 0;
    for (auto const& [key, n] : counts) {
        if (n > best_count) {
            best = key;
            best_count = n;
        }
    }
    return best;
}

namespace {

// Colours in name order: G < MM < U.
int rank(Color c)
{
    switch (c) {
    case Color::G: return 0;
    case Color::MM: return 1;
    case Color::U: return 2;
    }
    return 2;
}

constexpr std::array<Color, 3> by_rank{Color::G, Color::MM, Color::U};

// Paths: centre (3) x unordered end pair (3 * 3); triangles: sorted triple (27, sparse).
struct Tally {
    std::array<std::uint64_t, 27> path{};
    std::array<std::uint64_t, 27> triangle{};
};

void census_range(SimpleGraph const& graph, std::span<Color const> colors, Vertex lo, Vertex hi, Tally& t)
{
    for (Vertex v = lo; v < hi; ++v) {
        auto const nb = graph.neighbors(v);
        int const cv = rank(colors[v]);
        for (std::size_t i = 0; i < nb.size(); ++i) {
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                Vertex const a = nb[i];
                Vertex const b = nb[j];
                int ca = rank(colors[a]);
                int cb = rank(colors[b]);
                if (ca > cb)
                    std::swap(ca, cb);
                if (graph.adjacent(a, b)) {
                    if (v < a) {  // a < b already, count each triangle at its smallest vertex
                        std::array<int, 3> s{cv, ca, cb};
                        std::sort(s.begin(), s.end());
                        ++t.triangle[static_cast<std::size_t>(s[0] * 9 + s[1] * 3 + s[2])];
                    }
                } else {
                    ++t.path[static_cast<std::size_t>(cv * 9 + ca * 3 + cb)];
                }
            }
        }
    }
}

}  // namespace

MotifCensus motif_census(SimpleGraph const& graph, std::span<Color const> colors, unsigned threads)
{
    if (colors.size() != graph.vertex_count())
        throw Error(ErrorKind::invariant_violation, "colouring does not cover every wallet");
    Vertex const n = static_cast<Vertex>(graph.vertex_count());
    threads = std::max(1u, std::min<unsigned>(threads, std::max<Vertex>(n, 1)));
    std::vector<Tally> tallies(threads);
    if (threads == 1) {
        census_range(graph, colors, 0, n, tallies[0]);
    } else {
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < threads; ++w) {
            Vertex const lo = static_cast<Vertex>(std::uint64_t{n} * w / threads);
            Vertex const hi = static_cast<Vertex>(std::uint64_t{n} * (w + 1) / threads);
            workers.emplace_back([&, lo, hi, w] { census_range(graph, colors, lo, hi, tallies[w]); });
        }
        for (auto& t : workers)
            t.join();
    }
    Tally sum;
    for (auto const& t : tallies) {
        for (std::size_t i = 0; i < 27; ++i) {
            sum.path[i] += t.path[i];
            sum.triangle[i] += t.triangle[i];
        }
    }
    MotifCensus census;
    auto name = [](int r) { return std::string(to_string(by_rank[static_cast<std::size_t>(r)])); };
    for (int c = 0; c < 3; ++c) {
        for (int a = 0; a < 3; ++a) {
            for (int b = a; b < 3; ++b) {
                auto const count = sum.path[static_cast<std::size_t>(c * 9 + a * 3 + b)];
                if (count > 0)
                    census.counts["path:" + name(a) + "-" + name(c) + "-" + name(b)] += count;
                census.total += count;
            }
        }
    }
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            for (int c = b; c < 3; ++c) {
                auto const count = sum.triangle[static_cast<std::size_t>(a * 9 + b * 3 + c)];
                if (count > 0)
                    census.counts["triangle:" + name(a) + "-" + name(b) + "-" + name(c)] += count;
                census.total += count;
            }
        }
    }
    return census;
}

MotifCensus motif_census(LedgerSnapshot const& snapshot, unsigned threads)
{
    auto const colors = role_colors(snapshot);
    return motif_census(SimpleGraph(snapshot), colors, threads);
}

MotifCensus motif_census(LedgerSnapshot const& snapshot, std::map<WalletId, Color> const& coloring, unsigned threads)
{
    std::vector<Color> colors;
    colors.reserve(snapshot.wallet_count());
    for (auto const& w : snapshot.wallets()) {
        auto it = coloring.find(w.id);
        if (it == coloring.end())
            throw Error(ErrorKind::invariant_violation, "no colour for wallet " + w.id.str());
        colors.push_back(it->second);
    }
    return motif_census(SimpleGraph(snapshot), colors, threads);
}

}  // namespace creditnet
