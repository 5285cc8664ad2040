#include "creditnet/error.hpp"
#include "creditnet/metrics.hpp"
#include "creditnet/random.hpp"
#include "creditnet/synth.hpp"

#include "doctest.h"
#include "example_network.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <set>

using namespace creditnet;

namespace {

using Edges = std::vector<std::pair<Vertex, Vertex>>;

SimpleGraph clique(Vertex n, Vertex offset = 0, Edges* out = nullptr)
{
    Edges e;
    for (Vertex a = 0; a < n; ++a) {
        for (Vertex b = a + 1; b < n; ++b)
            e.emplace_back(offset + a, offset + b);
    }
    if (out)
        out->insert(out->end(), e.begin(), e.end());
    return SimpleGraph::from_edges(offset + n, e);
}

SimpleGraph barbell(Vertex half)
{
    Edges e;
    clique(half, 0, &e);
    clique(half, half, &e);
    e.emplace_back(0, half);
    return SimpleGraph::from_edges(2 * half, e);
}

SimpleGraph random_graph(Rng& rng, Vertex n, double p)
{
    Edges e;
    for (Vertex a = 0; a < n; ++a) {
        for (Vertex b = a + 1; b < n; ++b) {
            if (rng.chance(p))
                e.emplace_back(a, b);
        }
    }
    return SimpleGraph::from_edges(n, e);
}

// Keeps `digits` significant digits, dropping the rest.
double truncate_to(double x, int digits)
{
    double const scale = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(x))));
    return std::floor(x * scale + 1e-9) / scale;
}

// Dense oracle: second-largest eigenvalue of the lazy walk via Eigen.
double eigen_slem(SimpleGraph const& g)
{
    auto const n = static_cast<Eigen::Index>(g.vertex_count());
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n) * 0.5;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        for (Vertex u : g.neighbors(v))
            s(v, u) += 0.5 / std::sqrt(static_cast<double>(g.degree(u) * g.degree(v)));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
    auto const values = solver.eigenvalues();  // ascending
    double mu = 0;
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        mu = std::max(mu, std::abs(values(i)));
    return mu;
}

}  // namespace

TEST_CASE("published average degree and density follow from wallet and link counts")
{
    struct Row {
        std::size_t v, e;
        double degree, density;
    };
    Row const rows[] = {{14657, 26969, 3.68, 12e-5},
                        {40051, 82305, 4.11, 5.1e-5},
                        {61173, 119790, 3.91, 3.2e-5},
                        {96953, 190675, 3.93, 2.0e-5},
                        {181233, 352420, 3.88, 1.0e-5}};
    for (auto const& r : rows) {
        CAPTURE(r.v);
        CHECK(truncate_to(average_degree(r.v, r.e), 3) == doctest::Approx(r.degree).epsilon(1e-12));
        CHECK(truncate_to(density(r.v, r.e), 2) == doctest::Approx(r.density).epsilon(1e-12));
    }
    // Nearest rounding would print 3.89 and 1.1e-5 for the last row.
    CHECK(std::round(average_degree(181233, 352420) * 100) / 100 == doctest::Approx(3.89));
}

TEST_CASE("basic metrics on small graphs")
{
    auto const tri = basic_metrics(clique(3), 3);
    CHECK(tri.clustering == doctest::Approx(1.0));
    CHECK(tri.transitivity == doctest::Approx(1.0));
    CHECK(tri.avg_degree == doctest::Approx(2.0));
    CHECK(tri.density == doctest::Approx(0.5));

    Edges p4{{0, 1}, {1, 2}, {2, 3}};
    auto const path = basic_metrics(SimpleGraph::from_edges(4, p4), 3);
    // Hand Pearson over the six ordered endpoint pairs.
    CHECK(path.assortativity == doctest::Approx(-0.5));
    CHECK(path.clustering == doctest::Approx(0.0));

    Edges star{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
    CHECK(degree_assortativity(SimpleGraph::from_edges(5, star)) == doctest::Approx(-1.0));
    CHECK(degree_assortativity(clique(5)) == 0.0);

    // Triangle with a pendant: local (1 + 1 + 1/3 + 0) / 4, global 3/5.
    Edges paw{{0, 1}, {1, 2}, {0, 2}, {2, 3}};
    auto const m = basic_metrics(SimpleGraph::from_edges(4, paw), 4);
    CHECK(m.clustering == doctest::Approx((1 + 1 + 1.0 / 3) / 4));
    CHECK(m.transitivity == doctest::Approx(3.0 / 5));
}

TEST_CASE("snapshot metrics count directed pairs once across currencies")
{
    auto parts = fixture::example_parts();
    parts.links.push_back(fixture::link("Bitstamp", "Alice", "EUR", "0", "inf"));
    parts.links.push_back(fixture::link("Alice", "Bitstamp", "BTC", "0", "inf"));
    auto const s = LedgerSnapshot::make(parts);
    auto const m = basic_metrics(s);
    CHECK(m.n_wallets == 8);
    CHECK(m.n_simple_edges == 8);
    CHECK(m.n_links == 9);
    CHECK(m.density == doctest::Approx(9.0 / 56));
    CHECK_THROWS_AS(basic_metrics(LedgerSnapshot::make({})), Error);
}

TEST_CASE("lazy walk second eigenvalue matches a dense solver")
{
    // K4: walk eigenvalues 1 and -1/3, lazy (1 - 1/3) / 2 = 1/3.
    CHECK(lazy_walk_slem(clique(4)) == doctest::Approx(1.0 / 3).epsilon(1e-9));
    double const k4 = mixing_time_lower_bound(clique(4), 0.1);
    CHECK(k4 == doctest::Approx(0.25 * std::log(5.0)).epsilon(1e-9));

    Rng rng(5);
    int checked = 0;
    for (int t = 0; t < 40; ++t) {
        auto const g = random_graph(rng, 4 + static_cast<Vertex>(rng.below(20)), 0.35);
        if (connected_components(g).sizes.size() != 1)
            continue;
        CHECK(lazy_walk_slem(g) == doctest::Approx(eigen_slem(g)).epsilon(1e-6));
        ++checked;
    }
    CHECK(checked > 10);
    CHECK(lazy_walk_slem(barbell(10)) == doctest::Approx(eigen_slem(barbell(10))).epsilon(1e-6));
    CHECK(lazy_walk_slem(SimpleGraph::from_edges(2, Edges{{0, 1}})) == doctest::Approx(0.0));
}

TEST_CASE("mixing bound behaviour")
{
    auto const g = barbell(10);
    CHECK(mixing_time_lower_bound(g, 0.25) < mixing_time_lower_bound(g, 0.05));
    CHECK(mixing_time_lower_bound(clique(20), 0.1) < mixing_time_lower_bound(barbell(10), 0.1));
    for (Vertex n = 6; n <= 40; n += 2)
        CHECK(mixing_time_lower_bound(clique(n), 0.1) < mixing_time_lower_bound(barbell(n / 2), 0.1));

    CHECK_THROWS_AS(mixing_time_lower_bound(g, 0.5), Error);
    CHECK_THROWS_AS(mixing_time_lower_bound(g, 0.0), Error);
    Edges two{{0, 1}, {2, 3}};
    try {
        mixing_time_lower_bound(SimpleGraph::from_edges(4, two), 0.1);
        FAIL("expected Disconnected");
    } catch (Error const& e) {
        CHECK(e.kind() == ErrorKind::disconnected);
    }
    try {
        lazy_walk_slem(barbell(10), 1e-30, 3);
        FAIL("expected ConvergenceFailure");
    } catch (Error const& e) {
        CHECK(e.kind() == ErrorKind::convergence_failure);
    }
}

TEST_CASE("louvain on two cliques joined by an edge")
{
    Edges e;
    clique(5, 0, &e);
    clique(5, 5, &e);
    e.emplace_back(4, 5);
    auto const g = SimpleGraph::from_edges(10, e);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto const a = louvain(g, 1.0, seed);
        CHECK(a.count() == 2);
        for (Vertex v = 0; v < 10; ++v)
            CHECK(a.community[v] == (v < 5 ? 0u : 1u));
        // Direct evaluation: each side has 10 internal edges, 21 in total,
        // degree sums 21 per side.
        double const direct = 2 * (10.0 / 21 - (21.0 / 42) * (21.0 / 42));
        CHECK(a.modularity == doctest::Approx(direct));
        CHECK(modularity(g, a.community) == doctest::Approx(direct));
        for (std::size_t i = 1; i < a.pass_modularity.size(); ++i)
            CHECK(a.pass_modularity[i] >= a.pass_modularity[i - 1] - 1e-12);
    }
    auto const six = louvain(clique(6), 1.0, 3);
    CHECK(six.count() == 1);
}

TEST_CASE("louvain is deterministic and a local-move fixed point")
{
    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
        auto const g = random_graph(rng, 30, 0.12);
        auto const a = louvain(g, 1.0, 99);
        auto const b = louvain(g, 1.0, 99);
        CHECK(a.community == b.community);
        double const q = modularity(g, a.community);
        CHECK(q == doctest::Approx(a.modularity));
        // No single-vertex move into a neighbouring community improves Q.
        auto comm = a.community;
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
            std::set<std::uint32_t> targets;
            for (Vertex u : g.neighbors(v))
                targets.insert(comm[u]);
            auto const own = comm[v];
            for (auto c : targets) {
                comm[v] = c;
                CHECK(modularity(g, comm) <= q + 1e-9);
            }
            comm[v] = own;
        }
    }
}

TEST_CASE("louvain separates synthetic gateway stars")
{
    SynthConfig cfg;
    cfg.n_gateways = 3;
    cfg.users_per_gateway = 10;
    cfg.inter_gateway_links = 3;
    cfg.seed = 1;
    auto const s = generate_synthetic(cfg);
    auto const a = louvain(s, 0.45, 7);
    CHECK(a.count() >= 3);
    std::map<std::uint32_t, int> gateways;
    for (std::size_t i = 0; i < s.wallet_count(); ++i) {
        if (s.wallets()[i].role == Role::gateway)
            ++gateways[a.community[i]];
    }
    CHECK(gateways.size() == 3);
    for (auto const& [_, n] : gateways)
        CHECK(n == 1);
}

TEST_CASE("motif census on small shapes")
{
    Edges star{{0, 1}, {0, 2}, {0, 3}};
    std::vector<Color> colors{Color::G, Color::U, Color::U, Color::U};
    auto const c = motif_census(SimpleGraph::from_edges(4, star), colors);
    CHECK(c.total == 3);
    CHECK(c.counts.at("path:U-G-U") == 3);
    CHECK(c.frequencies().at("path:U-G-U") == doctest::Approx(1.0));
    CHECK(c.most_frequent() == "path:U-G-U");

    std::vector<Color> users(3, Color::U);
    auto const t = motif_census(clique(3), users);
    CHECK(t.total == 1);
    CHECK(t.counts.at("triangle:U-U-U") == 1);

    auto const fig = motif_census(fixture::example_network());
    double sum = 0;
    for (auto const& [_, f] : fig.frequencies())
        sum += f;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("motif census equals brute-force triple enumeration")
{
    Rng rng(23);
    for (int t = 0; t < 200; ++t) {
        Vertex const n = 3 + static_cast<Vertex>(rng.below(10));
        auto const g = random_graph(rng, n, 0.4);
        std::vector<Color> colors;
        for (Vertex v = 0; v < n; ++v)
            colors.push_back(static_cast<Color>(rng.below(3)));

        std::map<std::string, std::uint64_t> expected;
        std::uint64_t total = 0;
        auto nm = [&](Vertex v) { return std::string(to_string(colors[v])); };
        for (Vertex a = 0; a < n; ++a) {
            for (Vertex b = a + 1; b < n; ++b) {
                for (Vertex c = b + 1; c < n; ++c) {
                    int const edges = g.adjacent(a, b) + g.adjacent(b, c) + g.adjacent(a, c);
                    if (edges < 2)
                        continue;
                    ++total;
                    if (edges == 3) {
                        std::vector<std::string> s{nm(a), nm(b), nm(c)};
                        std::sort(s.begin(), s.end());
                        ++expected["triangle:" + s[0] + "-" + s[1] + "-" + s[2]];
                    } else {
                        Vertex centre = !g.adjacent(b, c) ? a : !g.adjacent(a, c) ? b : c;
                        std::vector<std::string> ends;
                        for (Vertex v : {a, b, c}) {
                            if (v != centre)
                                ends.push_back(nm(v));
                        }
                        std::sort(ends.begin(), ends.end());
                        ++expected["path:" + ends[0] + "-" + nm(centre) + "-" + ends[1]];
                    }
                }
            }
        }
        auto const got = motif_census(g, colors);
        CHECK(got.total == total);
        CHECK(got.counts == expected);
        CHECK(motif_census(g, colors, 3).counts == got.counts);
    }
}
