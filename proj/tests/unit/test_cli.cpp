#include "creditnet/hash.hpp"

#include "cli_runs.hpp"
#include "doctest.h"

#include <json.hpp>

using fixture::path;
using fixture::run_cli;

namespace fs = std::filesystem;

TEST_CASE("validate writes a report and a manifest")
{
    auto const dir = fixture::scratch_dir("validate");
    auto const r = run_cli({"validate", "--snapshot", path("example.jsonl"), "--out", dir.string()});
    REQUIRE(r.code == 0);
    auto const report = nlohmann::json::parse(fixture::slurp(dir / "validate.json"));
    CHECK(report["wallets"] == 8);
    CHECK(report["links"] == 8);
    CHECK(report["roles"]["market_maker"] == 1);

    auto const m = nlohmann::json::parse(fixture::slurp(dir / "validate.manifest.json"));
    CHECK(m["command"] == "validate");
    CHECK(m["version"] == creditnet::cli::version);
    REQUIRE(m["inputs"].size() == 1);
    CHECK(m["inputs"][0]["sha256"] == creditnet::sha256_file(path("example.jsonl")));
    REQUIRE(m["outputs"].size() == 1);
    CHECK(m["outputs"][0]["sha256"] == creditnet::sha256_hex(fixture::slurp(dir / "validate.json")));
    CHECK(m.contains("started"));
    CHECK(m.contains("finished"));
}

TEST_CASE("exit codes")
{
    auto const dir = fixture::scratch_dir("codes");
    auto const out = dir.string();

    auto const bad_gateway =
        run_cli({"stuck-credit", "--snapshot", path("example.jsonl"), "--gateway", "Alice", "--out", out});
    CHECK(bad_gateway.code == 1);
    CHECK(bad_gateway.err.find("NotAGateway") != std::string::npos);

    auto const missing = run_cli({"validate", "--snapshot", (dir / "absent.jsonl").string(), "--out", out});
    CHECK(missing.code == 1);

    auto const unknown = run_cli({"metrics", "--snapshot", path("example.jsonl"), "--bogus", "3", "--other"});
    CHECK(unknown.code == 2);
    CHECK(unknown.err == "usage error: unknown option --bogus\nusage error: unknown option --other\n");

    CHECK(run_cli({"metrics"}).code == 2);  // missing --snapshot
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"metrics", "--snapshot", path("example.jsonl"), "--format", "xml"}).code == 2);

    auto const help = run_cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("stale-offers") != std::string::npos);
    CHECK(run_cli({"--version"}).out == std::string(creditnet::cli::version) + "\n");

    // Several currencies without a common target is a configuration error.
    CHECK(run_cli({"liquidity", "--snapshot", path("example.jsonl"), "--currencies", "USD,EUR", "--out", out}).code ==
          2);
}

TEST_CASE("g13-shaped fixture keeps the average degree")
{
    auto const dir = fixture::scratch_dir("g13");
    REQUIRE(run_cli({"metrics", "--snapshot", path("g13-shape.jsonl"), "--out", dir.string()}).code == 0);
    auto const report = nlohmann::json::parse(fixture::slurp(dir / "metrics.json"));
    CHECK(report["avg_degree"].get<double>() == doctest::Approx(3.68).epsilon(0.05 / 3.68));
}

TEST_CASE("settle reports failures per request")
{
    auto const dir = fixture::scratch_dir("settle");
    auto const r = run_cli({"settle", "--snapshot", path("example.jsonl"), "--requests", path("example-requests.jsonl"),
                            "--out", dir.string()});
    REQUIRE(r.code == 0);
    auto const report = nlohmann::json::parse(fixture::slurp(dir / "settle.json"));
    CHECK(report["settled"] == 3);
    REQUIRE(report["failed"].size() == 1);
    CHECK(report["failed"][0]["request"] == 4);
    CHECK(report["failed"][0]["error"] == "NoPath");
    CHECK(fs::exists(dir / "settle.txlog.jsonl"));
    CHECK(fs::exists(dir / "settle.snapshot.jsonl"));
    CHECK(fixture::slurp(dir / "settle.txlog.jsonl") == fixture::slurp(path("example-txlog.jsonl")));

    auto const strict = run_cli({"settle", "--snapshot", path("example.jsonl"), "--requests",
                                 path("example-requests.jsonl"), "--stop-on-error", "--out", dir.string()});
    CHECK(strict.code == 1);
}

TEST_CASE("stale offers end to end")
{
    auto const dir = fixture::scratch_dir("stale");
    auto const runs = fixture::every_subcommand();
    auto const& stale = runs.back();
    REQUIRE(fixture::run_in(stale, dir).code == 0);
    auto const report = nlohmann::json::parse(fixture::slurp(dir / "stale-offers.json"));
    CHECK(report["at_risk_total"] == "300");
    CHECK(report["exploiting_wallets"] == 3);
    CHECK(report["realized_gains"] == "299.9997");
    CHECK(fixture::slurp(dir / "stale-offers.csv").rfind("timestamp,tx_rate,reference_rate,side\n", 0) == 0);
}

TEST_CASE("every subcommand is deterministic in both formats")
{
    for (auto const& run : fixture::every_subcommand()) {
        for (char const* format : {"json", "csv"}) {
            CAPTURE(run.command);
            CAPTURE(format);
            auto const a = fixture::scratch_dir("det-a");
            auto const b = fixture::scratch_dir("det-b");
            auto const ra = fixture::run_in(run, a, {"--format", format});
            auto const rb = fixture::run_in(run, b, {"--format", format});
            REQUIRE_MESSAGE(ra.code == 0, ra.err);
            REQUIRE(rb.code == 0);
            auto const fa = fixture::reports(a);
            CHECK(!fa.empty());
            CHECK(fa == fixture::reports(b));
        }
    }
}

TEST_CASE("thread count does not change reports")
{
    auto const runs = fixture::every_subcommand();
    for (auto const& name : {"motifs", "liquidity"}) {
        auto const& run = *std::find_if(runs.begin(), runs.end(), [&](auto const& r) { return r.command == name; });
        auto const a = fixture::scratch_dir("thr-a");
        auto const b = fixture::scratch_dir("thr-b");
        REQUIRE(fixture::run_in(run, a, {"--threads", "1"}).code == 0);
        REQUIRE(fixture::run_in(run, b, {"--threads", "4"}).code == 0);
        CHECK(fixture::reports(a) == fixture::reports(b));
    }
}
