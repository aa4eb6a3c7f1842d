#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "promo/cli.hpp"
#include "promo/io.hpp"
#include "support.hpp"

using namespace promo;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("promo-test-cli-" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

CommandOptions opts(const std::string& config, const fs::path& out, const fs::path& cache) {
    CommandOptions o;
    o.config = config;
    o.out = out.string();
    o.cache_dir = cache.string();
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(int(argv.size()), argv.data());
}

} // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run({"promo"}) == kUsage);
    CHECK(run({"promo", "frobnicate"}) == kUsage);
    CHECK(run({"promo", "index", test::fixture("tiny2x5.json")}) == kUsage); // no --out
    CHECK(run({"promo", "--help"}) == kOk);
    const fs::path d = scratch_dir("usage");
    std::ostringstream log;
    CHECK(cmd_experiment("nonesuch", opts(test::fixture("ladder2.json"), d / "o", d / "c"), log) ==
          kUsage);
    CHECK(log.str().find("tbar") != std::string::npos);
}

TEST_CASE("index writes a manifest and warms the cache") {
    const fs::path d = scratch_dir("index");
    std::ostringstream a, b;
    CHECK(cmd_index(opts(test::fixture("tiny2x5.json"), d / "run1", d / "cache"), a) == kOk);
    CHECK(a.str().find("cache miss") != std::string::npos);
    CHECK(cmd_index(opts(test::fixture("tiny2x5.json"), d / "run2", d / "cache"), b) == kOk);
    CHECK(b.str().find("cache hit") != std::string::npos);
    CHECK(b.str().find("cache miss") == std::string::npos);
    const Json m = Json::parse(slurp(d / "run1" / "manifest.json"));
    CHECK(m.at("command") == "index");
    CHECK(!m.at("finished").get<std::string>().empty());
    CHECK(m.at("outputs").size() == 4);
    CHECK(slurp(d / "run1" / "index_worker0.json") == slurp(d / "run2" / "index_worker0.json"));
    CHECK(slurp(d / "run1" / "index_worker1.csv").rfind("# promo index v1", 0) == 0);
}

TEST_CASE("a malformed kernel row exits 2 and names the row") {
    const fs::path d = scratch_dir("malformed");
    Json doc = Json::parse(slurp(test::fixture("tiny2x5.json")));
    Json chain = to_json(build_brownian_belief(0.5, 0.8, 5, 1.0));
    chain["kernel"][2][2] = chain["kernel"][2][2].get<double>() - 0.1;
    doc["workers"][1]["chain"] = chain;
    write_file_synced(d / "bad.json", doc.dump());
    std::ostringstream log;
    CHECK(cmd_index(opts((d / "bad.json").string(), d / "o", d / "c"), log) == kConfigError);
    CHECK(log.str().find("worker 1") != std::string::npos);
    CHECK(log.str().find("row 2") != std::string::npos);

    write_file_synced(d / "broken.json", "{\"workers\": [");
    std::ostringstream log2;
    CHECK(cmd_simulate(opts((d / "broken.json").string(), d / "o2", d / "c"), log2) == kConfigError);
}

TEST_CASE("simulate is reproducible across reruns and thread counts") {
    const fs::path d = scratch_dir("simulate");
    CommandOptions o = opts(test::fixture("badnews2x5.json"), d / "a", d / "cache");
    o.replications = 4000;
    o.keep_traces = 20;
    std::ostringstream log;
    CHECK(cmd_simulate(o, log) == kOk);
    o.out = (d / "b").string();
    o.threads = 8;
    CHECK(cmd_simulate(o, log) == kOk);
    CHECK(slurp(d / "a" / "summary.json") == slurp(d / "b" / "summary.json"));
    CHECK(slurp(d / "a" / "traces.csv") == slurp(d / "b" / "traces.csv"));
    o.seed = 99;
    o.out = (d / "c").string();
    CHECK(cmd_simulate(o, log) == kOk);
    CHECK(slurp(d / "a" / "summary.json") != slurp(d / "c" / "summary.json"));
    CHECK(Json::parse(slurp(d / "c" / "manifest.json")).at("seed") == 99);
}

TEST_CASE("verify passes, then fails on a corrupted cache") {
    const fs::path d = scratch_dir("verify");
    CommandOptions o = opts(test::fixture("tiny2x5.json"), d / "ok", d / "cache");
    o.replications = 20000;
    o.threads = 4;
    std::ostringstream log;
    CHECK(cmd_verify(o, log) == kOk);
    CHECK(fs::exists(d / "ok" / "oracle_report.json"));
    const Json v = Json::parse(slurp(d / "ok" / "verify.json"));
    CHECK(v.at("pass") == true);

    for (const auto& e : fs::directory_iterator(d / "cache")) {
        Json t = Json::parse(slurp(e.path()));
        for (auto& s : t["states"]) s[3] = s[3].get<double>() * 1.5;
        write_file_synced(e.path(), t.dump());
    }
    o.out = (d / "bad").string();
    std::ostringstream log2;
    CHECK(cmd_verify(o, log2) == kVerifyFailed);
    CHECK(log2.str().find("cache hit") != std::string::npos);
    CHECK(log2.str().find("FAIL") != std::string::npos);

    o.family = "exotic";
    CHECK(cmd_verify(o, log2) == kConfigError);
}

TEST_CASE("verify on a large grid exits 4") {
    const fs::path d = scratch_dir("large");
    CommandOptions o = opts(test::fixture("badnews2.json"), d / "o", d / "cache");
    o.replications = 100;
    std::ostringstream log;
    CHECK(cmd_verify(o, log) == kTooLarge);
}

TEST_CASE("experiment writes its report") {
    const fs::path d = scratch_dir("experiment");
    Json doc = Json::parse(slurp(test::fixture("ladder2.json")));
    doc["experiment"]["tbar"]["delta"] = 0.01;
    write_file_synced(d / "ladder.json", doc.dump());
    CommandOptions o = opts((d / "ladder.json").string(), d / "tbar", d / "cache");
    o.replications = 20000;
    std::ostringstream log;
    CHECK(cmd_experiment("tbar", o, log) == kOk);
    const Json r = Json::parse(slurp(d / "tbar" / "report.json"));
    CHECK(r.at("experiment") == "tbar");
    CHECK(slurp(d / "tbar" / "report.csv").rfind("# promo report v1", 0) == 0);
    CHECK(log.str().find("FAIL") == std::string::npos);
}
