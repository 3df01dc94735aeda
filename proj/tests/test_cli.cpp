#include <gtest/gtest.h>

#include <chrono>
#include <sstream>

#include "logplag/cli.hpp"

using namespace logplag;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("logplag_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& s) {
    std::ofstream(p, std::ios::binary) << s;
}

std::string jsonl(const std::vector<std::pair<std::string, int>>& counts) {
    std::string s;
    for (const auto& [cmd, n] : counts)
        for (int i = 0; i < n; ++i) s += R"({"cmd":")" + cmd + "\"}\n";
    return s;
}

// Three logs in one directory plus a manifest.
fs::path three_logs(const fs::path& dir) {
    write(dir / "alice.jsonl", jsonl({{"Type", 40}, {"Save", 5}, {"Run", 3}}));
    write(dir / "bob.jsonl", jsonl({{"Type", 35}, {"Save", 7}, {"Debug", 2}}));
    write(dir / "carol.csv", "t,cmd\n1,Type\n2,Type\n3,Paste\n");
    write(dir / "manifest.json",
          R"({"logs":[{"path":"alice.jsonl"},{"path":"bob.jsonl"},{"path":"carol.csv"}]})");
    return dir / "manifest.json";
}

// A synthetic corpus written through the CLI, with one exact copy planted.
fs::path planted_corpus(const fs::path& dir) {
    EXPECT_EQ(run({"forge", "--honest", "20", "--types", "60", "--seed", "5", "--out", dir.string()}).code, 0);
    fs::copy_file(dir / "log_007.jsonl", dir / "plant.jsonl");
    auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
    m["logs"].push_back({{"id", "plant"}, {"path", "plant.jsonl"}, {"format", "jsonl"}});
    write(dir / "manifest.json", m.dump());
    return dir / "manifest.json";
}

}  // namespace

TEST(Ingest, SummarizesThreeLogs) {
    TempDir d;
    const auto r = run({"ingest", three_logs(d.path).string(), "--out", (d.path / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("logs: 3"), std::string::npos);
    EXPECT_NE(r.out.find("command types: 5"), std::string::npos);
    for (const char* id : {"alice,48,3", "bob,44,3", "carol,3,2"}) EXPECT_NE(r.out.find(id), std::string::npos) << id;
    EXPECT_TRUE(fs::exists(d.path / "out" / "corpus.json"));
    EXPECT_TRUE(fs::exists(d.path / "out" / "stats.csv"));
}

TEST(Ingest, FilterShortListsTheStub) {
    TempDir d;
    const auto r = run({"ingest", three_logs(d.path).string(), "--filter-short", "0.2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("removed: carol (total 3)"), std::string::npos);
    EXPECT_NE(r.out.find("logs: 2"), std::string::npos);
}

TEST(Ingest, BadPathFails) {
    const auto r = run({"ingest", "/nonexistent/manifest.json"});
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("/nonexistent/manifest.json"), std::string::npos);
}

TEST(Ingest, ParseErrorFailsWithLine) {
    TempDir d;
    three_logs(d.path);
    write(d.path / "bob.jsonl", "{\"cmd\":\"Type\"}\nnot json\n");
    const auto r = run({"ingest", (d.path / "manifest.json").string()});
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST(Detect, PlantIsTopPair) {
    TempDir d;
    const auto m = planted_corpus(d.path);
    const auto r = run({"detect", m.string(), "--seed", "1", "--out", (d.path / "rep").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("seed: 1\n"), std::string::npos);
    EXPECT_NE(r.out.find("rank,id_a,id_b,cor,identical\n1,log_007,plant,1,"), std::string::npos) << r.out;
    for (const char* f : {"pairs.csv", "outliers.csv", "contributions.csv"})
        EXPECT_TRUE(fs::exists(d.path / "rep" / f)) << f;
}

TEST(Detect, TopKRows) {
    TempDir d;
    const auto m = planted_corpus(d.path);
    const auto r = run({"detect", m.string(), "--seed", "1", "--top-k", "10", "--subsets", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto section = [&](const std::string& header) {
        std::istringstream in(r.out.substr(r.out.find(header) + header.size()));
        int rows = 0;
        std::string line;
        while (std::getline(in, line) && !line.empty() && std::isdigit(static_cast<unsigned char>(line[0]))) ++rows;
        return rows;
    };
    EXPECT_EQ(section("rank,id_a,id_b,cor,identical\n"), 10);
    EXPECT_EQ(section("rank,log_id,out\n"), 10);
}

TEST(Detect, SameSeedSameFiles) {
    TempDir d;
    const auto m = planted_corpus(d.path);
    for (const char* fmt : {"csv", "json"}) {
        ASSERT_EQ(run({"detect", m.string(), "--seed", "77", "--format", fmt, "--out", (d.path / "a").string()}).code,
                  0);
        ASSERT_EQ(run({"detect", m.string(), "--seed", "77", "--format", fmt, "--jobs", "3", "--out",
                       (d.path / "b").string()})
                      .code,
                  0);
    }
    for (const char* f : {"pairs.csv", "outliers.csv", "pairs.json", "outliers.json", "contributions.csv"})
        EXPECT_EQ(slurp(d.path / "a" / f), slurp(d.path / "b" / f)) << f;
}

TEST(Detect, UnseededRunPrintsItsSeed) {
    TempDir d;
    const auto m = planted_corpus(d.path);
    const auto r = run({"detect", m.string(), "--subsets", "10", "--out", (d.path / "a").string()});
    ASSERT_EQ(r.code, 0);
    const auto pos = r.out.find("seed: ");
    ASSERT_EQ(pos, 0u);
    const auto seed = r.out.substr(6, r.out.find('\n') - 6);
    ASSERT_EQ(run({"detect", m.string(), "--subsets", "10", "--seed", seed, "--out", (d.path / "b").string()}).code,
              0);
    EXPECT_EQ(slurp(d.path / "a" / "pairs.csv"), slurp(d.path / "b" / "pairs.csv"));
}

TEST(Detect, UsageErrors) {
    TempDir d;
    const auto m = three_logs(d.path);
    EXPECT_EQ(run({"detect", m.string(), "--subset-size", "3"}).code, 2);
    EXPECT_EQ(run({"detect", m.string(), "--format", "xml"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Forge, RemoveTypesHalves) {
    TempDir d;
    write(d.path / "src.jsonl", jsonl({{"A", 1}, {"B", 2}, {"C", 3}, {"D", 4}, {"E", 5}, {"F", 6}, {"G", 7}}));
    const auto r = run({"forge", "--log", (d.path / "src.jsonl").string(), "--remove-types", "0.5", "--seed", "3",
                        "--out", (d.path / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto c = load_corpus(read_manifest(d.path / "out" / "forged.json"));
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].num_types(), 7u - 3u);
}

TEST(Forge, PerturbVariantsWritesHundredFiles) {
    TempDir d;
    const auto m = three_logs(d.path);
    const auto r = run({"forge", "--from", m.string(), "--id", "alice", "--perturb", "3", "--variants", "100",
                        "--seed", "4", "--out", (d.path / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(d.path / "out")) files += e.path().extension() == ".jsonl";
    EXPECT_EQ(files, 100u);
    const auto c = load_corpus(read_manifest(d.path / "out" / "forged.json"));
    EXPECT_EQ(c.size(), 100u);
    for (const auto& h : c)
        for (const auto& [cmd, n] : h.counts()) {
            const double old = cmd == "Type" ? 40 : cmd == "Save" ? 5 : 3;
            EXPECT_GE(n, old / 3 - 1);
            EXPECT_LE(n, old * 3 + 1);
        }
}

TEST(Forge, ScratchCopyPasteIsTiny) {
    TempDir d;
    const auto m = planted_corpus(d.path);
    const auto r = run({"forge", "--from", m.string(), "--scratch", "copy-paste", "--variants", "5", "--seed", "2",
                        "--out", (d.path / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto c = load_corpus(read_manifest(d.path / "out" / "forged.json"));
    ASSERT_EQ(c.size(), 5u);
    for (const auto& h : c) {
        EXPECT_LE(h.num_types(), 5u);
        EXPECT_LE(h.total(), 10);
    }
}

TEST(Forge, UsageErrors) {
    TempDir d;
    const auto m = three_logs(d.path);
    const auto out = (d.path / "out").string();
    EXPECT_EQ(run({"forge", "--from", m.string(), "--id", "alice", "--out", out}).code, 2);
    EXPECT_EQ(run({"forge", "--from", m.string(), "--id", "alice", "--perturb", "2", "--remove-types", "0.5", "--out",
                   out})
                  .code,
              2);
    EXPECT_NE(run({"forge", "--from", m.string(), "--id", "alice", "--perturb", "0.5", "--out", out}).code, 0);
    EXPECT_NE(run({"forge", "--from", m.string(), "--scratch", "huge", "--out", out}).code, 0);
    EXPECT_NE(run({"forge", "--from", m.string(), "--id", "nobody", "--perturb", "2", "--out", out}).code, 0);
}

TEST(Evaluate, EmptyGridIsAUsageError) {
    TempDir d;
    write(d.path / "cfg.json", R"({"removal_fractions": []})");
    const auto r = run({"evaluate", (d.path / "cfg.json").string(), "--out", (d.path / "res").string()});
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("config.removal_fractions"), std::string::npos) << r.err;
}

TEST(Evaluate, RerunGivesIdenticalResults) {
    TempDir d;
    write(d.path / "cfg.json", R"({
        "corpus": {"synthetic": {"n_logs": 15, "n_command_types": 50}},
        "subset_sizes": [2],
        "removal_fractions": [0.5],
        "change_factors": [3],
        "variants_per_log": 1,
        "outlier_variants_per_log": 1,
        "scratch_base_logs": 1,
        "scratch_variants": 5
    })");
    const auto a = run({"evaluate", (d.path / "cfg.json").string(), "--seed", "6", "--out", (d.path / "a").string()});
    const auto b = run({"evaluate", (d.path / "cfg.json").string(), "--seed", "6", "--out", (d.path / "b").string()});
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(slurp(d.path / "a" / "results.csv"), slurp(d.path / "b" / "results.csv"));
    EXPECT_EQ(slurp(d.path / "a" / "results.json"), slurp(d.path / "b" / "results.json"));
}

TEST(Evaluate, BundledDeskConfigUnderAMinute) {
    TempDir d;
    const auto start = std::chrono::steady_clock::now();
    const auto r = run({"evaluate", std::string(LOGPLAG_SOURCE_DIR) + "/configs/desk_scale.json", "--out",
                        (d.path / "res").string()});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(secs, 60.0);
    const auto table = table_from_json(slurp(d.path / "res" / "results.json"));
    EXPECT_EQ(table.rows.size(), 4u * 14u + 15u + 4u);
}
