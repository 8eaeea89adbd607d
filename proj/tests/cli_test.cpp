#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>

#include "crossaug/cli.hpp"
#include "support/test_support.hpp"

namespace crossaug {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, std::string input = {},
        std::optional<std::string> env_url = std::nullopt) {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = cli::run(args, {in, out, err, std::move(env_url)});
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("crossaug-cli-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" +
           ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name), std::ios::binary) << text;
  }

  fs::path dir;
  const std::string desk = testing::data_path("desk_corpus.jsonl");
};

TEST_F(CliTest, AugmentDeskCorpusMatchesGolden) {
  auto r = run({"augment", "--in", desk, "--out", path("out.jsonl"), "--report", path("report.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(testing::read_file(path("out.jsonl")),
            testing::read_file(testing::data_path("desk_augmented.golden.jsonl")));
  EXPECT_EQ(testing::read_file(path("report.txt")),
            testing::read_file(testing::data_path("desk_stats.golden.txt")));
  EXPECT_EQ(r.err, "augmentation ratio (original:augmented) 1:2.05\n");
  EXPECT_FALSE(fs::exists(path("out.jsonl.tmp")));
}

TEST_F(CliTest, AugmentStdinToStdoutReportsOnStderr) {
  auto r = run({"augment", "--in", "-", "--out", "-"}, testing::read_file(desk));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, testing::read_file(testing::data_path("desk_augmented.golden.jsonl")));
  EXPECT_EQ(r.err, testing::read_file(testing::data_path("desk_stats.golden.txt")) +
                       "augmentation ratio (original:augmented) 1:2.05\n");
}

TEST_F(CliTest, AugmentFlags) {
  auto r = run({"augment", "--in", desk, "--out", "-", "--tau", "0", "--no-keep-originals",
                "--concurrency", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto parsed = parse_records(r.out).dataset;
  EXPECT_EQ(parsed.size(), 85u);
  for (const auto& s : parsed.samples) EXPECT_EQ(s.provenance, Provenance::kNegClaim);
  EXPECT_NE(r.err.find("full=0\n"), std::string::npos);
}

TEST_F(CliTest, CustomLexicon) {
  write("lex.tsv", "rose\tfell\n");
  write("in.jsonl", R"({"id":"a","claim":"Prices rose.","evidence":"Prices rose again.","label":"SUP"})"
                    "\n");
  auto r = run({"augment", "--in", path("in.jsonl"), "--out", "-", "--lexicon", path("lex.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(R"("evidence":"Prices fell again.")"), std::string::npos);

  write("bad.tsv", "rose fell\n");
  EXPECT_EQ(run({"augment", "--in", path("in.jsonl"), "--out", "-", "--lexicon", path("bad.tsv")}).code, 2);
  EXPECT_EQ(run({"augment", "--in", path("in.jsonl"), "--out", "-", "--lexicon", path("none.tsv")}).code, 2);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"augment", "--in", desk}).code, 2);
  EXPECT_EQ(run({"augment", "--in", desk, "--out", "-", "--tau", "-1"}).code, 2);
  EXPECT_EQ(run({"augment", "--in", desk, "--out", "-", "--threshold-strategy", "sum"}).code, 2);
  EXPECT_EQ(run({"augment", "--in", desk, "--out", "-", "--concurrency", "0"}).code, 2);
  EXPECT_EQ(run({"augment", "--in", desk, "--out", "-", "--generator", "https://x"}).code, 2);
  EXPECT_EQ(run({"subsample", "--in", desk, "--out", "-", "--fraction", "2", "--seed", "1"}).code, 2);
  EXPECT_EQ(run({"subsample", "--in", desk, "--out", "-", "--fraction", "0.5"}).code, 2);
  EXPECT_EQ(run({"validate"}).code, 2);
  auto help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("augment"), std::string::npos);
}

TEST_F(CliTest, DataErrors) {
  EXPECT_EQ(run({"augment", "--in", path("missing.jsonl"), "--out", "-"}).code, 1);
  write("broken.jsonl", "{\"id\":\"a\"}\n");
  auto r = run({"augment", "--in", path("broken.jsonl"), "--out", path("o.jsonl")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 1"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("o.jsonl")));
  EXPECT_EQ(run({"subsample", "--in", "-", "--out", "-", "--fraction", "0.5", "--seed", "1"}).code, 1);
}

TEST_F(CliTest, AugmentRejectsAlreadyAugmentedInput) {
  EXPECT_EQ(run({"augment", "--in", testing::data_path("desk_augmented.golden.jsonl"), "--out", "-"}).code, 1);
}

TEST_F(CliTest, ValidateLabelRule) {
  write("bad.jsonl",
        R"({"id":"a","claim":"c","evidence":"e","label":"SUP","provenance":"ORIGINAL","origin_id":"a"})"
        "\n"
        R"({"id":"a#nc","claim":"not c","evidence":"e","label":"SUP","provenance":"NEG_CLAIM","origin_id":"a"})"
        "\n");
  auto r = run({"validate", "--in", path("bad.jsonl")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("augmented claim-only sample must be REF"), std::string::npos);

  auto ok = run({"validate", "--in", testing::data_path("desk_augmented.golden.jsonl")});
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(ok.out, "ok: 305 samples\n");
}

TEST_F(CliTest, ValidateReportsParseRejections) {
  auto r = run({"validate", "--in", "-"},
               R"({"id":"a","claim":"c","evidence":"e","label":"MAYBE"})"
               "\n");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out.rfind("line 1: ", 0), 0u);
}

TEST_F(CliTest, SubsampleIdentityIsByteIdentical) {
  auto r = run({"subsample", "--in", desk, "--out", path("sub.jsonl"), "--fraction", "1.0", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(testing::read_file(path("sub.jsonl")), testing::read_file(desk));
}

TEST_F(CliTest, SubsampleIsDeterministicAndWarns) {
  auto a = run({"subsample", "--in", desk, "--out", "-", "--fraction", "0.01", "--seed", "3"});
  auto b = run({"subsample", "--in", desk, "--out", "-", "--fraction", "0.01", "--seed", "3"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  // Desk corpus: 95 SUP, 3 REF, 2 NEI; REF and NEI round to 0.
  EXPECT_EQ(parse_records(a.out).dataset.size(), 1u);
  EXPECT_NE(a.err.find("warning: class REF"), std::string::npos);
}

TEST_F(CliTest, Stats) {
  auto r = run({"stats", "--in", testing::data_path("desk_augmented.golden.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "samples=305\nlabel_sup=155\nlabel_ref=148\nlabel_nei=2\n"
            "provenance_original=100\nprovenance_neg_claim=85\n"
            "provenance_pos_claim_neg_evidence=60\nprovenance_neg_claim_neg_evidence=60\n"
            "originals=100\nsup_originals=95\nclaim_only=25\nfull=60\n"
            "augmented_total=205\nratio=2.05\n");
  auto empty = run({"stats", "--in", "-"});
  EXPECT_EQ(empty.code, 0);
  EXPECT_NE(empty.out.find("ratio=n/a\n"), std::string::npos);
}

TEST_F(CliTest, PipeComposition) {
  auto aug = run({"augment", "--in", desk, "--out", "-"});
  auto stats = run({"stats", "--in", "-"}, aug.out);
  EXPECT_NE(stats.out.find("augmented_total=205\n"), std::string::npos);
  auto val = run({"validate", "--in", "-"}, aug.out);
  EXPECT_EQ(val.code, 0);
}

TEST_F(CliTest, RemoteAbortExitsThreeWithoutOutput) {
  httplib::Server server;
  server.Post("/negate", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const std::string url = "http://127.0.0.1:" + std::to_string(port);

  auto r = run({"augment", "--in", desk, "--out", path("o.jsonl"), "--generator", url});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(fs::exists(path("o.jsonl")));
  EXPECT_NE(r.err.find("skipped_failed="), std::string::npos);

  // The environment variable supplies the default endpoint.
  auto env = run({"augment", "--in", desk, "--out", "-"}, {}, url);
  EXPECT_EQ(env.code, 3);
  // --generator rule overrides it.
  auto rule = run({"augment", "--in", desk, "--out", "-", "--generator", "rule"}, {}, url);
  EXPECT_EQ(rule.code, 0);

  server.stop();
  t.join();
}

TEST_F(CliTest, RemoteGeneratorEndToEnd) {
  httplib::Server server;
  server.Post("/v1/negate", [](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    std::string claim = body["claim"];
    if (auto at = claim.find(" rose"); at != std::string::npos) claim.replace(at, 5, " fell");
    res.set_content(nlohmann::json{{"id", body["id"]}, {"negative_claim", claim}}.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  write("in.jsonl",
        R"({"id":"a","claim":"Prices rose.","evidence":"Prices rose in May.","label":"SUP"})"
        "\n"
        R"({"id":"b","claim":"Nothing here.","evidence":"x","label":"SUP"})"
        "\n");
  auto r = run({"augment", "--in", path("in.jsonl"), "--out", "-", "--generator",
                "http://127.0.0.1:" + std::to_string(port) + "/v1", "--timeout-ms", "5000"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("full=1\n"), std::string::npos);
  EXPECT_NE(r.err.find("skipped_unchanged=1\n"), std::string::npos);
  EXPECT_NE(r.out.find(R"("evidence":"Prices fell in May.")"), std::string::npos);

  server.stop();
  t.join();
}

} // namespace
} // namespace crossaug
