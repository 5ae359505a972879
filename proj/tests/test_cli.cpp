#include <doctest.h>

#include <cstdlib>
#include <json.hpp>

#include "fixtures.hpp"
#include "workspace.hpp"

using stylus::testing::make_workspace;
using stylus::testing::read_file;

namespace {

int run(const std::string& args, const std::filesystem::path& err) {
    const std::string cmd = std::string(STYLUS_CLI_PATH) + " " + args + " 2> \"" + err.string() + "\" > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quoted(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("missing corpus reports the ingest stage") {
        const auto ws = make_workspace("cli_missing");
        std::filesystem::remove(ws.dir / "federalist.txt");
        const auto err = ws.dir / "stderr.txt";
        CHECK(run("--config " + quoted(ws.config) + " pipeline", err) != 0);
        const auto text = read_file(err);
        const auto at = text.find("{\"error\"");
        REQUIRE(at != std::string::npos);
        const auto j = nlohmann::json::parse(text.substr(at, text.find('\n', at) - at));
        CHECK(j["error"]["stage"] == "ingest");
        CHECK(j["error"]["kind"] == "InvalidConfig");
    }

    TEST_CASE("missing config file") {
        const auto dir = stylus::testing::scratch_dir("cli_noconfig");
        CHECK(run("--config " + quoted(dir / "absent.ini") + " ingest", dir / "err.txt") != 0);
        CHECK(read_file(dir / "err.txt").find("\"stage\":\"config\"") != std::string::npos);
    }

    TEST_CASE("usage errors") {
        const auto dir = stylus::testing::scratch_dir("cli_usage");
        CHECK(run("ingest", dir / "err.txt") != 0);
        CHECK(run("--config x.ini", dir / "err.txt") != 0);
    }

    TEST_CASE("stage subcommands write their outputs") {
        const auto ws = make_workspace("cli_stages", "lsa", "lasso", "type2");
        const auto err = ws.dir / "stderr.txt";
        const auto out = ws.dir / "out";
        for (const char* cmd : {"ingest", "bow", "embed", "screen", "classify", "mw"})
            CHECK_MESSAGE(run("--config " + quoted(ws.config) + " " + cmd, err) == 0, cmd << ": " << read_file(err));
        for (const char* file : {"corpus.json", "tdm.csv", "embedding.csv", "screen_report.json", "wordcloud.csv",
                                 "predictions.csv", "model.json", "mw_models.csv", "odds_report.json",
                                 "run_config.ini"})
            CHECK_MESSAGE(std::filesystem::exists(out / file), file);
        CHECK(read_file(err).find("seed") != std::string::npos);
        CHECK(run("--config " + quoted(ws.config) + " table --id hc", err) == 0);
        CHECK(std::filesystem::exists(out / "table_hc.csv"));
        CHECK(run("--config " + quoted(ws.config) + " table --id nope", err) != 0);
        CHECK(read_file(err).find("UnknownTable") != std::string::npos);
    }

    TEST_CASE("pipeline reruns are byte-identical") {
        const auto ws = make_workspace("cli_pipeline", "lda", "bart", "type3");
        const auto err = ws.dir / "stderr.txt";
        const auto a = ws.dir / "a";
        const auto b = ws.dir / "b";
        REQUIRE(run("--config " + quoted(ws.config) + " --jobs 2 --seed 5 --out " + quoted(a) + " pipeline", err) == 0);
        REQUIRE(run("--config " + quoted(ws.config) + " --seed 5 --out " + quoted(b) + " pipeline", err) == 0);
        const auto first = read_file(b / "eval_report.json");
        REQUIRE(run("--config " + quoted(ws.config) + " --seed 5 --out " + quoted(b) + " pipeline", err) == 0);
        CHECK(read_file(b / "eval_report.json") == first);
        // Thread count does not change any result.
        for (const char* file : {"predictions.csv", "density.csv"})
            CHECK_MESSAGE(read_file(a / file) == read_file(b / file), file);
        auto ja = nlohmann::json::parse(read_file(a / "eval_report.json"));
        auto jb = nlohmann::json::parse(read_file(b / "eval_report.json"));
        ja.erase("config");
        jb.erase("config");
        CHECK(ja == jb);
        CHECK(read_file(a / "run_config.ini").find("seed = 5") != std::string::npos);
    }
}
