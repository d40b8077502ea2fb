#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kBin = RELINK_BIN;
const fs::path kData = TESTS_DATA_DIR;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("relink_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    fs::path write(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

/// Runs the CLI with the given argument string, capturing exit code and both
/// output streams through redirection files.
RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path base =
        fs::temp_directory_path() / ("relink_cli_io_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(counter++));
    const fs::path out = base.string() + ".out";
    const fs::path err = base.string() + ".err";

    const std::string cmd = kBin + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());

    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    fs::remove(out);
    fs::remove(err);
    return r;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

std::size_t line_count(const std::string& text) {
    std::size_t n = 0;
    for (const char c : text)
        if (c == '\n') ++n;
    return n;
}

/// 3 authors, 30 tweets each, every tweet hashtag-bearing: enough for the
/// hashtag-dependent commands.
fs::path write_hashtag_fixture(const TempDir& tmp) {
    std::ostringstream text;
    const char* styles[3][2] = {{"h1", "#aaa seven seas"},
                                {"h2", "#bbb green hills"},
                                {"h3", "#ccc quiet night"}};
    for (const auto& [id, base] : styles)
        for (int t = 0; t < 30; ++t)
            text << "{\"user\":\"" << id << "\",\"text\":\"" << base << " w" << t << "\"}\n";
    return tmp.write("hashtags.jsonl", text.str());
}

}  // namespace

TEST_CASE("cli usage errors exit 1") {
    CHECK(run_cli("").exit_code == 1);                     // a subcommand is required
    CHECK(run_cli("no-such-command").exit_code == 1);
    CHECK(run_cli("stats").exit_code == 1);                // --input is required
    CHECK(run_cli("evaluate --input x.jsonl").exit_code == 1);  // --seed is required

    const RunResult fmt = run_cli("stats --input x.jsonl --format parquet");
    CHECK(fmt.exit_code == 1);

    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("evaluate --help").exit_code == 0);
}

TEST_CASE("cli stats reads both formats and writes CSV") {
    TempDir tmp;
    const fs::path csv = tmp.path / "stats.csv";

    const RunResult r = run_cli("stats --input " + (kData / "tiny.jsonl").string() + " --out " +
                                csv.string());
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "total_tweets"));
    CHECK(contains(r.out, "3"));
    CHECK(contains(r.out, "fraction_at_least_1"));

    const std::string written = slurp(csv);
    CHECK(contains(written, "metric,value\n"));
    CHECK(contains(written, "total_tweets,3\n"));
    CHECK(contains(written, "total_authors,2\n"));

    const RunResult snap =
        run_cli("stats --input " + (kData / "tiny.snap").string() + " --format snap");
    CHECK(snap.exit_code == 0);
    CHECK(contains(snap.out, "total_tweets"));

    // both files describe the same corpus, so the reports agree
    const RunResult jl = run_cli("stats --input " + (kData / "same.jsonl").string());
    const RunResult sn =
        run_cli("stats --input " + (kData / "same.snap").string() + " --format snap");
    CHECK(jl.out == sn.out);
}

TEST_CASE("cli data errors exit 2") {
    const RunResult missing = run_cli("stats --input /nonexistent/tweets.jsonl");
    CHECK(missing.exit_code == 2);
    CHECK(contains(missing.err, "cannot open file"));

    const RunResult bad = run_cli("stats --input " + (kData / "bad_missing_text.jsonl").string());
    CHECK(bad.exit_code == 2);
    CHECK(contains(bad.err, "missing 'text' field"));
}

TEST_CASE("cli evaluate rejects bad configuration before reading input") {
    const RunResult r = run_cli(
        "evaluate --input /nonexistent/tweets.jsonl --seed 1 --holdout 100 --ar-sizes 200");
    CHECK(r.exit_code == 1);  // config error, not the data error the path would give
    CHECK(contains(r.err, "config: AR size 200 exceeds the holdout of 100"));

    const RunResult topk = run_cli(
        "evaluate --input /nonexistent/tweets.jsonl --seed 1 --topk 3");
    CHECK(topk.exit_code == 1);
    CHECK(contains(topk.err, "--topk must be a subset of 1,5,10"));

    const RunResult beta_single = run_cli(
        "evaluate --input /nonexistent/tweets.jsonl --seed 1 --scheme uni --beta 0.5");
    CHECK(beta_single.exit_code == 1);
    CHECK(contains(beta_single.err, "--beta applies to the combined scheme only"));

    const RunResult no_beta = run_cli(
        "evaluate --input /nonexistent/tweets.jsonl --seed 1 --scheme combined");
    CHECK(no_beta.exit_code == 1);
    CHECK(contains(no_beta.err, "combined scheme requires --beta"));

    const RunResult vary = run_cli(
        "evaluate --input /nonexistent/tweets.jsonl --seed 1 --scheme combined --beta 0.5 "
        "--vary-users 10");
    CHECK(vary.exit_code == 1);
    CHECK(contains(vary.err, "--vary-users supports single-token schemes only"));

    const RunResult bad_beta = run_cli(
        "evaluate --input /nonexistent/tweets.jsonl --seed 1 --scheme combined --beta 1.5");
    CHECK(bad_beta.exit_code == 1);
    CHECK(contains(bad_beta.err, "--beta must be a number in [0, 1] or 'train'"));
}

TEST_CASE("cli synth-evaluate pipeline is reproducible") {
    TempDir tmp;
    const fs::path corpus = tmp.path / "synth.jsonl";

    const RunResult synth = run_cli("synth --authors 30 --tweets 40 --len 40 "
                                    "--concentration 0.4 --seed 42 --out " + corpus.string());
    CHECK(synth.exit_code == 0);
    CHECK(contains(synth.out, "30 authors"));
    CHECK(fs::exists(corpus));

    // the same seed writes byte-identical data
    const fs::path corpus2 = tmp.path / "synth2.jsonl";
    CHECK(run_cli("synth --authors 30 --tweets 40 --len 40 --concentration 0.4 --seed 42 --out " +
                  corpus2.string()).exit_code == 0);
    CHECK(slurp(corpus) == slurp(corpus2));

    const std::string eval_args = "evaluate --input " + corpus.string() +
                                  " --scheme uni --holdout 10 --ar-sizes 2 5 10 --seed 7";
    const fs::path r1 = tmp.path / "r1.csv";
    const fs::path r2 = tmp.path / "r2.csv";
    const fs::path r3 = tmp.path / "r3.csv";

    const RunResult e1 = run_cli(eval_args + " --workers 1 --out " + r1.string());
    CHECK(e1.exit_code == 0);
    CHECK(contains(e1.out, "uni"));  // the human-readable table is always printed

    CHECK(run_cli(eval_args + " --workers 3 --out " + r2.string()).exit_code == 0);
    CHECK(run_cli(eval_args + " --workers 1 --out " + r3.string()).exit_code == 0);

    const std::string csv = slurp(r1);
    CHECK(csv == slurp(r2));  // worker count never shows in the results
    CHECK(csv == slurp(r3));  // neither does the run
    CHECK(contains(csv, "scheme,user_count,ar_size,beta,top1,top5,top10,n_ars,n_empty_ars\n"));
    CHECK(line_count(csv) == 4);  // header + one row per AR size
    CHECK(contains(csv, "uni,30,2,,"));
    CHECK(contains(csv, "uni,30,5,,"));
    CHECK(contains(csv, "uni,30,10,,"));
}

TEST_CASE("cli evaluate matches the golden report") {
    TempDir tmp;
    const fs::path corpus = tmp.path / "synth150.jsonl";
    // flat letter styles (high concentration) keep the fractions off 1.0, so
    // the golden actually pins the ranking arithmetic
    REQUIRE(run_cli("synth --authors 150 --tweets 15 --len 30 --concentration 5.0 --seed 42 "
                    "--out " + corpus.string()).exit_code == 0);

    const fs::path report = tmp.path / "eval.csv";
    REQUIRE(run_cli("evaluate --input " + corpus.string() +
                    " --scheme uni --holdout 5 --ar-sizes 1 2 5 --seed 1 --workers 2 --out " +
                    report.string()).exit_code == 0);

    const fs::path golden = kData / "golden" / "eval_synth150.csv";
    if (std::getenv("RELINK_REGEN_GOLDENS") != nullptr) {
        fs::create_directories(golden.parent_path());
        fs::copy_file(report, golden, fs::copy_options::overwrite_existing);
        MESSAGE("regenerated ", golden.string());
    }
    REQUIRE_MESSAGE(fs::exists(golden),
                    "golden file missing; run with RELINK_REGEN_GOLDENS=1 to create it");
    CHECK(slurp(report) == slurp(golden));
}

TEST_CASE("cli build-model and link round-trip") {
    TempDir tmp;
    const fs::path corpus = tmp.write("pair.jsonl",
                                      "{\"user\":\"alpha\",\"text\":\"aaaa aaaa\"}\n"
                                      "{\"user\":\"alpha\",\"text\":\"aaa aa\"}\n"
                                      "{\"user\":\"bravo\",\"text\":\"bbbb bbbb\"}\n"
                                      "{\"user\":\"bravo\",\"text\":\"bbb bb\"}\n");
    const fs::path model = tmp.path / "model.bin";

    const RunResult build = run_cli("build-model --input " + corpus.string() +
                                    " --scheme uni --out " + model.string());
    CHECK(build.exit_code == 0);
    CHECK(contains(build.out, "2 authors"));
    REQUIRE(fs::exists(model));

    const fs::path query = tmp.write("query.jsonl", "{\"user\":\"ignored\",\"text\":\"aaa\"}\n");
    const fs::path ranking_out = tmp.path / "ranking.tsv";
    const RunResult link = run_cli("link --model " + model.string() + " --query " +
                                   query.string() + " --scheme uni --topk 10 --out " +
                                   ranking_out.string());
    CHECK(link.exit_code == 0);
    CHECK(link.out.rfind("1\talpha\t", 0) == 0);   // the a-author ranks first
    CHECK(contains(link.out, "2\tbravo\t"));
    CHECK(line_count(link.out) == 2);              // topk caps at the author count
    CHECK(link.out == slurp(ranking_out));

    const RunResult mismatch = run_cli("link --model " + model.string() + " --query " +
                                       query.string() + " --scheme bi");
    CHECK(mismatch.exit_code == 1);
    CHECK(contains(mismatch.err, "model file holds a 'uni' model"));

    // a token-free query still ranks, but says so loudly
    const fs::path digits = tmp.write("digits.jsonl", "{\"user\":\"x\",\"text\":\"123 456\"}\n");
    const RunResult empty = run_cli("link --model " + model.string() + " --query " +
                                    digits.string() + " --scheme uni");
    CHECK(empty.exit_code == 0);
    CHECK(empty.out.rfind("# empty_tokens=true\n", 0) == 0);
    CHECK(contains(empty.err, "warning: query has no tokens"));

    const RunResult corrupt = run_cli("link --model " + corpus.string() + " --query " +
                                      query.string() + " --scheme uni");
    CHECK(corrupt.exit_code == 2);  // not a model file: a data error
}

TEST_CASE("cli train-beta needs a hashtag-bearing corpus") {
    // tiny.jsonl has no hashtags at all: the default hashtag filter leaves
    // fewer than two authors, which is a data error
    const RunResult starved = run_cli("train-beta --input " + (kData / "tiny.jsonl").string() +
                                      " --seed 1");
    CHECK(starved.exit_code == 2);

    TempDir tmp;
    const fs::path fixture = write_hashtag_fixture(tmp);
    const fs::path grid_csv = tmp.path / "grid.csv";
    const RunResult r = run_cli("train-beta --input " + fixture.string() +
                                " --hashtag-min 10 --holdout 5 --inner-ar 5 --grid-step 0.5 "
                                "--seed 3 --out " + grid_csv.string());
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "chosen beta = "));

    const std::string csv = slurp(grid_csv);
    CHECK(contains(csv, "beta,top1,top5,top10,chosen\n"));
    CHECK(line_count(csv) == 4);  // header + betas 0, 0.5, 1
}

TEST_CASE("cli evaluate supports the combined scheme") {
    TempDir tmp;
    const fs::path fixture = write_hashtag_fixture(tmp);
    const fs::path out = tmp.path / "combined.csv";

    const RunResult fixed = run_cli("evaluate --input " + fixture.string() +
                                    " --scheme combined --beta 0.5 --hashtag-min 10 --holdout 5 "
                                    "--ar-sizes 2 5 --seed 3 --out " + out.string());
    CHECK(fixed.exit_code == 0);
    const std::string csv = slurp(out);
    CHECK(contains(csv, "combined,3,2,0.5,"));
    CHECK(contains(csv, "combined,3,5,0.5,"));

    const RunResult trained = run_cli("evaluate --input " + fixture.string() +
                                      " --scheme combined --beta train --hashtag-min 10 "
                                      "--holdout 5 --ar-sizes 2 5 --inner-ar 5 --grid-step 0.5 "
                                      "--seed 3");
    CHECK(trained.exit_code == 0);
    CHECK(contains(trained.out, "trained beta = "));
}

TEST_CASE("cli evaluate vary-users emits one block per subsample size") {
    TempDir tmp;
    const fs::path corpus = tmp.path / "synth.jsonl";
    REQUIRE(run_cli("synth --authors 20 --tweets 30 --len 40 --concentration 0.5 --seed 11 "
                    "--out " + corpus.string()).exit_code == 0);

    const fs::path out = tmp.path / "vary.csv";
    const RunResult r = run_cli("evaluate --input " + corpus.string() +
                                " --scheme uni --holdout 5 --ar-sizes 5 --vary-users 5 10 20 "
                                "--seed 7 --out " + out.string());
    CHECK(r.exit_code == 0);
    const std::string csv = slurp(out);
    CHECK(line_count(csv) == 4);
    CHECK(contains(csv, "uni,5,5,,"));
    CHECK(contains(csv, "uni,10,5,,"));
    CHECK(contains(csv, "uni,20,5,,"));
}
