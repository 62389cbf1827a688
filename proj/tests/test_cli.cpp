#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;  // stdout
    std::string err;  // stderr
};

RunResult run_cli(const std::string& args) {
    static int call = 0;
    const fs::path errfile =
        fs::temp_directory_path() / ("lexdiv_cli_stderr_" + std::to_string(++call) + ".txt");
    const std::string cmd = std::string(LEXDIV_BIN) + " " + args + " 2>" + errfile.string();
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    RunResult r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream ef(errfile);
    std::stringstream ss;
    ss << ef.rdbuf();
    r.err = ss.str();
    fs::remove(errfile);
    return r;
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path d = fs::temp_directory_path() / ("lexdiv_cli_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// error reports are one-line JSON objects on stderr (other diagnostics may
// surround them, so scan every line for the one carrying an "error" key)
json stderr_error_json(const RunResult& r) {
    std::istringstream in(r.err);
    std::string line;
    json found;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() != '{') continue;
        json j = json::parse(line, nullptr, false);
        if (!j.is_discarded() && j.contains("error")) found = std::move(j);
    }
    return found;
}

std::set<std::string> vocab_types(const fs::path& vocab_tsv) {
    std::ifstream f(vocab_tsv);
    std::string line;
    std::getline(f, line);  // header
    std::set<std::string> types;
    while (std::getline(f, line)) {
        const auto t1 = line.find('\t');
        const auto t2 = line.rfind('\t');
        types.insert(line.substr(t1 + 1, t2 - t1 - 1));
    }
    return types;
}

}  // namespace

TEST(CliStats, CountsTokensTypesAndTtr) {
    const auto dir = fresh_dir("stats");
    spit(dir / "in.txt", "Gregor Samsa gregor samsa GREGOR SAMSA gregor samsa gregor samsa\n");
    const std::string base = (dir / "c").string();
    auto tok = run_cli("tokenize --input " + (dir / "in.txt").string() + " --output " + base);
    ASSERT_EQ(tok.exit_code, 0) << tok.err;
    const json tj = json::parse(tok.out);
    EXPECT_EQ(tj["total_tokens"], 10);
    EXPECT_EQ(tj["types"], 2);

    auto st = run_cli("stats --corpus " + base);
    ASSERT_EQ(st.exit_code, 0) << st.err;
    const json sj = json::parse(st.out);
    EXPECT_EQ(sj["total_tokens"], 10);
    EXPECT_EQ(sj["types"], 2);
    EXPECT_NEAR(sj["ttr"].get<double>(), 0.2, 1e-12);
    EXPECT_EQ(sj["hapax_count"], 0);
}

TEST(CliTokenize, FlagsControlNumbersAndAccents) {
    const auto dir = fresh_dir("tokflags");
    spit(dir / "in.txt", "Covid19 case café naïve\n");
    const std::string in = (dir / "in.txt").string();

    auto d = run_cli("tokenize --input " + in + " --output " + (dir / "d").string());
    ASSERT_EQ(d.exit_code, 0) << d.err;
    auto types = vocab_types(dir / "d.vocab.tsv");
    EXPECT_TRUE(types.count("covid"));
    EXPECT_FALSE(types.count("covid19"));
    EXPECT_TRUE(types.count("café"));

    auto k = run_cli("tokenize --input " + in + " --keep-numbers --output " + (dir / "k").string());
    ASSERT_EQ(k.exit_code, 0) << k.err;
    types = vocab_types(dir / "k.vocab.tsv");
    EXPECT_TRUE(types.count("covid19"));
    EXPECT_FALSE(types.count("covid"));

    auto s =
        run_cli("tokenize --input " + in + " --strip-accents --output " + (dir / "s").string());
    ASSERT_EQ(s.exit_code, 0) << s.err;
    types = vocab_types(dir / "s.vocab.tsv");
    EXPECT_TRUE(types.count("cafe"));
    EXPECT_TRUE(types.count("naive"));
    EXPECT_FALSE(types.count("café"));
}

TEST(CliSynth, SameSeedGivesByteIdenticalCorpora) {
    const auto dir = fresh_dir("synthdet");
    const std::string common = "synth --kind zipf --v 1000 --a 1.0 --l 1000000 --seed 7 --out ";
    auto r1 = run_cli(common + (dir / "a").string());
    ASSERT_EQ(r1.exit_code, 0) << r1.err;
    auto r2 = run_cli(common + (dir / "b").string());
    ASSERT_EQ(r2.exit_code, 0) << r2.err;
    EXPECT_EQ(slurp(dir / "a.tokens"), slurp(dir / "b.tokens"));
    EXPECT_EQ(slurp(dir / "a.vocab.tsv"), slurp(dir / "b.vocab.tsv"));

    const json j = json::parse(r1.out);
    EXPECT_EQ(j["total_tokens"], 1000000);
    EXPECT_GT(j["true_entropy"].get<double>(), 0.0);
    EXPECT_LE(j["types_observed"].get<std::uint64_t>(), 1000u);

    auto r3 = run_cli("synth --kind zipf --v 1000 --a 1.0 --l 1000000 --seed 8 --out " +
                      (dir / "c").string());
    ASSERT_EQ(r3.exit_code, 0) << r3.err;
    EXPECT_NE(slurp(dir / "a.tokens"), slurp(dir / "c.tokens"));
}

TEST(CliPipeline, SynthHeapsSampleAndRelationFitsAgree) {
    const auto dir = fresh_dir("pipeline");
    const std::string base = (dir / "z").string();
    // vocabulary large enough that growth never saturates over the sampled
    // lengths — the asymptotic entropy models describe exactly that regime
    auto sy = run_cli("synth --kind zipf --v 1000000 --a 1.0 --l 4000000 --seed 3 --threads 2 "
                      "--out " + base);
    ASSERT_EQ(sy.exit_code, 0) << sy.err;

    auto hp = run_cli("heaps --corpus " + base);
    ASSERT_EQ(hp.exit_code, 0) << hp.err;
    const json hj = json::parse(hp.out);
    const double beta = hj["beta"].get<double>();
    EXPECT_TRUE(hj["beta_in_range"].get<bool>());
    EXPECT_GT(beta, 0.0);
    EXPECT_LT(beta, 1.0);

    const std::string series = (dir / "series.tsv").string();
    auto sm = run_cli("sample --corpus " + base + " --out " + series +
                      " --step 200000 --reps 10 --seed 3 --threads 2");
    ASSERT_EQ(sm.exit_code, 0) << sm.err;
    ASSERT_TRUE(fs::exists(series));

    char betaflag[64];
    std::snprintf(betaflag, sizeof betaflag, " --beta %.17g", beta);
    auto fl = run_cli("fit-hl --series " + series + betaflag +
                      " --l-low 400000 --l-high 4000000");
    ASSERT_EQ(fl.exit_code, 0) << fl.err;
    const json flj = json::parse(fl.out);
    EXPECT_GT(flj["rho2"].get<double>(), 0.95);
    EXPECT_GT(flj["rho_s"].get<double>(), 0.95);
    EXPECT_GT(flj["p1"].get<double>(), 0.0);

    auto ft = run_cli("fit-httr --series " + series + betaflag +
                      " --l-low 400000 --l-high 4000000");
    ASSERT_EQ(ft.exit_code, 0) << ft.err;
    const json ftj = json::parse(ft.out);
    EXPECT_GT(ftj["rho2"].get<double>(), 0.95);
    EXPECT_GT(ftj["p3"].get<double>(), 0.0);

    const std::string coll = (dir / "collapse.tsv").string();
    auto cl = run_cli("collapse --series " + series + " --out " + coll);
    ASSERT_EQ(cl.exit_code, 0) << cl.err;
    std::ifstream cf(coll);
    std::string line, last;
    std::getline(cf, line);
    EXPECT_EQ(line, "ttr\th_minus_hmax");
    while (std::getline(cf, line))
        if (!line.empty()) last = line;
    EXPECT_EQ(std::stod(last.substr(last.find('\t') + 1)), 0.0);
}

TEST(CliErrors, CorruptedHeaderReportsFormatKind) {
    const auto dir = fresh_dir("corrupt");
    const std::string base = (dir / "z").string();
    auto sy = run_cli("synth --kind zipf --v 100 --a 1.0 --l 1000 --seed 1 --out " + base);
    ASSERT_EQ(sy.exit_code, 0) << sy.err;
    std::string bytes = slurp(dir / "z.tokens");
    bytes[0] = 'X';
    bytes[1] = 'X';
    spit(dir / "z.tokens", bytes);
    auto hp = run_cli("heaps --corpus " + base);
    EXPECT_EQ(hp.exit_code, 1);
    const json ej = stderr_error_json(hp);
    EXPECT_EQ(ej["error"]["kind"], "format");
}

TEST(CliErrors, MissingCorpusReportsIoKind) {
    auto st = run_cli("stats --corpus /nonexistent/corpus/base");
    EXPECT_EQ(st.exit_code, 1);
    const json ej = stderr_error_json(st);
    EXPECT_EQ(ej["error"]["kind"], "io");
}

TEST(CliErrors, UnknownFlagIsAUsageError) {
    auto r = run_cli("stats --corpus x --definitely-not-a-flag");
    EXPECT_NE(r.exit_code, 0);
    const json ej = stderr_error_json(r);
    EXPECT_EQ(ej["error"]["kind"], "usage");
}

TEST(CliLogging, EveryRunEmitsItsConfigurationOnStderr) {
    const auto dir = fresh_dir("logcfg");
    spit(dir / "in.txt", "one two two\n");
    const std::string base = (dir / "c").string();
    auto tok = run_cli("tokenize --input " + (dir / "in.txt").string() + " --output " + base);
    ASSERT_EQ(tok.exit_code, 0) << tok.err;
    std::istringstream in(tok.err);
    std::string first;
    std::getline(in, first);
    const json cj = json::parse(first);
    EXPECT_EQ(cj["config"]["subcommand"], "tokenize");
    EXPECT_FALSE(cj["config"]["turkish"].get<bool>());

    auto st = run_cli("stats --corpus " + base);
    ASSERT_EQ(st.exit_code, 0);
    std::istringstream in2(st.err);
    std::getline(in2, first);
    EXPECT_EQ(json::parse(first)["config"]["subcommand"], "stats");
}
