#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "relaysim/cli/commands.hpp"
#include "relaysim/cli/csv.hpp"
#include "relaysim/cli/experiment.hpp"
#include "relaysim/error.hpp"

using namespace relaysim;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"relaysim"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "relaysim_cli_tests";
    fs::create_directories(dir);
    const auto p = dir / name;
    fs::remove(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string without_generated(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        if (line.rfind("# generated:", 0) == 0) continue;
        out += line + "\n";
    }
    return out;
}

}  // namespace

TEST_CASE("outage CSV is reproducible apart from the timestamp line") {
    const auto a = scratch("a.csv");
    const auto b = scratch("b.csv");
    for (const auto& p : {a, b}) {
        const auto r = invoke({"outage", "--protocol", "repetition", "-L", "1", "-N", "2", "--r", "1/6", "--snr-db",
                               "5:5:15", "--trials", "3000", "--seed", "11", "-q", "--out", p.c_str()});
        REQUIRE(r.code == cli::kExitOk);
    }
    const auto text = slurp(a);
    CHECK(without_generated(text) == without_generated(slurp(b)));
    CHECK(text.find(cli::kCsvHeader) != std::string::npos);
    CHECK(text.find("# protocol: repetition") != std::string::npos);
    std::ifstream in(a);
    const auto points = cli::read_csv(in);
    REQUIRE(points.size() == 3);
    CHECK(points[0].snr_db == 5.0);
    CHECK(points[2].trials == 3000);
}

TEST_CASE("worker count does not change the CSV body") {
    const auto a = scratch("w1.csv");
    const auto b = scratch("w4.csv");
    REQUIRE(invoke({"outage", "--protocol", "standard", "-N", "1", "--r", "1/8", "--snr-db", "10,20", "--trials",
                    "5000", "--workers", "1", "-q", "--out", a.c_str()})
                .code == 0);
    REQUIRE(invoke({"outage", "--protocol", "standard", "-N", "1", "--r", "1/8", "--snr-db", "10,20", "--trials",
                    "5000", "--workers", "4", "-q", "--out", b.c_str()})
                .code == 0);
    std::ifstream ia(a);
    std::ifstream ib(b);
    const auto pa = cli::read_csv(ia);
    const auto pb = cli::read_csv(ib);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i].events == pb[i].events);
}

TEST_CASE("sidecar JSON carries the configuration") {
    const auto csv = scratch("s.csv");
    const auto side = scratch("s.json");
    REQUIRE(invoke({"ber", "--protocol", "superposition", "-L", "1", "--sp-mode", "2", "--snr-db", "0,5", "--min-errors",
                    "50", "--max-trials", "2000", "-q", "--out", csv.c_str(), "--json", side.c_str()})
                .code == 0);
    const auto j = nlohmann::json::parse(slurp(side));
    CHECK(j.contains("code_version"));
    CHECK(j.dump().find("superposition") != std::string::npos);
}

TEST_CASE("usage errors exit 2 and leave no file") {
    const auto out = scratch("bad.csv");
    auto r = invoke({"outage", "--protocol", "bogus", "--snr-db", "10", "--out", out.c_str()});
    CHECK(r.code == cli::kExitUsage);
    CHECK_FALSE(r.err.empty());
    CHECK_FALSE(fs::exists(out));

    r = invoke({"outage", "--protocol", "direct", "--r", "1/6", "--snr-db", "0:10:20", "--out", out.c_str()});
    CHECK(r.code == cli::kExitUsage);
    CHECK_FALSE(fs::exists(out));

    CHECK(invoke({"outage", "--snr-db", "10"}).code == cli::kExitUsage);
    CHECK(invoke({"nonsense"}).code == cli::kExitUsage);
    CHECK(invoke({"ber", "--protocol", "direct", "--snr-db", "1", "--qam", "32"}).code == cli::kExitUsage);
}

TEST_CASE("oversize MLSD is a runtime error") {
    const auto r = invoke({"ber", "--protocol", "superposition", "-L", "4", "--snr-db", "10", "-q"});
    CHECK(r.code == cli::kExitRuntime);
    CHECK(r.err.find("budget") != std::string::npos);
}

TEST_CASE("dmt subcommand prints breakpoints and evaluates") {
    auto r = invoke({"dmt", "--protocol", "superposition", "-N", "2", "-L", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("superposition,0,6") != std::string::npos);
    CHECK(r.out.find("superposition,0.333333333333,0") != std::string::npos);
    r = invoke({"dmt", "-N", "2", "-L", "1", "--at", "1/6"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("direct") != std::string::npos);
    CHECK(r.out.find("msource") != std::string::npos);
}

TEST_CASE("dmt --fit reads a curve CSV") {
    const auto csv = scratch("fit.csv");
    {
        std::ofstream os(csv);
        os << "# synthetic\n" << cli::kCsvHeader << "\n";
        for (int db = 10; db <= 40; db += 5) {
            os << db << "," << std::pow(10.0, -2.0 * db / 10.0) << ",0,1,1000000,10\n";
        }
    }
    const auto r = invoke({"dmt", "--fit", csv.c_str()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("slope") != std::string::npos);
    CHECK(r.out.find("2") != std::string::npos);
}

TEST_CASE("validate and constellation subcommands") {
    auto r = invoke({"validate", "--instances", "100"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("PASS") != std::string::npos);
    r = invoke({"validate", "--instances", "100", "--inject", "bad-scaling"});
    CHECK(r.code == cli::kExitFailure);
    CHECK(r.out.find("FAIL") != std::string::npos);
    r = invoke({"constellation", "--qam", "8"});
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') >= 8);
}

TEST_CASE("experiment files") {
    const auto out1 = scratch("exp1.csv");
    const auto out2 = scratch("exp2.csv");
    nlohmann::json j = {{"seed", 5},
                        {"runs",
                         {{{"name", "rep"}, {"protocol", "repetition"}, {"L", 1}, {"N", 2}, {"r", "1/6"},
                           {"snr_db", "10:10:20"}, {"trials", 500}, {"output", out1.string()}},
                          {{"name", "dir"}, {"protocol", "direct"}, {"rate", 2}, {"source", 1},
                           {"snr_db", {5, 15}}, {"trials", 500}, {"output", out2.string()}}}}};
    const auto cfg = scratch("exp.json");
    std::ofstream(cfg) << j.dump(2);
    const auto r = invoke({"outage", "--config", cfg.c_str(), "-q"});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(out1));
    CHECK(fs::exists(out2));
    CHECK(slurp(out1).find("# seed: 5") != std::string::npos);

    const auto runs = cli::parse_experiment(j, SimMode::Outage);
    REQUIRE(runs.size() == 2);
    CHECK(runs[1].config.outage_source == 0);
    CHECK(runs[1].config.rate == RateTarget::fixed(2.0));
    CHECK(runs[0].config.snr_grid_db == std::vector<double>{10, 20});

    j["runs"][0]["bogus"] = 1;
    CHECK_THROWS_AS(cli::parse_experiment(j, SimMode::Outage), ConfigError);
}

TEST_CASE("grid and rational parsing") {
    CHECK(cli::parse_snr_grid("10:5:20") == std::vector<double>{10, 15, 20});
    CHECK(cli::parse_snr_grid("0:2.5:5") == std::vector<double>{0, 2.5, 5});
    CHECK(cli::parse_snr_grid("3,1,2") == std::vector<double>{3, 1, 2});
    CHECK_THROWS_AS(cli::parse_snr_grid(""), ConfigError);
    CHECK_THROWS_AS(cli::parse_snr_grid("10:0:20"), ConfigError);
    CHECK(cli::parse_rational("1/6") == doctest::Approx(1.0 / 6.0));
    CHECK(cli::parse_rational("0.25") == 0.25);
    CHECK_THROWS_AS(cli::parse_rational("1/0"), ConfigError);
    CHECK_THROWS_AS(cli::parse_rational("abc"), ConfigError);
}

TEST_CASE("worker cap from the environment") {
    ::setenv(cli::kMaxWorkersEnv, "1", 1);
    const auto side = scratch("cap.json");
    const auto csv = scratch("cap.csv");
    REQUIRE(invoke({"outage", "--protocol", "direct", "--rate", "1", "--snr-db", "10", "--trials", "100", "--workers",
                    "8", "-q", "--out", csv.c_str(), "--json", side.c_str()})
                .code == 0);
    ::unsetenv(cli::kMaxWorkersEnv);
    CHECK(nlohmann::json::parse(slurp(side)).dump().find("\"workers\":1") != std::string::npos);
}
