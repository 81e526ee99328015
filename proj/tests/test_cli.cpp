#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

const char* cli_path() {
    if (const char* env = std::getenv("OW2D_CLI")) return env;
    return OW2D_CLI_PATH;
}

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("ow2d_cli_test_" + std::to_string(getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path out_file = scratch_dir() / ("out_" + std::to_string(counter) + ".txt");
    fs::path err_file = scratch_dir() / ("err_" + std::to_string(counter) + ".txt");
    ++counter;
    std::string command = std::string(cli_path()) + " " + args + " >" + out_file.string() +
                          " 2>" + err_file.string();
    int status = std::system(command.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out_file);
    r.err = read_file(err_file);
    return r;
}

std::string golden(const std::string& name) { return read_file(fs::path(OW2D_GOLDEN_DIR) / name); }

const std::string kVerifyTs =
    "verify --function 't*s' --weight const --rect 0,1,0,1 --point 0.5,0.5";

} // namespace

TEST_CASE("verify on the bilinear witness matches the frozen output byte for byte") {
    RunResult r = run_cli(kVerifyTs);
    CHECK(r.exit_code == 0);
    CHECK(r.err.empty());
    CHECK(r.out == golden("verify_ts.json"));

    ordered_json j = ordered_json::parse(r.out);
    CHECK(j["defect"] == 0);
    CHECK(j["bound"] == 0.0625);
    CHECK(j["satisfied"] == true);

    RunResult again = run_cli(kVerifyTs);
    CHECK(again.out == r.out);
    CHECK(again.exit_code == 0);
}

TEST_CASE("the weighted median prints one bare number") {
    RunResult r = run_cli("median --weight linear --interval 0,2");
    CHECK(r.exit_code == 0);
    CHECK(r.out == golden("median_linear.txt"));
    CHECK(r.err.empty());
}

TEST_CASE("parse failures report the byte offset on stderr and exit 2") {
    RunResult r = run_cli("verify --function 't*(s' --weight const --rect 0,1,0,1 --midpoint");
    CHECK(r.exit_code == 2);
    CHECK(r.out.empty());
    CHECK(r.err == golden("parse_error.txt"));
}

TEST_CASE("the midpoint flag is shorthand for the subrect center") {
    RunResult r = run_cli("verify --function 't*s' --weight const --rect 0,1,0,1 --midpoint");
    CHECK(r.exit_code == 0);
    CHECK(r.out == golden("verify_ts.json"));
}

TEST_CASE("csv output for a single verification") {
    RunResult r = run_cli(kVerifyTs + " --format csv");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("x,y,defect,bound,ratio,satisfied\n", 0) == 0);
    CHECK(r.out.find("0.5,0.5,0,0.0625,0,true\n") != std::string::npos);
}

TEST_CASE("sweep emits the full lattice in both formats") {
    std::string base = "sweep --function 't*s' --weight const --rect 0,1,0,1 --grid 3,3";
    RunResult csv = run_cli(base + " --format csv");
    CHECK(csv.exit_code == 0);
    size_t lines = 0;
    for (char c : csv.out)
        if (c == '\n') ++lines;
    CHECK(lines == 10);
    CHECK(csv.out.find("0.25,0.25,") != std::string::npos);
    CHECK(csv.out.find("0.75,0.75,") != std::string::npos);

    RunResult json = run_cli(base);
    ordered_json j = ordered_json::parse(json.out);
    REQUIRE(j.is_array());
    CHECK(j.size() == 9);
    CHECK(j[0]["point"] == ordered_json::array({0.25, 0.25}));
    CHECK(j[3]["point"] == ordered_json::array({0.5, 0.25}));
    for (const auto& item : j) CHECK(item["satisfied"] == true);
}

TEST_CASE("constants alert on the printed value that does not match recomputation") {
    RunResult r = run_cli("constants --case wu-midpoint --rect 1,3,1,3");
    CHECK(r.exit_code == 0);
    ordered_json j = ordered_json::parse(r.out);
    CHECK(j["paper_constant"] == 1.0);
    CHECK(j["derived_constant"] == 0.25);
    CHECK(j["satisfied"] == false);
    CHECK(j["function"].is_null());
    CHECK(r.err.find("disagrees") != std::string::npos);

    RunResult ok = run_cli("constants --case w1-midpoint --rect 0,1,0,1");
    CHECK(ok.exit_code == 0);
    ordered_json k = ordered_json::parse(ok.out);
    CHECK(k["paper_constant"] == 0.0625);
    CHECK(k["derived_constant"] == 0.0625);
    CHECK(k["satisfied"] == true);
    CHECK(ok.err.empty());
}

TEST_CASE("cubature converges under a realistic budget and says so") {
    RunResult r = run_cli(
        "cubature --function 't^2*s^2' --weight const --rect 0,1,0,1 --target-error 1e-4");
    CHECK(r.exit_code == 0);
    ordered_json j = ordered_json::parse(r.out);
    CHECK(j["converged"] == true);
    double value = j["value"];
    double error_bound = j["error_bound"];
    CHECK(std::fabs(value - 1.0 / 9.0) <= error_bound);
    CHECK(error_bound <= 1e-4);
    CHECK(j["cells"].get<long long>() >= 1);
}

TEST_CASE("cubature that runs out of cells exits 1 with converged false") {
    RunResult r = run_cli("cubature --function 't^2*s^2' --weight const --rect 0,1,0,1 "
                          "--target-error 1e-9 --max-cells 50");
    CHECK(r.exit_code == 1);
    ordered_json j = ordered_json::parse(r.out);
    CHECK(j["converged"] == false);
    CHECK(j["cells"].get<long long>() <= 50);
    CHECK(j["error_bound"].get<double>() > 1e-9);
}

TEST_CASE("a wrong user-supplied sup-norm produces a violated certificate and exit 1") {
    RunResult r = run_cli("verify --function 't*s' --weight const --rect 0,1,0,1 "
                          "--point 0,0 --sup-norm 1e-30");
    CHECK(r.exit_code == 1);
    ordered_json j = ordered_json::parse(r.out);
    CHECK(j["satisfied"] == false);
    CHECK(j["sup_norm_method"] == "user-override");
}

TEST_CASE("output lands in the requested file untouched") {
    fs::path target = scratch_dir() / "report.json";
    RunResult r = run_cli(kVerifyTs + " --out " + target.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    CHECK(read_file(target) == golden("verify_ts.json"));
}

TEST_CASE("config files feed defaults that explicit flags override") {
    fs::path cfg = scratch_dir() / "job.cfg";
    write_file(cfg, "# sample job\n"
                    "function = t*s\n"
                    "weight = const\n"
                    "rect = 0,1,0,1\n"
                    "point = 0.25,0.25\n");
    RunResult base = run_cli("verify --config " + cfg.string());
    CHECK(base.exit_code == 0);
    ordered_json j = ordered_json::parse(base.out);
    CHECK(j["point"] == ordered_json::array({0.25, 0.25}));

    RunResult over = run_cli("verify --config " + cfg.string() + " --point 0.5,0.5");
    CHECK(over.exit_code == 0);
    CHECK(over.out == golden("verify_ts.json"));

    fs::path bad = scratch_dir() / "bad.cfg";
    write_file(bad, "mystery = 1\n");
    RunResult rej = run_cli("verify --config " + bad.string());
    CHECK(rej.exit_code == 2);
    CHECK(rej.err.find("mystery") != std::string::npos);
}

TEST_CASE("usage and validation failures all exit 2") {
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("verify --weight const --rect 0,1,0,1 --midpoint").exit_code == 2);
    CHECK(run_cli("verify --function 't*s' --weight const --rect 0,1,0 --midpoint").exit_code ==
          2);
    CHECK(run_cli(kVerifyTs + " --midpoint").exit_code == 2);
    CHECK(run_cli("verify --function 't*s' --weight const --rect 0,1,0,1").exit_code == 2);
    CHECK(run_cli("verify --function 't*s' --weight const --rect 0,1,0,1 --point 2,0.5")
              .exit_code == 2);
    CHECK(run_cli("verify --function 't*s' --weight const --rect 0,1,0,1 --subrect 0,2,0,1 "
                  "--midpoint")
              .exit_code == 2);
    CHECK(run_cli("verify --function 't*s' --weight linear --rect -1,1,0,1 --midpoint")
              .exit_code == 2);
    CHECK(run_cli("sweep --function 't*s' --weight const --rect 0,1,0,1 --grid 1,1").exit_code ==
          2);
    CHECK(run_cli("cubature --function 't*s' --weight const --rect 0,1,0,1 --target-error 0")
              .exit_code == 2);
    CHECK(run_cli("cubature --function 't*s' --weight const --rect 0,1,0,1 --target-error 1e-4 "
                  "--format csv")
              .exit_code == 2);
    CHECK(run_cli("median --weight linear --interval 0,2 --format json").exit_code == 2);
    CHECK(run_cli("median --weight linear --interval 2,0").exit_code == 2);
}

TEST_CASE("help and version exit cleanly") {
    RunResult help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.out.find("verify") != std::string::npos);

    RunResult sub = run_cli("verify --help");
    CHECK(sub.exit_code == 0);
    CHECK(sub.out.find("--function") != std::string::npos);

    RunResult version = run_cli("--version");
    CHECK(version.exit_code == 0);
    CHECK(version.out.find("1.0.0") != std::string::npos);
}
