#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {
const std::string kCli = SIEVE_CLI_PATH;
const fs::path kConfigs = fs::path(SIEVE_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("sieve_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

int run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + "'" + kCli + "' " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string first_line(const fs::path& p) {
    std::string s = slurp(p);
    return s.substr(0, s.find('\n'));
}
}  // namespace

TEST_CASE("validate: admissible and inadmissible specs") {
    auto out = scratch("validate_ok");
    CHECK(run("validate '" + (kConfigs / "family_member.cfg").string() + "' --out '" + out.string() + "'") == 0);
    CHECK(fs::exists(out / "validation.txt"));
    auto bad = scratch("validate_bad");
    CHECK(run("validate '" + (kConfigs / "invalid.cfg").string() + "' --out '" + bad.string() + "'") == 2);
    CHECK(slurp(bad / "validation.txt").find("d_over_rho_le_quarter") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
    auto out = scratch("usage");
    CHECK(run("validate /nonexistent/file.cfg --out '" + out.string() + "'") == 1);
    CHECK(run("frobnicate '" + (kConfigs / "family_member.cfg").string() + "' --out x") == 1);
    CHECK(run("validate '" + (kConfigs / "family_member.cfg").string() + "'") == 1);   // --out is required
}

TEST_CASE("malformed configuration is a validation error") {
    auto dir = scratch("malformed");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "broken.cfg");
        f << "this line has no assignment\n";
    }
    CHECK(run("validate '" + (dir / "broken.cfg").string() + "' --out '" + (dir / "out").string() + "'") == 2);
}

TEST_CASE("solver failures exit with 3") {
    auto dir = scratch("solver_failure");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "fail.cfg");
        f << "family.p = 1\nfamily.q = inf\nsweep.rho = 0.2, 0.1, 0.05\nmesh.h = 0.2\n"
             "solver.max_iter = 3\nsolver.accept_tol = 0\n"
             "sweep.spectra = false\nsweep.zeta = false\nsweep.kappa = false\n";
    }
    CHECK(run("sweep '" + (dir / "fail.cfg").string() + "' --out '" + (dir / "out").string() + "'",
              "SIEVE_WORKERS=1") == 3);
}

TEST_CASE("capacity of the annulus") {
    auto out = scratch("capacity");
    CHECK(run("capacity '" + (kConfigs / "annulus.cfg").string() + "' --out '" + out.string() + "'") == 0);
    CHECK(first_line(out / "capacity.csv") == "a,b,capacity,exact,nodes");
}

TEST_CASE("bridge witness") {
    auto out = scratch("zeta");
    CHECK(run("zeta '" + (kConfigs / "bridge_witness.cfg").string() + "' --out '" + out.string() + "'") == 0);
    CHECK(fs::exists(out / "zeta.csv"));
}

TEST_CASE("meshes and solves of one family member") {
    auto cfg = (kConfigs / "family_member.cfg").string();
    auto m = scratch("mesh");
    CHECK(run("mesh '" + cfg + "' --out '" + m.string() + "'") == 0);
    CHECK(fs::exists(m / "mesh_summary.csv"));
    auto p = scratch("solve_perforated");
    CHECK(run("solve-perforated '" + cfg + "' --out '" + p.string() + "'", "SIEVE_WORKERS=2") == 0);
    CHECK(fs::exists(p / "u_perforated.txt"));
    auto h = scratch("solve_homogenized");
    CHECK(run("solve-homogenized '" + cfg + "' --out '" + h.string() + "'") == 0);
    CHECK(fs::exists(h / "jump.csv"));
    CHECK(fs::exists(h / "solve_homogenized.csv"));
}
