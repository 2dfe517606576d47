#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>

#include "sieve/config.hpp"
#include "sieve/error.hpp"

using namespace sieve;

namespace {
ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no sieve::Error thrown");
    return ErrorKind::IoError;
}
}  // namespace

TEST_CASE("parse handles comments, blanks and overrides") {
    auto c = Config::parse("# header\n\na.b = 1.5\nname = straight  # trailing\na.b = 2\n");
    CHECK(c.has("a.b"));
    CHECK(c.get_double("a.b") == 2.0);
    CHECK(c.get_string("name") == "straight");
    CHECK_FALSE(c.has("missing"));
    CHECK(c.get_double("missing", 7.0) == 7.0);
}

TEST_CASE("typed getters") {
    auto c = Config::parse("x.n = 3\nx.flag = true\nx.off = no\nx.list = 0.2, 0.1,0.05\nx.q = inf\n");
    CHECK(c.get_int("x.n", 0) == 3);
    CHECK(c.get_bool("x.flag", false));
    CHECK_FALSE(c.get_bool("x.off", true));
    auto v = c.get_doubles("x.list");
    REQUIRE(v.size() == 3);
    CHECK(v[2] == doctest::Approx(0.05));
    CHECK(std::isinf(c.get_double("x.q")));
}

TEST_CASE("numbers are parsed strictly") {
    CHECK(parse_number("1e-3", "t") == doctest::Approx(1e-3));
    CHECK(std::isinf(parse_number("infinity", "t")));
    CHECK(kind_of([] { parse_number("1.5abc", "t"); }) == ErrorKind::ConfigError);
    CHECK(kind_of([] { parse_number("", "t"); }) == ErrorKind::ConfigError);
}

TEST_CASE("malformed input is a configuration error") {
    CHECK(kind_of([] { Config::parse("just words\n"); }) == ErrorKind::ConfigError);
    auto c = Config::parse("a = 1.5\nb = maybe\n");
    CHECK(kind_of([&] { c.get_double("nope"); }) == ErrorKind::ConfigError);
    CHECK(kind_of([&] { c.get_int("a", 0); }) == ErrorKind::ConfigError);
    CHECK(kind_of([&] { c.get_bool("b", false); }) == ErrorKind::ConfigError);
    CHECK(classify(ErrorKind::ConfigError) == ErrorClass::Validation);
}

TEST_CASE("missing files are I/O errors") {
    CHECK(kind_of([] { Config::load("/nonexistent/dir/none.cfg"); }) == ErrorKind::IoError);
    CHECK(classify(ErrorKind::IoError) == ErrorClass::Other);
}

TEST_CASE("load, prefixes and dump round trip") {
    const char* path = "test_config_roundtrip.cfg";
    {
        std::ofstream out(path);
        out << "passage.0.rho = 0.1\npassage.0.d = 0.005\npassage.1.rho = 0.2\nother = 1\n";
    }
    auto c = Config::load(path);
    auto keys = c.keys_with_prefix("passage.0");
    REQUIRE(keys.size() == 2);
    CHECK(keys[0] == "d");
    CHECK(keys[1] == "rho");
    auto again = Config::parse(c.dump());
    CHECK(again.entries() == c.entries());
    std::remove(path);
}

TEST_CASE("error classification covers the exit-code groups") {
    CHECK(classify(ErrorKind::Eps0Violated) == ErrorClass::Validation);
    CHECK(classify(ErrorKind::GuardOverlap) == ErrorClass::Validation);
    CHECK(classify(ErrorKind::NoConvergence) == ErrorClass::Solver);
    CHECK(classify(ErrorKind::MeshFailure) == ErrorClass::Solver);
    CHECK(classify(ErrorKind::GridMismatch) == ErrorClass::Other);
    CHECK(std::string(error_kind_name(ErrorKind::GuardOverlap)).size() > 0);
}
