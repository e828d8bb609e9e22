#include "doctest.h"

#include "besq/cli.hpp"

#include "json.hpp"

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = besq::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& s) {
    std::vector<std::string> rows;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') rows.push_back(line);
    return rows;
}

} // namespace

TEST_CASE("laplace single row") {
    const auto r = run({"laplace", "--nu", "1", "--p", "1", "--x", "0", "--y", "1", "--lambda", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("# schema besq-laplace 1\n# manifest {", 0) == 0);
    const auto rows = data_lines(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "index,lambda,s,value");
    const double v = std::stod(rows[1].substr(rows[1].rfind(',') + 1));
    CHECK(v == doctest::Approx(0.92128398430298586).epsilon(1e-12));
    CHECK(r.err.find("elapsed") != std::string::npos);
}

TEST_CASE("laplace grid") {
    const auto r = run({"laplace", "--delta", "4", "--p", "1", "--x", "0", "--y", "1", "--grid", "1e-2:1e2:100"});
    REQUIRE(r.code == 0);
    CHECK(data_lines(r.out).size() == 101);
}

TEST_CASE("usage and regime errors") {
    const auto bad = run({"laplace", "--nu", "-0.5", "--p", "-0.5", "--x", "0.5", "--y", "1", "--lambda", "1"});
    CHECK(bad.code == 2);
    CHECK(bad.out.empty());
    CHECK(bad.err.find("regime") != std::string::npos);
    CHECK(run({"laplace", "--nu", "1", "--delta", "3", "--lambda", "1"}).code == 2);
    CHECK(run({"laplace", "--p", "1", "--lambda", "1"}).code == 2);
    CHECK(run({"laplace", "--nu", "1", "--bogus"}).code == 2);
    CHECK(run({"experiment", "lil", "--nu", "1", "--p", "1"}).code == 2);
    CHECK(run({"price", "--nu", "1", "--p", "1", "--x", "0", "--y", "1", "--strike", "0.1", "--mc-check"}).code == 2);
    CHECK(run({"price", "--nu", "1", "--p", "1", "--x", "1", "--y", "0.5", "--kind", "maxput", "--strike", "0.7"})
              .code == 2);
    CHECK(run({"--version"}).out == "0.1.0\n");
}

TEST_CASE("price reports") {
    const auto r = run({"price", "--nu", "1", "--p", "1", "--x", "1", "--y", "0.5", "--kind", "put", "--strike", "1"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema_version"] == 1);
    CHECK(j["price"].get<double>() == 0.0);
    CHECK(j["manifest"]["delta"].get<double>() == 4.0);

    const auto d = run({"price", "--nu", "1", "--p", "1", "--x", "0", "--y", "1", "--strike", "0.1", "--mc-check",
                        "--seed", "3", "--paths", "4000"});
    REQUIRE(d.code == 0);
    const auto k = nlohmann::json::parse(d.out);
    CHECK(std::abs(k["mc"]["z"].get<double>()) < 3.0);
    CHECK(k["price"].get<double>() > 0.0);
    CHECK(k["price"].get<double>() < k["no_exercise_limit"].get<double>());
}

TEST_CASE("validate exit status") {
    const auto ok = run({"validate", "--no-jumps"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find(",false\n") == std::string::npos);
    const auto bad = run({"validate", "--no-jumps", "--perturb-bessel", "1e-6"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("FAILED") != std::string::npos);
}

TEST_CASE("seeded experiments are reproducible") {
    const std::vector<std::string> args{"experiment", "lil", "--nu", "1", "--p", "1", "--x", "0",
                                        "--seed", "5", "--paths", "50", "--y-max", "100"};
    const auto a = run(args);
    const auto b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(data_lines(a.out).size() == 1 + 50 * 3);
    const auto c = run({"experiment", "bias-study", "--nu", "1", "--p", "0", "--x", "0", "--y", "1", "--seed",
                        "2", "--paths", "500", "--steps", "4e-2", "2e-2", "1e-2"});
    REQUIRE(c.code == 0);
    CHECK(c.out.find("# summary order=") != std::string::npos);
}
