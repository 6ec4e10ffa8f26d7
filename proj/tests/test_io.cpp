#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "qpc/circle_io.hpp"
#include "rigid.hpp"

using namespace qpc;
using qpc_tests::unit_circle;

namespace {

CircleFileData sample_data(std::mt19937& rng) {
    std::normal_distribution<double> dist;
    CircleFileData data;
    data.spec = {MapFamily::HenonAP, std::acos(0.24)};
    data.system.d = 2;
    data.system.rho = 0.1906694789552640;
    for (int j = 0; j < 2; ++j) {
        FourierCircle K(5);
        for (int n = -5; n <= 5; ++n) {
            K.a.at(n) = {dist(rng), dist(rng)};
            K.b.at(n) = {dist(rng), dist(rng)};
        }
        data.system.circles.push_back(K);
    }
    data.unfolding.beta = 1.25e-16;
    data.unfolding.gamma = {1e-17, -2e-17};
    data.unfolding.omega = {0.0, 3e-18};
    data.final_defect = 4.4e-15;
    data.seed = {0.5, 0.0};
    data.center = {0.01, -0.02};
    data.phase = {{0.49, 0.01}, {0.0, 1.0}};
    data.m_rho = 200000;
    data.m_coeff = 10000;
    data.created = "2026-08-24T10:00:00Z";
    return data;
}

}  // namespace

TEST_CASE("circle file round trip is byte identical") {
    std::mt19937 rng(101);
    CircleFileData data = sample_data(rng);
    std::ostringstream first;
    write_circle(first, data);

    std::istringstream is(first.str());
    CircleFileData reread = read_circle(is);
    std::ostringstream second;
    write_circle(second, reread);

    CHECK(first.str() == second.str());
    CHECK(reread.system.d == 2);
    CHECK(reread.system.rho == data.system.rho);
    CHECK(reread.unfolding.gamma.size() == 2);
    CHECK(reread.created == data.created);
    for (int j = 0; j < 2; ++j)
        for (int n = -5; n <= 5; ++n) {
            CHECK(reread.system.circles[j].a.at(n) == data.system.circles[j].a.at(n));
            CHECK(reread.system.circles[j].b.at(n) == data.system.circles[j].b.at(n));
        }
}

TEST_CASE("family file round trip is byte identical") {
    std::mt19937 rng(103);
    FamilyFileData fam;
    fam.stop_reason = StopReason::SobolevBlowup;
    for (int k = 0; k < 3; ++k) {
        fam.records.push_back(sample_data(rng));
        fam.sobolev.push_back({{1.0, 0.5 + k}, {5.0, 2.0 * k + 0.25}});
    }
    std::ostringstream first;
    write_family(first, fam);

    std::istringstream is(first.str());
    FamilyFileData reread = read_family(is);
    std::ostringstream second;
    write_family(second, reread);

    CHECK(first.str() == second.str());
    CHECK(reread.stop_reason == StopReason::SobolevBlowup);
    REQUIRE(reread.records.size() == 3);
    REQUIRE(reread.sobolev.size() == 3);
    CHECK(reread.sobolev[2][1].second == 4.25);
}

TEST_CASE("format_double survives parse round trip") {
    for (double v : {0.1, 1.0 / 3.0, 4.4e-15, -3.1415926535e-100,
                     0.550640092644521, 1e300}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("read_circle rejects malformed input") {
    std::istringstream not_circle("qpcirc-family 1\n");
    CHECK_THROWS_AS(read_circle(not_circle), io_error);

    std::istringstream bad_version("qpcirc-circle 9\n");
    CHECK_THROWS_AS(read_circle(bad_version), io_error);

    std::istringstream truncated("qpcirc-circle 1\nmap henon\n");
    CHECK_THROWS_AS(read_circle(truncated), io_error);

    std::istringstream bad_key("qpcirc-circle 1\nwhat 3\nend\n");
    CHECK_THROWS_AS(read_circle(bad_key), io_error);
}

TEST_CASE("stop reason names round trip through family files") {
    for (StopReason r : {StopReason::SobolevBlowup, StopReason::StepUnderflow,
                         StopReason::MaxSteps, StopReason::SolverHardFailure}) {
        FamilyFileData fam;
        fam.stop_reason = r;
        std::ostringstream os;
        write_family(os, fam);
        std::istringstream is(os.str());
        CHECK(read_family(is).stop_reason == r);
    }
}

TEST_CASE("plot csv samples the parameterization") {
    CircleSystem sys;
    sys.d = 1;
    sys.rho = 0.3;
    sys.circles = {unit_circle(3)};
    std::ostringstream os;
    write_plot_csv(os, sys, 4);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "theta,x,y,component_index");
    int rows = 0;
    std::string line;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 4);
    // first sample is K(0) = (1, 0)
    std::istringstream first(os.str());
    std::getline(first, line);
    std::getline(first, line);
    CHECK(line.substr(0, 4) == "0,1,");
}
