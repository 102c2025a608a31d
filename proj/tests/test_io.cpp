#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "spar/dataset_io.hpp"
#include "spar/error.hpp"
#include "spar/simgen.hpp"

using namespace spar;

TEST_CASE("format_double round-trips exactly")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9, 0.0}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("dataset CSV round trip")
{
    SimulationDesign d;
    d.n = 7;
    d.p = 5;
    const auto sim = generate(d, 3);
    std::stringstream ss;
    write_dataset_csv(ss, sim.train);
    const std::string text = ss.str();
    CHECK(text.rfind("x1,x2,x3,x4,x5,y\n", 0) == 0);
    std::istringstream in(text);
    const Dataset back = read_dataset_csv(in);
    CHECK(back.X == sim.train.X);
    CHECK(back.y == sim.train.y);
    std::istringstream in2(text);
    CHECK(read_predictors_csv(in2) == sim.train.X);
}

TEST_CASE("dataset CSV: y column may sit anywhere")
{
    std::istringstream in("a,y,b\n1,2,3\n4,5,6\n");
    const Dataset d = read_dataset_csv(in);
    CHECK(d.p() == 2);
    CHECK(d.X(1, 0) == 4);
    CHECK(d.X(1, 1) == 6);
    CHECK(d.y(0) == 2);
}

TEST_CASE("dataset CSV errors")
{
    for (const char* text : {"x1,x2\n1,2\n", "x1,y\n1,abc\n", "x1,y\n1,2,3\n"}) {
        std::istringstream in(text);
        try {
            read_dataset_csv(in);
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
        }
    }
}

TEST_CASE("truth JSON round trip")
{
    Truth t;
    t.beta = Vector::Zero(4);
    t.beta(1) = 0.1;
    t.beta(3) = -2.0 / 3.0;
    t.mu = 1.0;
    t.sigma2 = 0.7;
    t.active_set = {1, 3};
    const Truth back = truth_from_json(truth_to_json(t));
    CHECK(back.beta == t.beta);
    CHECK(back.mu == t.mu);
    CHECK(back.sigma2 == t.sigma2);
    CHECK(back.active_set == t.active_set);
    CHECK_THROWS_AS(truth_from_json("{"), Error);
}
