#include "doctest.h"
#include "wnorm/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace wnorm;

TEST_CASE("json parse errors carry line and column") {
    CHECK(parse_json_text(R"({"a": 1})")["a"] == 1);
    try {
        parse_json_text("{\n  \"a\": 1,\n  oops\n}", "cfg.json");
        FAIL("expected a parse error");
    } catch (const std::exception& e) {
        std::string msg = e.what();
        CHECK(msg.rfind("cfg.json:3:", 0) == 0);
    }
    CHECK_THROWS(load_json_file("/nonexistent/path.json"));
}

TEST_CASE("json_real accepts rationals") {
    auto j = parse_json_text(R"({"x": "-1/2", "y": 0.25, "z": "abc"})");
    CHECK(json_real(j, "x") == -0.5);
    CHECK(json_real(j, "y") == 0.25);
    CHECK_THROWS(json_real(j, "z"));
    CHECK_THROWS(json_real(j, "missing"));
}

TEST_CASE("weights round trip through json") {
    std::vector<WeightPtr> ws{radial_power(-0.5), product_power(0.2, -0.3), shifted_power(-1, 2), constant_weight(3),
                              product_weight(radial_power(0.25), constant_weight(1))};
    const double pt[] = {0.3, -1.7};
    for (const auto& w : ws) {
        Json j = to_json(*w);
        auto back = weight_from_json(j);
        CHECK(to_json(*back) == j);
        CHECK(evaluate(*back, pt, 1, 1) == evaluate(*w, pt, 1, 1));
    }
    CHECK_THROWS(weight_from_json(parse_json_text(R"({"kind": "mystery"})")));
    CHECK_THROWS(weight_from_json(parse_json_text(R"({"kind": "radial_power"})")));
}

TEST_CASE("tabulated weight from inline grid and from file") {
    auto j = parse_json_text(R"({"kind": "tabulated", "grid": {"a1": 0, "b1": 1, "a2": 0, "b2": 2,
                                 "n1": 2, "n2": 2, "values": [1, 2, 3, 4]}})");
    auto w = weight_from_json(j);
    const double pt[] = {0.75, 0.25};
    CHECK(evaluate(*w, pt, 1, 1) == 3);
    CHECK(to_json(*w) == j);

    auto dir = std::filesystem::temp_directory_path() / "wnorm_test_io";
    std::filesystem::create_directories(dir);
    {
        std::ofstream os(dir / "g.csv");
        write_csv(os, std::get<Tabulated>(w->kind).grid);
    }
    auto wf = weight_from_json(parse_json_text(R"({"kind": "tabulated", "file": "g.csv"})"), dir.string());
    CHECK(std::get<Tabulated>(wf->kind).grid.values == std::vector<double>{1, 2, 3, 4});
    CHECK(load_grid_csv((dir / "g.csv").string()).n1 == 2);
}

TEST_CASE("measures from json") {
    auto mu = measure_from_json(parse_json_text(R"({"kind": "atomic", "atoms": [[[0, 0], 2], [[3, 1], 0.5]]})"));
    Rectangle R{{0}, {0}, 1, 1};
    CHECK(rectangle_mass(*mu, R).value == 2);
    CHECK(to_json(*measure_from_json(to_json(*mu))) == to_json(*mu));

    auto leb = measure_from_json(parse_json_text(R"({"kind": "lebesgue"})"));
    CHECK(rectangle_mass(*leb, Rectangle{{5}, {-2}, 2, 3}).value == doctest::Approx(6));

    // a bare weight is read as its density
    auto d = measure_from_json(parse_json_text(R"({"kind": "product_power", "e1": 0, "e2": 0})"));
    CHECK(rectangle_mass(*d, Rectangle{{0.5}, {0.5}, 1, 1}).value == doctest::Approx(1));

    auto pm = measure_from_json(parse_json_text(
        R"({"kind": "product_measure", "left": {"kind": "dirac_origin"}, "right": {"kind": "lebesgue"}})"));
    CHECK(rectangle_mass(*pm, Rectangle{{0}, {0}, 1, 4}).value == doctest::Approx(4));
    CHECK(rectangle_mass(*pm, Rectangle{{2}, {0}, 1, 4}).value == 0);
}

TEST_CASE("non-finite numbers become strings") {
    CHECK(num(1.5) == 1.5);
    CHECK(num(INFINITY) == "inf");
    CHECK(num(-INFINITY) == "-inf");
    CHECK(num(NAN) == "nan");
    CHECK(to_json(Real::parse("1/3")) == "1/3");
    CHECK(to_json(Real(0.5)) == 0.5);
    auto idx = to_json(parse_indices("m=1,n=2,p=2,q=4,alpha=1/4,beta=1/2"));
    CHECK(idx["n"] == 2);
    CHECK(idx["alpha"] == "1/4");
}
