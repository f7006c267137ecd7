#include <doctest.h>

#include <sstream>

#include "sglm/panel_io.hpp"

using namespace sglm;
using Eigen::MatrixXd;

TEST_CASE("simulated panel survives a write/read round trip bit for bit") {
    SimConfig c;
    c.family = Family::gamma(2.0);
    c.m = 40;
    c.q = 4;
    c.seed = 8;
    const SimTruth truth = simulate::generate(c);
    io::PanelData panel = io::panel_from_truth(truth);
    panel.comments = {"command=simulate", "seed=8"};

    std::stringstream ss;
    io::write_table(ss, io::table_from_panel(panel));
    const io::PanelData back = io::panel_from_table(io::read_table(ss));
    CHECK(back.comments == panel.comments);
    CHECK(back.x_names == panel.x_names);
    CHECK(back.y_names == panel.y_names);
    CHECK(back.truth_names == panel.truth_names);
    CHECK(back.x == panel.x);
    CHECK(back.y == panel.y);
    CHECK(back.truth == panel.truth);
    CHECK(back.truth_index("offset") == 1);
    CHECK(back.y_index("s3") == 2);
}

TEST_CASE("number formatting is lossless") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0})
        CHECK(std::stod(io::format_number(v)) == v);
    CHECK(io::format_number(NAN) == "nan");
}

TEST_CASE("parse errors carry their location") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return io::read_table(in);
    };
    CHECK_THROWS_WITH_AS(parse("x_a,y_b\n1,2\n3,\n"), doctest::Contains("row 2"), ParseError);
    CHECK_THROWS_WITH_AS(parse("x_a,y_b\n1,2\n3,abc\n"), doctest::Contains("column 'y_b'"), ParseError);
    CHECK_THROWS_AS(parse("x_a,y_b\n1,2,3\n"), ParseError);
    CHECK_THROWS_AS(parse("# only comments\n"), ParseError);
    CHECK_THROWS_AS(parse("a,a\n1,2\n"), ParseError);

    const io::Table t = parse("# hello\nx_a,y_b\n 1e-3 , 2\n\n4,5\r\n");
    CHECK(t.comments == std::vector<std::string>{"hello"});
    CHECK(t.data.rows() == 2);
    CHECK(t.data(0, 0) == 1e-3);
    CHECK(t.data(1, 1) == 5.0);

    CHECK_THROWS_AS(io::panel_from_table(parse("x_a,z_b\n1,2\n")), ParseError);
    CHECK_THROWS_AS(io::panel_from_table(parse("x_a\n1\n")), ParseError);
}
