#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "relo/config.hpp"
#include "relo/csv.hpp"
#include "relo/hexgrid.hpp"

using namespace relo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("relo_io_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("io") {

TEST_CASE("tensor long-format csv round trip with gaps") {
    TempDir tmp;
    Tensor3 t(3, 3, 4, 0.0);
    t.at(0, 1, 0) = 2.5;
    t.at(2, 2, 3) = 7.0;
    const auto p = tmp.path / "tensor.csv";
    csv::write_tensor(p, t, "value");
    const auto back = csv::read_tensor(p, 3, 3, 4);
    CHECK(back.values.at(0, 1, 0) == 2.5);
    CHECK(back.values.at(2, 2, 3) == 7.0);
    CHECK(back.has(0, 1, 0));
    CHECK_FALSE(back.has(1, 1, 1));  // gap preserved as missing
    CHECK(back.fill_rate() == doctest::Approx(2.0 / 36.0));
}

TEST_CASE("matrix long-format csv round trip") {
    TempDir tmp;
    Matrix m(2, 3, 0.0);
    m.at(0, 0) = 1.5;
    m.at(1, 2) = -4.0;
    const auto p = tmp.path / "matrix.csv";
    csv::write_matrix_long(p, m, "value");
    const auto back = csv::read_matrix_long(p, 2, 3);
    CHECK(back.v == m.v);
}

TEST_CASE("grid csv round trip") {
    TempDir tmp;
    geo::Ring poly = {{0, 0}, {1500, 0}, {1500, 1500}, {0, 1500}};
    const auto grid = hex::tessellate(poly, 250);
    const auto p = tmp.path / "grid.csv";
    hex::write_grid_csv(p, grid);
    const auto back = hex::read_grid_csv(p, 250);
    REQUIRE(back.size() == grid.size());
    for (int c = 0; c < grid.size(); ++c) {
        CHECK(back.cell(c).center.x == doctest::Approx(grid.cell(c).center.x));
        CHECK(back.cell(c).neighbor_ids == grid.cell(c).neighbor_ids);
    }
}

TEST_CASE("geojson polygon reader accepts plain and feature forms") {
    TempDir tmp;
    const auto p = tmp.path / "area.geojson";
    {
        std::ofstream out(p);
        out << R"({"type":"Polygon","coordinates":[[[0,0],[1000,0],[1000,800],[0,800],[0,0]]]})";
    }
    const auto ring = hex::read_geojson_polygon(p);
    REQUIRE(ring.size() == 4);  // closing vertex dropped
    CHECK(ring[2].x == 1000);
    CHECK(ring[2].y == 800);

    {
        std::ofstream out(p);
        out << R"({"type":"Feature","properties":{},"geometry":)"
            << R"({"type":"Polygon","coordinates":[[[0,0],[10,0],[10,10],[0,0]]]}})";
    }
    CHECK(hex::read_geojson_polygon(p).size() == 3);
}

TEST_CASE("road graph csv: nodes deduplicated, lengths honored") {
    TempDir tmp;
    const auto p = tmp.path / "roads.csv";
    {
        std::ofstream out(p);
        out << "node_a_x,node_a_y,node_b_x,node_b_y,length_m\n";
        out << "0,0,100,0,120\n";
        out << "100,0,100,90,95\n";
    }
    geo::Ring poly = {{-200, -200}, {400, -200}, {400, 400}, {-200, 400}};
    const auto grid = hex::tessellate(poly, 250);
    const auto g = hex::read_road_graph_csv(p, grid);
    CHECK(g.nodes.size() == 3);
    CHECK(g.cell_anchor.size() == static_cast<size_t>(grid.size()));
}

TEST_CASE("toml subset: tables, strings, numbers, booleans, comments") {
    const auto t = cfg::Toml::parse(
        "# comment\n[run]\nscenarios = 250 # inline\nseed = 9\n\n[policy]\nkind = \"ranking\"\n"
        "paper_literal_update = false\nw_tt = 0.07\n");
    CHECK(t.get_number("run", "scenarios", 0) == 250);
    CHECK(t.get_number("run", "seed", 0) == 9);
    CHECK(t.get_string("policy", "kind", "") == "ranking");
    CHECK(t.get_bool("policy", "paper_literal_update", true) == false);
    CHECK(t.get_number("policy", "w_tt", 0) == doctest::Approx(0.07));
    CHECK(t.get_number("policy", "absent", 1.5) == 1.5);
}

TEST_CASE("run config loads, resolves paths, and validates") {
    TempDir tmp;
    const auto cfg_path = tmp.path / "run.toml";
    {
        std::ofstream out(cfg_path);
        out << "[data]\ntrips = \"trips.csv\"\nactivity = \"activity.csv\"\n"
               "travel = \"travel.csv\"\nzones = 3\nslots = 4\n"
               "[model]\nfleet = 9\nstaff = 2\n"
               "[policy]\nkind = \"ranking\"\npredictor = \"ma4\"\n"
               "[run]\nscenarios = 5\nseed = 3\n";
    }
    const auto rc = cfg::load_run_config(cfg_path);
    CHECK(rc.zones == 3);
    CHECK(rc.fleet == 9);
    CHECK(rc.policy.availability.kind == pred::AvailabilityKind::moving_average);
    CHECK(rc.policy.availability.window == 4);
    CHECK(rc.trips == tmp.path / "trips.csv");

    // missing data files surface as data errors
    CHECK_THROWS(cfg::load_instance(rc));

    // write the tensors and load for real
    Tensor3 trips(3, 3, 4, 0.5);
    csv::write_tensor(tmp.path / "trips.csv", trips, "trips");
    Matrix act(3, 4, 30.0);
    csv::write_matrix_long(tmp.path / "activity.csv", act, "count");
    Tensor3 travel(3, 3, 4, 20.0);
    csv::write_tensor(tmp.path / "travel.csv", travel, "minutes");
    const auto inst = cfg::load_instance(rc);
    CHECK(inst.zones() == 3);
    CHECK(inst.fleet == 9);
    CHECK(inst.lambda.values.min_positive() > 0.0);
}

TEST_CASE("bad config values are rejected") {
    CHECK_THROWS(cfg::Toml::parse("[x]\nbroken line\n"));
    const auto t = cfg::Toml::parse("[a]\nk = \"maybe\"\n");
    CHECK_THROWS(t.get_bool("a", "k", false));
}

}  // TEST_SUITE
