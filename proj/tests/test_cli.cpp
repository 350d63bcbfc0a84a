#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <sstream>

#include "curlflux/cli.hpp"

using namespace curlflux;

namespace {

std::string usage_path(const std::function<void()>& f) {
    try {
        f();
    } catch (const UsageError& e) {
        return e.path;
    }
    return "<none>";
}

double column_value(const ResultTable& t, const std::string& col, std::size_t row) {
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i] == col) return std::get<double>(t.rows.at(row).at(i));
    FAIL("missing column " << col);
    return NAN;
}

std::string meta(const ResultTable& t, const std::string& key) {
    for (const auto& [k, v] : t.metadata)
        if (k == key) return v;
    return "";
}

}  // namespace

TEST_CASE("shape descriptions") {
    const ShapeSpec s = parse_shape("disk:r=0.5,z=0.25", "surface");
    CHECK(s.kind == "disk");
    CHECK(s.get("r", 0) == 0.5);
    CHECK(s.get("z", 0) == 0.25);
    CHECK(s.get("x", 7) == 7);
    CHECK(parse_shape("ball", "region").params.empty());
    CHECK(usage_path([] { parse_shape("disk:r=abc", "surface"); }) == "surface.r");
    CHECK(usage_path([] { parse_shape("disk:r", "surface"); }) == "surface");
    CHECK(usage_path([] { parse_shape("", "region"); }) == "region");
}

TEST_CASE("json config overrides and reports field paths") {
    RunConfig cfg;
    apply_config_json(cfg, R"({"command":"br","grid":"16x8","dt":0.02,"tolerances":{"flux":1e-4}})");
    CHECK(cfg.command == "br");
    CHECK(cfg.grid_n1 == 16);
    CHECK(cfg.grid_n2 == 8);
    CHECK(cfg.dt == 0.02);
    CHECK(cfg.tol("flux", 1.0) == 1e-4);
    CHECK(cfg.tol("other", 1.0) == 1.0);
    CHECK(usage_path([&] { apply_config_json(cfg, R"({"bogus":1})"); }) == "config.bogus");
    CHECK(usage_path([&] { apply_config_json(cfg, R"({"dt":"fast"})"); }) == "config.dt");
    CHECK(usage_path([&] { apply_config_json(cfg, R"({"grid":"16"})"); }) == "config.grid");
    CHECK(usage_path([&] { apply_config_json(cfg, "[1,2]"); }) == "config");
    CHECK(usage_path([&] { apply_config_json(cfg, "{"); }) == "config");
}

TEST_CASE("config validation") {
    RunConfig cfg;
    cfg.command = "stokes";
    CHECK_NOTHROW(validate_config(cfg));
    auto bad = [&](auto mutate) {
        RunConfig c = cfg;
        mutate(c);
        return usage_path([&] { validate_config(c); });
    };
    CHECK(bad([](RunConfig& c) { c.command = "fly"; }) == "command");
    CHECK(bad([](RunConfig& c) { c.field = "unknown"; }) == "field");
    CHECK(bad([](RunConfig& c) { c.route = "sideways"; }) == "route");
    CHECK(bad([](RunConfig& c) { c.format = "xml"; }) == "format");
    CHECK(bad([](RunConfig& c) { c.t = 1.5; }) == "t");
    CHECK(bad([](RunConfig& c) { c.deltas = {0.7}; }) == "deltas");
    CHECK(bad([](RunConfig& c) { c.side = "both"; }) == "side");
    CHECK(bad([](RunConfig& c) {
              c.command = "br";
              c.dt = -1;
          }) == "br.dt");
    CHECK(bad([](RunConfig& c) {
              c.command = "reproduce";
              c.name = "nothing";
          }) == "name");
    CHECK(bad([](RunConfig& c) { c.tolerances["flux"] = -1; }) == "tolerances.flux");
}

TEST_CASE("csv and json emission") {
    ResultTable t;
    t.columns = {"a", "b", "c", "d"};
    t.add_row({1.5, 2LL, std::string("x,y"), true});
    t.meta("field", "line_vortex");
    CHECK_THROWS(t.add_row({1.0}));
    const std::string csv = t.to_csv();
    CHECK(csv.find("# tool: curlflux") == 0);
    CHECK(csv.find("# field: line_vortex\n") != std::string::npos);
    CHECK(csv.find("# status: ok\n") != std::string::npos);
    CHECK(csv.find("a,b,c,d\n1.5,2,\"x,y\",true\n") != std::string::npos);
    const auto j = nlohmann::json::parse(t.to_json());
    CHECK(j["columns"].size() == 4);
    CHECK(j["rows"][0][0] == 1.5);
    CHECK(j["rows"][0][2] == "x,y");
    CHECK(j["metadata"]["field"] == "line_vortex");
    CHECK(j["status"] == "ok");
}

TEST_CASE("stokes command on the line vortex") {
    RunConfig cfg;
    cfg.command = "stokes";
    const ResultTable t = run(cfg);
    CHECK(t.ok);
    REQUIRE(t.rows.size() == 1);
    CHECK(column_value(t, "flux", 0) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("annuli example reports non-convergence") {
    RunConfig cfg;
    cfg.command = "example";
    cfg.name = "annuli";
    const ResultTable t = run(cfg);
    CHECK(meta(t, "verdict") == "NON-CONVERGENT");
    REQUIRE(t.rows.size() == 10);
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        CHECK(column_value(t, "localizer", r) == doctest::Approx(column_value(t, "closed_form", r)).epsilon(1e-9));
    cfg.t = 0.3;
    CHECK(meta(run(cfg), "verdict") == "CONVERGENT");
}

TEST_CASE("validate command") {
    RunConfig cfg;
    cfg.command = "validate";
    cfg.field = "rigid_rotation";
    const ResultTable t = run(cfg);
    CHECK(t.ok);
    CHECK(t.rows.size() == 4);
}

TEST_CASE("trace-only fields are rejected where a curl is needed") {
    RunConfig cfg;
    cfg.command = "stokes";
    cfg.field = "annuli";
    cfg.route = "transversal";
    CHECK(usage_path([&] { run(cfg); }) == "route");
}

TEST_CASE("br command emits one frame per dump") {
    RunConfig cfg;
    cfg.command = "br";
    cfg.grid_n1 = cfg.grid_n2 = 8;
    cfg.steps = 2;
    const ResultTable ok = run(cfg);
    CHECK(ok.ok);
    CHECK(ok.rows.size() == 64);
    cfg.dump_every = 1;
    CHECK(run(cfg).rows.size() == 3 * 64);
}

TEST_CASE("output is byte-identical across runs") {
    RunConfig cfg;
    cfg.command = "br";
    cfg.grid_n1 = cfg.grid_n2 = 8;
    cfg.gamma = "perturbed";
    cfg.steps = 3;
    std::ostringstream a, b;
    write_table(run(cfg), cfg, a);
    write_table(run(cfg), cfg, b);
    CHECK(a.str() == b.str());
    cfg.format = "json";
    std::ostringstream c, d;
    write_table(run(cfg), cfg, c);
    write_table(run(cfg), cfg, d);
    CHECK(c.str() == d.str());
}

TEST_CASE("reproduce targets") {
    CHECK(reproduce_names().size() == 11);
    CHECK(usage_path([] { reproduce("nothing"); }) == "name");
    const ResultTable t = reproduce("gluing");
    CHECK(t.ok);
    CHECK(t.columns == std::vector<std::string>{"quantity", "computed", "reference", "tolerance", "pass"});
    RunConfig custom;
    custom.tolerances["faraday_random"] = 1e-3;
    const ResultTable f = reproduce("faraday", custom);
    REQUIRE(f.rows.size() == 6);
    CHECK(std::get<double>(f.rows.back().at(3)) == 1e-3);
}
