#include <catch_amalgamated.hpp>

#include <fstream>

#include "pbsim/config.hpp"
#include "pbsim/errors.hpp"
#include "support.hpp"

using namespace pbsim;
using nlohmann::json;

namespace {

json minimal() {
    return json::parse(R"({
      "pack": {"cell_a": {"capacity_ah": 5, "resistance_ohm": 0.05},
               "cell_b": {"capacity_ah": 5.6, "resistance_ohm": 0.033}},
      "ocv": {"kind": "affine", "u0": 3.0, "alpha": 1.2},
      "initial_state": {"z_a": 0.25, "z_b": 0.3},
      "protocol": [{"kind": "cc", "current": -1.67, "until": {"voltage": 4.2}}]
    })");
}

std::string field_of(const json& doc) {
    try {
        parse_config(doc, testing::kSourceDir / "configs");
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

}  // namespace

TEST_CASE("shipped configs load", "[config]") {
    for (const char* name : {"fig2.cfg", "fig3.cfg", "fig4.cfg"}) {
        INFO(name);
        const auto cfg = load_config(testing::kSourceDir / "configs" / name);
        CHECK_NOTHROW(build_pack(cfg));
    }
    const auto fig4 = load_config(testing::kSourceDir / "configs/fig4.cfg");
    REQUIRE(fig4.compare.has_value());
    CHECK(fig4.compare->variants.size() == 3);
    CHECK(build_ocv(fig4.compare->variants[2].ocv, fig4.base_dir).kind() == "piecewise");
    CHECK(build_pack(fig4).ocv().kind() == "table");
}

TEST_CASE("minimal config gets documented defaults", "[config]") {
    const auto cfg = parse_config(minimal(), ".");
    CHECK(cfg.integrator.dt_h == 1e-3);
    CHECK(cfg.output.basename == "run");
    CHECK(cfg.output.csv);
    CHECK(cfg.output.json);
    CHECK_FALSE(cfg.sweep.has_value());
    CHECK(build_protocol(cfg).steps.size() == 1);
}

TEST_CASE("invalid values are reported with their field path", "[config]") {
    auto doc = minimal();
    doc["pack"]["cell_a"]["resistance_ohm"] = 0.0;
    CHECK(field_of(doc) == "pack.cell_a.resistance_ohm");

    doc = minimal();
    doc["pack"]["cell_b"].erase("capacity_ah");
    CHECK(field_of(doc) == "pack.cell_b.capacity_ah");

    doc = minimal();
    doc["initial_state"]["z_b"] = 1.5;
    CHECK(field_of(doc) == "initial_state.z_b");

    doc = minimal();
    doc["protocol"][0]["until"] = {{"soc", 0.9}, {"cell", "c"}};
    CHECK(field_of(doc) == "protocol[0].until.cell");

    doc = minimal();
    doc["ocv"]["kind"] = "cubic";
    CHECK(field_of(doc) == "ocv.kind");

    doc = minimal();
    doc["ocv"] = {{"kind", "piecewise"}, {"breakpoints", {{0.0, 3.0}, {0.5, 2.9}, {1.0, 4.2}}}};
    CHECK(field_of(doc) == "ocv");

    doc = minimal();
    doc["integrator"] = {{"dt_h", -1.0}};
    CHECK(field_of(doc) == "integrator.dt_h");

    doc = minimal();
    doc["pack"]["cell_a"]["capacity"] = 5.0;
    CHECK(field_of(doc) == "pack.cell_a.capacity");

    doc = minimal();
    doc["pack"]["cell_a"]["capacity_ah"] = "five";
    CHECK(field_of(doc) == "pack.cell_a.capacity_ah");

    doc = minimal();
    doc["output"] = {{"formats", {"xml"}}};
    CHECK(field_of(doc) == "output.formats[0]");
}

TEST_CASE("an empty protocol is rejected when it is needed", "[config]") {
    auto doc = minimal();
    doc.erase("protocol");
    const auto cfg = parse_config(doc, ".");
    try {
        build_protocol(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "protocol");
    }
}

TEST_CASE("analytic sweeps need an affine OCV", "[config]") {
    auto doc = minimal();
    doc["ocv"] = {{"kind", "table"}, {"path", "../data/ocv/nmc_graphite.csv"}};
    doc["sweep"] = json::parse(R"({"q": {"min": 0.5, "max": 2, "points": 3},
                                   "r": {"values": [0.5, 1, 2]},
                                   "current": -1.67, "mode": "analytic"})");
    const auto cfg = parse_config(doc, testing::kSourceDir / "configs");
    try {
        build_sweep(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "sweep.mode");
    }
}

TEST_CASE("a missing OCV table is an I/O error", "[config]") {
    auto doc = minimal();
    doc["ocv"] = {{"kind", "table"}, {"path", "no/such/table.csv"}};
    CHECK_THROWS_AS(parse_config(doc, "."), IoError);
    auto missing_path = minimal();
    missing_path["ocv"] = {{"kind", "table"}};
    CHECK(field_of(missing_path) == "ocv.path");
}

TEST_CASE("config files may carry comments; syntax errors are config errors", "[config]") {
    const auto dir = std::filesystem::temp_directory_path() / "pbsim_config_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "ok.cfg") << "// comment\n" << minimal().dump() << '\n';
        std::ofstream(dir / "broken.cfg") << "{ \"pack\": ";
    }
    CHECK_NOTHROW(load_config(dir / "ok.cfg"));
    CHECK_THROWS_AS(load_config(dir / "broken.cfg"), ConfigError);
    CHECK_THROWS_AS(load_config(dir / "absent.cfg"), IoError);
}

TEST_CASE("emitting and re-reading a config is lossless", "[config]") {
    for (const char* name : {"fig2.cfg", "fig3.cfg", "fig4.cfg"}) {
        INFO(name);
        const auto cfg = load_config(testing::kSourceDir / "configs" / name);
        const auto emitted = to_json(cfg);
        const auto again = parse_config(emitted, cfg.base_dir);
        CHECK(to_json(again) == emitted);
    }
}
