#include "pbsim/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "pbsim/errors.hpp"
#include "pbsim/format.hpp"

namespace pbsim {

using nlohmann::json;

namespace {

// Cursor into the document that knows its own dotted path.
class Node {
public:
    Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

    const std::string& path() const { return path_; }
    const json& raw() const { return value_; }

    [[noreturn]] void fail(const std::string& message) const { throw ConfigError(path_, message); }

    std::string child_path(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    bool has(std::string_view key) const {
        return value_.is_object() && value_.contains(std::string(key));
    }

    Node at(std::string_view key) const {
        require_object();
        if (!has(key)) {
            throw ConfigError(child_path(key), "required field is missing");
        }
        return Node(value_.at(std::string(key)), child_path(key));
    }

    std::optional<Node> find(std::string_view key) const {
        require_object();
        if (!has(key)) {
            return std::nullopt;
        }
        return Node(value_.at(std::string(key)), child_path(key));
    }

    Node element(std::size_t k) const {
        return Node(value_.at(k), path_ + "[" + std::to_string(k) + "]");
    }

    void require_object() const {
        if (!value_.is_object()) {
            fail("expected an object");
        }
    }

    const json& array() const {
        if (!value_.is_array()) {
            fail("expected an array");
        }
        return value_;
    }

    void only(std::initializer_list<std::string_view> allowed) const {
        require_object();
        for (const auto& [key, _] : value_.items()) {
            bool ok = false;
            for (auto a : allowed) {
                ok = ok || key == a;
            }
            if (!ok) {
                throw ConfigError(child_path(key), "unknown field");
            }
        }
    }

    double number() const {
        if (!value_.is_number()) {
            fail("expected a number");
        }
        const double v = value_.get<double>();
        if (!std::isfinite(v)) {
            fail("expected a finite number");
        }
        return v;
    }

    double positive() const {
        const double v = number();
        if (!(v > 0.0)) {
            fail("must be > 0 (got " + format_double(v) + ")");
        }
        return v;
    }

    double non_negative() const {
        const double v = number();
        if (!(v >= 0.0)) {
            fail("must be >= 0 (got " + format_double(v) + ")");
        }
        return v;
    }

    double soc() const {
        const double v = number();
        if (!(v >= 0.0 && v <= 1.0)) {
            fail("SOC must be in [0, 1] (got " + format_double(v) + ")");
        }
        return v;
    }

    std::size_t count() const {
        if (!value_.is_number_integer() || value_.get<long long>() <= 0) {
            fail("expected a positive integer");
        }
        return value_.get<std::size_t>();
    }

    std::string string() const {
        if (!value_.is_string()) {
            fail("expected a string");
        }
        return value_.get<std::string>();
    }

    bool boolean() const {
        if (!value_.is_boolean()) {
            fail("expected true or false");
        }
        return value_.get<bool>();
    }

private:
    const json& value_;
    std::string path_;
};

OcvConfig parse_ocv(const Node& n) {
    OcvConfig o;
    const std::string kind = n.at("kind").string();
    if (kind == "affine") {
        n.only({"kind", "u0", "alpha"});
        o.kind = OcvConfig::Kind::affine;
        o.u0 = n.at("u0").positive();
        o.alpha = n.at("alpha").positive();
    } else if (kind == "piecewise") {
        n.only({"kind", "breakpoints"});
        o.kind = OcvConfig::Kind::piecewise;
        const Node bp = n.at("breakpoints");
        for (std::size_t k = 0; k < bp.array().size(); ++k) {
            const Node pt = bp.element(k);
            if (!pt.raw().is_array() || pt.raw().size() != 2) {
                pt.fail("expected a [z, u] pair");
            }
            o.breakpoints.push_back({pt.element(0).number(), pt.element(1).number()});
        }
    } else if (kind == "table" || kind == "table_fit") {
        if (kind == "table") {
            n.only({"kind", "path"});
            o.kind = OcvConfig::Kind::table;
        } else {
            n.only({"kind", "path", "segments"});
            o.kind = OcvConfig::Kind::table_fit;
            o.segments = static_cast<int>(n.at("segments").count());
        }
        o.table = n.at("path").string();
    } else {
        n.at("kind").fail("unknown OCV kind '" + kind + "' (expected affine, piecewise, table or table_fit)");
    }
    return o;
}

json ocv_to_json(const OcvConfig& o) {
    switch (o.kind) {
        case OcvConfig::Kind::affine:
            return {{"kind", "affine"}, {"u0", o.u0}, {"alpha", o.alpha}};
        case OcvConfig::Kind::piecewise: {
            json bp = json::array();
            for (const auto& p : o.breakpoints) {
                bp.push_back({p.z, p.u});
            }
            return {{"kind", "piecewise"}, {"breakpoints", bp}};
        }
        case OcvConfig::Kind::table:
            return {{"kind", "table"}, {"path", o.table.generic_string()}};
        case OcvConfig::Kind::table_fit:
            return {{"kind", "table_fit"}, {"path", o.table.generic_string()}, {"segments", o.segments}};
    }
    return {};
}

CellConfig parse_cell(const Node& n) {
    n.only({"capacity_ah", "resistance_ohm"});
    return {n.at("capacity_ah").positive(), n.at("resistance_ohm").positive()};
}

ProtocolStep parse_step(const Node& n) {
    const std::string kind = n.at("kind").string();
    if (kind == "cc") {
        n.only({"kind", "current", "until"});
        CcStep s{n.at("current").number(), VoltageReached{0.0}};
        const Node until = n.at("until");
        if (until.has("voltage")) {
            until.only({"voltage"});
            s.until = VoltageReached{until.at("voltage").positive()};
        } else if (until.has("hours")) {
            until.only({"hours"});
            s.until = TimeElapsed{until.at("hours").non_negative()};
        } else if (until.has("soc")) {
            until.only({"soc", "cell"});
            const std::string cell = until.at("cell").string();
            if (cell != "a" && cell != "b") {
                until.at("cell").fail("expected \"a\" or \"b\"");
            }
            s.until = SocReached{cell == "a" ? CellId::a : CellId::b, until.at("soc").soc()};
        } else {
            until.fail("expected one of voltage, hours, soc");
        }
        return s;
    }
    if (kind == "cv") {
        n.only({"kind", "setpoint", "cutoff_current"});
        return CvStep{n.at("setpoint").positive(), n.at("cutoff_current").positive()};
    }
    if (kind == "rest") {
        n.only({"kind", "duration_h"});
        return RestStep{n.at("duration_h").non_negative()};
    }
    n.at("kind").fail("unknown step kind '" + kind + "' (expected cc, cv or rest)");
}

json step_to_json(const ProtocolStep& step) {
    if (const auto* cc = std::get_if<CcStep>(&step)) {
        json until;
        if (const auto* v = std::get_if<VoltageReached>(&cc->until)) {
            until = {{"voltage", v->volts}};
        } else if (const auto* t = std::get_if<TimeElapsed>(&cc->until)) {
            until = {{"hours", t->hours}};
        } else {
            const auto& z = std::get<SocReached>(cc->until);
            until = {{"soc", z.soc}, {"cell", z.cell == CellId::a ? "a" : "b"}};
        }
        return {{"kind", "cc"}, {"current", cc->current}, {"until", until}};
    }
    if (const auto* cv = std::get_if<CvStep>(&step)) {
        return {{"kind", "cv"}, {"setpoint", cv->setpoint}, {"cutoff_current", cv->cutoff_current_abs}};
    }
    return {{"kind", "rest"}, {"duration_h", std::get<RestStep>(step).duration_h}};
}

AxisConfig parse_axis(const Node& n) {
    AxisConfig a;
    if (n.has("values")) {
        n.only({"values"});
        const Node vals = n.at("values");
        for (std::size_t k = 0; k < vals.array().size(); ++k) {
            a.values.push_back(vals.element(k).positive());
        }
        try {
            Axis::list(a.values);
        } catch (const DomainError& e) {
            vals.fail(e.what());
        }
        return a;
    }
    n.only({"min", "max", "points", "spacing"});
    a.min = n.at("min").positive();
    a.max = n.at("max").positive();
    a.points = n.at("points").count();
    if (auto sp = n.find("spacing")) {
        const std::string s = sp->string();
        if (s == "log") {
            a.spacing = AxisSpacing::log;
        } else if (s == "linear") {
            a.spacing = AxisSpacing::linear;
        } else {
            sp->fail("expected \"log\" or \"linear\"");
        }
    }
    if (!(a.max > a.min)) {
        n.at("max").fail("must exceed min");
    }
    if (a.points < 2) {
        n.at("points").fail("need at least 2 points");
    }
    return a;
}

json axis_to_json(const AxisConfig& a) {
    if (!a.values.empty()) {
        return {{"values", a.values}};
    }
    return {{"min", a.min},
            {"max", a.max},
            {"points", a.points},
            {"spacing", a.spacing == AxisSpacing::log ? "log" : "linear"}};
}

Axis build_axis(const AxisConfig& a) {
    return a.values.empty() ? Axis::range(a.min, a.max, a.points, a.spacing) : Axis::list(a.values);
}

SweepConfig parse_sweep(const Node& n) {
    n.only({"q", "r", "current", "mode", "v_max", "z_a0", "z_b0"});
    SweepConfig s;
    s.q = parse_axis(n.at("q"));
    s.r = parse_axis(n.at("r"));
    s.current = n.at("current").number();
    const std::string mode = n.at("mode").string();
    if (mode == "analytic") {
        s.simulate = false;
    } else if (mode == "simulate") {
        s.simulate = true;
        if (auto v = n.find("v_max")) {
            s.simulation.v_max = v->positive();
        }
        if (auto v = n.find("z_a0")) {
            s.simulation.z_a0 = v->soc();
        }
        if (auto v = n.find("z_b0")) {
            s.simulation.z_b0 = v->soc();
        }
    } else {
        n.at("mode").fail("expected \"analytic\" or \"simulate\"");
    }
    return s;
}

json sweep_to_json(const SweepConfig& s) {
    json j = {{"q", axis_to_json(s.q)},
              {"r", axis_to_json(s.r)},
              {"current", s.current},
              {"mode", s.simulate ? "simulate" : "analytic"}};
    if (s.simulate) {
        j["v_max"] = s.simulation.v_max;
        j["z_a0"] = s.simulation.z_a0;
        j["z_b0"] = s.simulation.z_b0;
    }
    return j;
}

void check_ocv(const OcvConfig& o, const std::filesystem::path& base_dir, const Node& where) {
    try {
        build_ocv(o, base_dir);
    } catch (const DomainError& e) {
        where.fail(e.what());
    } catch (const FitError& e) {
        where.fail(e.what());
    }
}

}  // namespace

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    const Node root(doc, "");
    root.only({"pack", "ocv", "initial_state", "protocol", "integrator", "output", "sweep", "compare"});

    RunConfig c;
    c.base_dir = base_dir;

    const Node pack = root.at("pack");
    pack.only({"cell_a", "cell_b"});
    c.cell_a = parse_cell(pack.at("cell_a"));
    c.cell_b = parse_cell(pack.at("cell_b"));

    const Node ocv = root.at("ocv");
    c.ocv = parse_ocv(ocv);
    check_ocv(c.ocv, base_dir, ocv);

    if (auto init = root.find("initial_state")) {
        init->only({"z_a", "z_b"});
        c.initial_state = PackState{0.0, init->at("z_a").soc(), init->at("z_b").soc()};
    }

    if (auto steps = root.find("protocol")) {
        for (std::size_t k = 0; k < steps->array().size(); ++k) {
            c.protocol.push_back(parse_step(steps->element(k)));
        }
    }

    if (auto integ = root.find("integrator")) {
        integ->only({"dt_h", "voltage_tolerance", "max_steps"});
        if (auto v = integ->find("dt_h")) {
            c.integrator.dt_h = v->positive();
        }
        if (auto v = integ->find("voltage_tolerance")) {
            c.integrator.voltage_tolerance = v->positive();
        }
        if (auto v = integ->find("max_steps")) {
            c.integrator.max_steps = v->count();
        }
    }

    if (auto out = root.find("output")) {
        out->only({"dir", "basename", "formats"});
        if (auto v = out->find("dir")) {
            c.output.dir = v->string();
        }
        if (auto v = out->find("basename")) {
            c.output.basename = v->string();
            if (c.output.basename.empty() ||
                c.output.basename.find_first_of("/\\") != std::string::npos) {
                v->fail("must be a non-empty file name without directory separators");
            }
        }
        if (auto v = out->find("formats")) {
            c.output.csv = false;
            c.output.json = false;
            for (std::size_t k = 0; k < v->array().size(); ++k) {
                const Node f = v->element(k);
                const std::string name = f.string();
                if (name == "csv") {
                    c.output.csv = true;
                } else if (name == "json") {
                    c.output.json = true;
                } else {
                    f.fail("expected \"csv\" or \"json\"");
                }
            }
        }
    }

    if (auto sw = root.find("sweep")) {
        c.sweep = parse_sweep(*sw);
    }

    if (auto cmp = root.find("compare")) {
        cmp->only({"variants", "sample_every"});
        CompareConfig cc;
        if (auto v = cmp->find("sample_every")) {
            cc.sample_every = v->count();
        }
        const Node vars = cmp->at("variants");
        for (std::size_t k = 0; k < vars.array().size(); ++k) {
            const Node v = vars.element(k);
            v.only({"name", "ocv"});
            CompareVariant cv{v.at("name").string(), parse_ocv(v.at("ocv"))};
            if (cv.name.empty()) {
                v.at("name").fail("must be non-empty");
            }
            for (const auto& prev : cc.variants) {
                if (prev.name == cv.name) {
                    v.at("name").fail("duplicate variant name '" + cv.name + "'");
                }
            }
            check_ocv(cv.ocv, base_dir, v.at("ocv"));
            cc.variants.push_back(std::move(cv));
        }
        if (cc.variants.empty()) {
            vars.fail("need at least one variant");
        }
        c.compare = std::move(cc);
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("", path.string() + ": " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

json to_json(const RunConfig& c) {
    auto cell = [](const CellConfig& cc) {
        return json{{"capacity_ah", cc.capacity_ah}, {"resistance_ohm", cc.resistance_ohm}};
    };
    json steps = json::array();
    for (const auto& s : c.protocol) {
        steps.push_back(step_to_json(s));
    }
    json formats = json::array();
    if (c.output.csv) {
        formats.push_back("csv");
    }
    if (c.output.json) {
        formats.push_back("json");
    }
    json j = {
        {"pack", {{"cell_a", cell(c.cell_a)}, {"cell_b", cell(c.cell_b)}}},
        {"ocv", ocv_to_json(c.ocv)},
        {"initial_state", {{"z_a", c.initial_state.z_a}, {"z_b", c.initial_state.z_b}}},
        {"protocol", steps},
        {"integrator",
         {{"dt_h", c.integrator.dt_h},
          {"voltage_tolerance", c.integrator.voltage_tolerance},
          {"max_steps", c.integrator.max_steps}}},
        {"output",
         {{"dir", c.output.dir.generic_string()}, {"basename", c.output.basename}, {"formats", formats}}},
    };
    if (c.sweep) {
        j["sweep"] = sweep_to_json(*c.sweep);
    }
    if (c.compare) {
        json vars = json::array();
        for (const auto& v : c.compare->variants) {
            vars.push_back({{"name", v.name}, {"ocv", ocv_to_json(v.ocv)}});
        }
        j["compare"] = {{"sample_every", c.compare->sample_every}, {"variants", vars}};
    }
    return j;
}

OcvModel build_ocv(const OcvConfig& o, const std::filesystem::path& base_dir) {
    switch (o.kind) {
        case OcvConfig::Kind::affine:
            return AffineOcv(o.u0, o.alpha);
        case OcvConfig::Kind::piecewise:
            return PiecewiseAffineOcv(o.breakpoints);
        case OcvConfig::Kind::table:
            return load_tabulated_ocv(base_dir / o.table);
        case OcvConfig::Kind::table_fit:
            return fit_piecewise(load_tabulated_ocv(base_dir / o.table), o.segments).model;
    }
    throw ConfigError("ocv.kind", "unknown OCV kind");
}

PackParams build_pack(const RunConfig& c, const OcvModel& ocv) {
    return PackParams(CellParams(c.cell_a.capacity_ah, c.cell_a.resistance_ohm, ocv),
                      CellParams(c.cell_b.capacity_ah, c.cell_b.resistance_ohm, ocv));
}

PackParams build_pack(const RunConfig& c) { return build_pack(c, build_ocv(c.ocv, c.base_dir)); }

Protocol build_protocol(const RunConfig& c) {
    if (c.protocol.empty()) {
        throw ConfigError("protocol", "at least one step is required");
    }
    return Protocol{c.protocol, c.initial_state};
}

SweepSpec build_sweep(const RunConfig& c) {
    if (!c.sweep) {
        throw ConfigError("sweep", "section is required for this command");
    }
    const auto& s = *c.sweep;
    SweepMode mode = AnalyticSteadyState{};
    if (s.simulate) {
        mode = s.simulation;
    }
    const OcvModel ocv = build_ocv(c.ocv, c.base_dir);
    if (!s.simulate && ocv.as_affine() == nullptr) {
        throw ConfigError("sweep.mode", "analytic mode requires an affine OCV");
    }
    return SweepSpec{CellParams(c.cell_a.capacity_ah, c.cell_a.resistance_ohm, ocv),
                     build_axis(s.q), build_axis(s.r), s.current, mode};
}

}  // namespace pbsim
