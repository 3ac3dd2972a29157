#include "pbsim/commands.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>

#include "pbsim/analytic.hpp"
#include "pbsim/errors.hpp"
#include "pbsim/format.hpp"
#include "pbsim/series_io.hpp"

namespace pbsim::cli {

namespace {

// Runs `body`, translating library exceptions into exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << '\n';
        return kConfigError;
    } catch (const UnsupportedModelError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const StepError& e) {
        err << "simulation error: " << e.what() << '\n';
        return kRuntimeError;
    } catch (const SocRangeError& e) {
        err << "simulation error: " << e.what() << '\n';
        return kRuntimeError;
    } catch (const NonTerminationError& e) {
        err << "simulation error: " << e.what() << '\n';
        return kRuntimeError;
    } catch (const DomainError& e) {
        err << "invalid parameter: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIoError;
    }
}

std::filesystem::path output_dir(const RunConfig& cfg, const CommonOptions& opts) {
    return opts.out_dir ? *opts.out_dir : cfg.output.dir;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& emit) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory '" + path.parent_path().string() +
                          "': " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    emit(out);
    out.flush();
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
    write_file(path, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
}

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

int cmd_simulate(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_config(opts.config);
        const PackParams pack = build_pack(cfg);
        const Protocol protocol = build_protocol(cfg);
        const TimeSeries series = run_protocol(pack, protocol, cfg.integrator);

        const auto dir = output_dir(cfg, opts);
        const auto stem = cfg.output.basename + "_series";
        if (cfg.output.csv) {
            write_file(dir / (stem + ".csv"), [&](std::ostream& o) { write_series_csv(o, series); });
        }
        if (cfg.output.json) {
            write_json_file(dir / (stem + ".json"), series_to_json(series));
        }

        std::optional<CycleSummary> summary;
        try {
            summary = summarize_cycle(series);
        } catch (const StructureError&) {
        }
        std::optional<GalvanostaticSolution> reference;
        double charge_current = 0.0;
        if (summary && pack.ocv().as_affine() != nullptr) {
            for (const auto& r : series.records) {
                if (r.mode == Mode::cc && r.applied_i < 0.0) {
                    charge_current = r.applied_i;
                    break;
                }
            }
            reference = galvanostatic_solution(pack, protocol.initial_state.delta_z(), charge_current);
        }

        if (opts.json) {
            nlohmann::json j = {{"records", series.size()}, {"t_end_h", series.back().t_h}};
            if (summary) {
                j["summary"] = {{"dz_end_of_charge", summary->dz_end_of_charge},
                                {"di_end_of_charge", summary->di_end_of_charge},
                                {"dz_end_of_discharge", optional_json(summary->dz_end_of_discharge)},
                                {"di_end_of_discharge", optional_json(summary->di_end_of_discharge)},
                                {"peak_abs_i_a", summary->peak_abs_i_a},
                                {"peak_abs_i_b", summary->peak_abs_i_b}};
            }
            if (reference) {
                j["affine_reference"] = {{"tau_h", reference->tau_h},
                                         {"kappa", reference->kappa},
                                         {"dz_ss", reference->dz_ss},
                                         {"di_ss", reference->di_ss}};
            }
            out << j.dump(2) << '\n';
            return kOk;
        }

        out << "records            " << series.size() << '\n';
        out << "end time           " << format_double(series.back().t_h) << " h\n";
        if (summary) {
            out << "end of charge      dz = " << format_double(summary->dz_end_of_charge)
                << "  di = " << format_double(summary->di_end_of_charge) << " A\n";
            if (summary->dz_end_of_discharge) {
                out << "end of discharge   dz = " << format_double(*summary->dz_end_of_discharge)
                    << "  di = " << format_double(*summary->di_end_of_discharge) << " A\n";
            }
            out << "peak |i_a|         " << format_double(summary->peak_abs_i_a) << " A\n";
            out << "peak |i_b|         " << format_double(summary->peak_abs_i_b) << " A\n";
        }
        if (reference) {
            out << "affine steady state (charge current " << format_double(charge_current) << " A)\n";
            out << "  tau              " << format_double(reference->tau_h) << " h\n";
            out << "  dz_ss = kappa*I  " << format_double(reference->dz_ss) << '\n';
            out << "  di_ss            " << format_double(reference->di_ss) << " A\n";
        }
        return kOk;
    });
}

int cmd_steady_state(const SteadyStateOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const OcvModel ocv = AffineOcv(o.u0, o.alpha);
        const PackParams pack(CellParams(o.qa, o.ra, ocv), CellParams(o.qb, o.rb, ocv));
        const auto sol = galvanostatic_solution(pack, 0.0, o.current);
        const double bound = crate_observability_bound(pack, o.z_min, o.z_max);

        if (o.json) {
            nlohmann::json j = {{"tau_h", sol.tau_h},
                                {"three_tau_h", 3.0 * sol.tau_h},
                                {"kappa_soc_per_a", sol.kappa},
                                {"dz_ss", sol.dz_ss},
                                {"di_ss_a", sol.di_ss},
                                {"crate_bound_per_h", bound},
                                {"z_window", {o.z_min, o.z_max}}};
            out << j.dump(2) << '\n';
            return kOk;
        }
        out << "tau          " << format_double(sol.tau_h) << " h\n";
        out << "3*tau        " << format_double(3.0 * sol.tau_h) << " h\n";
        out << "kappa        " << format_double(sol.kappa) << " SOC/A\n";
        out << "dz_ss        " << format_double(sol.dz_ss) << " SOC\n";
        out << "di_ss        " << format_double(sol.di_ss) << " A\n";
        out << "C-rate bound " << format_double(bound) << " 1/h (SOC window "
            << format_double(o.z_min) << ".." << format_double(o.z_max) << ")\n";
        return kOk;
    });
}

int cmd_sweep(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_config(opts.config);
        const SweepSpec spec = build_sweep(cfg);
        const SweepGrid grid = run_sweep(spec, cfg.integrator, opts.jobs);
        const ZeroContours contours = zero_contours(grid);

        const auto dir = output_dir(cfg, opts);
        const auto& base = cfg.output.basename;
        if (cfg.output.csv) {
            write_file(dir / (base + "_grid.csv"), [&](std::ostream& o) { write_grid_csv(o, grid); });
            write_file(dir / (base + "_zero_contours.csv"),
                       [&](std::ostream& o) { write_contours_csv(o, contours); });
        }
        if (cfg.output.json) {
            auto doc = grid_to_json(grid);
            auto points = [](const std::vector<QrPoint>& pts) {
                auto a = nlohmann::json::array();
                for (const auto& p : pts) {
                    a.push_back({p.q, p.r});
                }
                return a;
            };
            doc["zero_contours"] = {{"dz", points(contours.dz_zero)}, {"di", points(contours.di_zero)}};
            write_json_file(dir / (base + "_grid.json"), doc);
        }

        std::size_t ok = 0;
        for (auto s : grid.status) {
            ok += s == PointStatus::ok ? 1 : 0;
        }
        if (opts.json) {
            out << nlohmann::json{{"points", grid.status.size()},
                                  {"ok", ok},
                                  {"dz_zero_points", contours.dz_zero.size()},
                                  {"di_zero_points", contours.di_zero.size()}}
                       .dump(2)
                << '\n';
        } else {
            out << "grid               " << grid.q.size() << " x " << grid.r.size() << '\n';
            out << "points ok          " << ok << " / " << grid.status.size() << '\n';
            out << "dz zero points     " << contours.dz_zero.size() << '\n';
            out << "di zero points     " << contours.di_zero.size() << '\n';
        }
        return kOk;
    });
}

ComparisonTable compare_variants(const RunConfig& cfg) {
    if (!cfg.compare) {
        throw ConfigError("compare", "section is required for this command");
    }
    const Protocol protocol = build_protocol(cfg);

    std::vector<TimeSeries> runs;
    ComparisonTable table;
    for (const auto& v : cfg.compare->variants) {
        const PackParams pack = build_pack(cfg, build_ocv(v.ocv, cfg.base_dir));
        runs.push_back(run_protocol(pack, protocol, cfg.integrator));
        table.names.push_back(v.name);
    }

    const double t0 = protocol.initial_state.t_h;
    double t_end = t0;
    for (const auto& r : runs) {
        t_end = std::max(t_end, r.back().t_h);
    }
    const double spacing = static_cast<double>(cfg.compare->sample_every) * cfg.integrator.dt_h;
    for (std::size_t k = 0;; ++k) {
        const double t = t0 + static_cast<double>(k) * spacing;
        if (t > t_end) {
            break;
        }
        table.t_h.push_back(t);
    }

    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& run : runs) {
        std::vector<double> dz;
        std::vector<double> di;
        for (double t : table.t_h) {
            if (t > run.back().t_h) {
                dz.push_back(nan);
                di.push_back(nan);
                continue;
            }
            const Record r = sample_at(run, t);
            dz.push_back(r.delta_z());
            di.push_back(r.delta_i());
        }
        table.dz.push_back(std::move(dz));
        table.di.push_back(std::move(di));
    }
    return table;
}

void write_comparison_csv(std::ostream& out, const ComparisonTable& table) {
    out << 't';
    for (const auto& n : table.names) {
        out << ",dz_" << n << ",di_" << n;
    }
    out << '\n';
    auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
    for (std::size_t k = 0; k < table.t_h.size(); ++k) {
        out << format_double(table.t_h[k]);
        for (std::size_t v = 0; v < table.names.size(); ++v) {
            out << ',' << cell(table.dz[v][k]) << ',' << cell(table.di[v][k]);
        }
        out << '\n';
    }
}

int cmd_compare(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_config(opts.config);
        const ComparisonTable table = compare_variants(cfg);
        const auto path = output_dir(cfg, opts) / (cfg.output.basename + "_compare.csv");
        write_file(path, [&](std::ostream& o) { write_comparison_csv(o, table); });

        nlohmann::json j = nlohmann::json::object();
        for (std::size_t v = 0; v < table.names.size(); ++v) {
            double dz_last = std::numeric_limits<double>::quiet_NaN();
            for (double x : table.dz[v]) {
                if (!std::isnan(x)) {
                    dz_last = x;
                }
            }
            j[table.names[v]] = {{"last_sampled_dz", dz_last}};
        }
        if (opts.json) {
            out << nlohmann::json{{"samples", table.t_h.size()}, {"file", path.string()}, {"variants", j}}
                       .dump(2)
                << '\n';
        } else {
            out << "samples            " << table.t_h.size() << '\n';
            out << "written            " << path.string() << '\n';
        }
        return kOk;
    });
}

}  // namespace pbsim::cli
