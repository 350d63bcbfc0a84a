#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "curlflux/cli.hpp"
#include "curlflux/stokes.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw curlflux::UsageError("config", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void parse_tolerances(const std::vector<std::string>& items, curlflux::RunConfig& cfg) {
    for (const auto& it : items) {
        const auto eq = it.find('=');
        if (eq == std::string::npos) throw curlflux::UsageError("tolerances", "expected key=value, got '" + it + "'");
        try {
            cfg.tolerances[it.substr(0, eq)] = std::stod(it.substr(eq + 1));
        } catch (const std::exception&) {
            throw curlflux::UsageError("tolerances." + it.substr(0, eq), "not a number");
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    curlflux::RunConfig cfg;
    std::string config_path;
    std::string grid;
    std::vector<std::string> tol_items;

    CLI::App app{"Generalized Stokes functionals, traces and vortex sheets for curl-measure fields"};
    app.set_version_flag("--version", "curlflux " + curlflux::tool_version());
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->always_capture_default();
    app.add_option("--config", config_path, "JSON config; its keys override flags");
    app.add_option("-o,--output", cfg.output, "Output file (default stdout)");
    app.add_option("--emit,--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--tol", tol_items, "Tolerance override key=value (repeatable)");

    auto delta_opts = [&](CLI::App* sub) {
        sub->add_option("--deltas", cfg.deltas, "Explicit delta sequence")->delimiter(',');
        sub->add_option("--delta-max-j", cfg.delta_max_j, "Delta sequence 2^-j, j = 2..J");
    };

    auto* trace = app.add_subcommand("trace", "Layerwise tangential trace on a region boundary");
    trace->add_option("--field", cfg.field, "Catalog field");
    trace->add_option("--region", cfg.region, "ball:r=..|half_ball:r=..|cylinder:r=..,z0=..,z1=..|box:..");
    trace->add_option("--side", cfg.side, "interior or exterior");
    trace->add_option("--t-grid", cfg.t_grid, "Layer parameters")->delimiter(',');
    trace->add_option("--eps", cfg.eps, "Total-variation diagnostic on eps grid instead")->delimiter(',');
    trace->add_option("--order", cfg.order, "Quadrature order");

    auto* stokes = app.add_subcommand("stokes", "Stokes functional and vorticity flux through a surface");
    stokes->add_option("--field", cfg.field, "Catalog field");
    stokes->add_option("--surface", cfg.surface, "disk:r=..,x=..,y=..,z=..|rect:a=..,b=..,z=..");
    stokes->add_option("--region", cfg.region, "Region for the transversal route");
    stokes->add_option("--route", cfg.route, "tangential, transversal, mass or all");
    stokes->add_option("--t", cfg.t, "Collar parameter");
    delta_opts(stokes);

    auto* maximal = app.add_subcommand("maximal", "Transversal maximal function and good-set scan");
    maximal->add_option("--field", cfg.field, "Catalog field");
    maximal->add_option("--surface", cfg.surface, "Surface on a region face");
    maximal->add_option("--region", cfg.region, "Region carrying the surface");
    maximal->add_option("--t-grid", cfg.t_grid, "Layer parameters")->delimiter(',');
    maximal->add_option("--lambdas", cfg.lambdas, "Good-set levels")->delimiter(',');

    auto* br = app.add_subcommand("br", "Desingularized vortex sheet evolution");
    br->add_option("--grid", grid, "Markers NxM");
    br->add_option("--gamma", cfg.gamma, "flat, perturbed or gx,gy,gz");
    br->add_option("--amplitude", cfg.amplitude, "Perturbed sheet amplitude");
    br->add_option("--delta-br", cfg.delta_br, "Desingularization (0: twice the spacing)");
    br->add_option("--dt", cfg.dt, "Time step");
    br->add_option("--steps", cfg.steps, "RK4 steps");
    br->add_option("--dump-every", cfg.dump_every, "Frame interval (0: final frame only)");

    auto* validate = app.add_subcommand("validate", "Integration-by-parts residuals for a smooth field");
    validate->add_option("--field", cfg.field, "Catalog field");
    validate->add_option("--region", cfg.region, "Region");
    validate->add_option("--order", cfg.order, "Quadrature order");

    auto* example = app.add_subcommand("example", "Worked examples: annuli, newtonian, gluing");
    example->add_option("--name", cfg.name, "Example name")->required();
    example->add_option("--t", cfg.t, "Collar parameter");
    example->add_option("--eps", cfg.eps, "eps grid (newtonian)")->delimiter(',');
    delta_opts(example);

    auto* reproduce = app.add_subcommand("reproduce", "Computed values against reference values");
    reproduce->add_option("name", cfg.name, "Target")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        if (!grid.empty()) {
            char tail = 0;
            if (std::sscanf(grid.c_str(), "%dx%d%c", &cfg.grid_n1, &cfg.grid_n2, &tail) != 2)
                throw curlflux::UsageError("br.grid", "expected NxM");
        }
        parse_tolerances(tol_items, cfg);
        if (!config_path.empty()) apply_config_json(cfg, read_file(config_path));

        const curlflux::ResultTable table = curlflux::run(cfg);
        if (cfg.output.empty()) {
            curlflux::write_table(table, cfg, std::cout);
        } else {
            std::ofstream out(cfg.output);
            if (!out) throw curlflux::UsageError("output", "cannot write '" + cfg.output + "'");
            curlflux::write_table(table, cfg, out);
        }
        if (!table.refusal.empty()) std::cerr << "refused: " << table.refusal << '\n';
        return table.ok ? 0 : 1;
    } catch (const curlflux::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const curlflux::StokesRefusal& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
