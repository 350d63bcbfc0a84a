#pragma once

#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace curlflux {

/// Invalid configuration. `path` names the offending field, e.g. "br.grid".
struct UsageError : std::runtime_error {
    std::string path;
    UsageError(std::string field_path, const std::string& msg)
        : std::runtime_error(field_path + ": " + msg), path(std::move(field_path)) {}
};

/// Parsed "kind:key=value,key=value" shape description.
struct ShapeSpec {
    std::string kind;
    std::map<std::string, double> params;

    double get(const std::string& key, double fallback) const;
};

ShapeSpec parse_shape(const std::string& text, const std::string& path);

struct RunConfig {
    std::string command;  ///< trace, stokes, maximal, br, validate, example, reproduce
    std::string field = "line_vortex";
    std::string surface = "disk:r=0.5,z=0.5";
    std::string region;  ///< empty selects a default per command
    std::string route = "tangential";  ///< tangential, transversal, mass, all
    std::string name;                  ///< example or reproduce target
    std::string side = "interior";     ///< interior or exterior trace
    double t = 0.0;
    int delta_max_j = 12;          ///< delta sequence 2^-j, j = 2..delta_max_j
    std::vector<double> deltas;    ///< explicit sequence, overrides delta_max_j
    std::vector<double> t_grid;    ///< maximal scans and trace layers
    std::vector<double> lambdas;   ///< good-set levels
    std::vector<double> eps;       ///< trace diagnostics
    int order = 24;

    // Vortex sheet evolution.
    int grid_n1 = 32, grid_n2 = 32;
    std::string gamma = "flat";  ///< flat, perturbed, or "gx,gy,gz"
    double amplitude = 0.05;
    double delta_br = 0.0;       ///< 0 selects twice the marker spacing
    double dt = 0.01;
    int steps = 10;
    int dump_every = 0;          ///< 0 dumps only the final frame

    std::map<std::string, double> tolerances;  ///< overrides of acceptance tolerances
    std::string output;                        ///< empty writes to stdout
    std::string format = "csv";                ///< csv or json

    double tol(const std::string& key, double fallback) const;
};

/// Applies a JSON object on top of `cfg`. Keys mirror the CLI flags.
void apply_config_json(RunConfig& cfg, const std::string& json_text);

/// Checks names and ranges before dispatch.
void validate_config(const RunConfig& cfg);

using Cell = std::variant<double, long long, std::string, bool>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, std::string>> metadata;
    bool ok = true;        ///< false turns into a nonzero exit status
    std::string refusal;   ///< set when a module refused the request

    void add_row(std::vector<Cell> row);
    void meta(const std::string& key, const std::string& value);
    std::string to_csv() const;
    std::string to_json() const;
};

/// Dispatches to the module operations.
ResultTable run(const RunConfig& cfg);

/// Names accepted by reproduce.
const std::vector<std::string>& reproduce_names();

/// Side-by-side table of computed and reference values with a pass flag per row.
ResultTable reproduce(const std::string& name, const RunConfig& cfg = {});

void write_table(const ResultTable& table, const RunConfig& cfg, std::ostream& os);

std::string tool_version();

}  // namespace curlflux
