#include "ergeig/config.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace ergeig {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': not a number: " + v);
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': not an integer: " + v);
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    return out;
}

std::string format_list(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << v[i];
    }
    return os.str();
}

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "cost.family") c.cost_family = value;
    else if (key == "cost.params") c.cost_params = parse_list(key, value);
    else if (key == "cost.dim") c.dim = parse_int(key, value);
    else if (key == "cost.offset") c.cost_offset = parse_real(key, value);
    else if (key == "grid.half_width") c.grid_half_width = parse_real(key, value);
    else if (key == "grid.nodes") c.grid_nodes = parse_int(key, value);
    else if (key == "backend") c.backend = value;
    else if (key == "tol.newton_tol") c.tol.newton_tol = parse_real(key, value);
    else if (key == "tol.max_iters") c.tol.max_iters = parse_int(key, value);
    else if (key == "tol.gradient_slack") c.tol.gradient_slack = parse_real(key, value);
    else if (key == "tol.convexity_slack") c.tol.convexity_slack = parse_real(key, value);
    else if (key == "loop.max_levels") c.loop.max_levels = parse_int(key, value);
    else if (key == "loop.lambda_tol") c.loop.lambda_tol = parse_real(key, value);
    else if (key == "loop.edge_slack") c.loop.edge_slack = parse_real(key, value);
    else if (key == "penalty.damping") c.penalty_damping = parse_real(key, value);
    else if (key == "penalty.epsilon_schedule") c.epsilon_schedule = parse_list(key, value);
    else if (key == "bounds.mollify_radius") c.mollify_radius = parse_real(key, value);
    else if (key == "sim.radius") c.sim.radius = parse_real(key, value);
    else if (key == "sim.dt") c.sim.dt = parse_real(key, value);
    else if (key == "sim.horizon") c.sim.horizon = parse_real(key, value);
    else if (key == "sim.paths") c.sim.paths = parse_int(key, value);
    else if (key == "sim.seed") c.sim.seed = std::uint64_t(std::stoull(value));
    else if (key == "sim.burn_in") c.sim.burn_in = parse_real(key, value);
    else if (key == "sweep.radii") c.sweep_radii = parse_list(key, value);
    else if (key == "out.dir") c.out_dir = value;
    else throw ValidationError("unknown config key: " + key);
}

}  // namespace

CostFunction RunConfig::cost() const {
    CostFamily fam;
    if (cost_family == "quadratic") fam = CostFamily::Quadratic;
    else if (cost_family == "power") fam = CostFamily::Power;
    else if (cost_family == "anisotropic") fam = CostFamily::Anisotropic;
    else if (cost_family == "radial_table") fam = CostFamily::RadialTable;
    else throw ValidationError("unknown cost.family: " + cost_family);
    return make_cost(fam, cost_params, dim, cost_offset);
}

Grid RunConfig::grid() const { return Grid::make(dim, grid_half_width, grid_nodes); }

PenaltyConfig RunConfig::penalty_config() const {
    PenaltyConfig pc = PenaltyConfig::defaults();
    if (!epsilon_schedule.empty()) pc.epsilon_schedule = epsilon_schedule;
    pc.damping = penalty_damping;
    pc.tolerances = tol;
    pc.validate();
    return pc;
}

void RunConfig::validate() const {
    cost();
    grid();
    tol.validate();
    loop.validate();
    penalty_config();
    if (backend != "direct" && backend != "penalty" && backend != "both")
        throw ValidationError("backend must be direct, penalty, or both");
    SimConfig s = sim;
    s.dim = dim;
    s.validate();
    for (double r : sweep_radii)
        if (r <= 0) throw ValidationError("sweep.radii must be positive");
    if (mollify_radius < 0) throw ValidationError("bounds.mollify_radius must be >= 0");
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
        set_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
}

void apply_override(RunConfig& config, const std::string& assignment) {
    std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ValidationError("override must be key=value: " + assignment);
    set_key(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::string echo_config(const RunConfig& c) {
    std::ostringstream os;
    os.precision(17);
    os << "cost.family = " << c.cost_family << "\n";
    os << "cost.params = " << format_list(c.cost_params) << "\n";
    os << "cost.dim = " << c.dim << "\n";
    os << "cost.offset = " << c.cost_offset << "\n";
    os << "grid.half_width = " << c.grid_half_width << "\n";
    os << "grid.nodes = " << c.grid_nodes << "\n";
    os << "backend = " << c.backend << "\n";
    os << "tol.newton_tol = " << c.tol.newton_tol << "\n";
    os << "tol.max_iters = " << c.tol.max_iters << "\n";
    os << "tol.gradient_slack = " << c.tol.gradient_slack << "\n";
    os << "tol.convexity_slack = " << c.tol.convexity_slack << "\n";
    os << "loop.max_levels = " << c.loop.max_levels << "\n";
    os << "loop.lambda_tol = " << c.loop.lambda_tol << "\n";
    os << "loop.edge_slack = " << c.loop.edge_slack << "\n";
    os << "penalty.damping = " << c.penalty_damping << "\n";
    os << "penalty.epsilon_schedule = " << format_list(c.epsilon_schedule) << "\n";
    os << "bounds.mollify_radius = " << c.mollify_radius << "\n";
    os << "sim.radius = " << c.sim.radius << "\n";
    os << "sim.dt = " << c.sim.dt << "\n";
    os << "sim.horizon = " << c.sim.horizon << "\n";
    os << "sim.paths = " << c.sim.paths << "\n";
    os << "sim.seed = " << c.sim.seed << "\n";
    os << "sim.burn_in = " << c.sim.burn_in << "\n";
    os << "sweep.radii = " << format_list(c.sweep_radii) << "\n";
    os << "out.dir = " << c.out_dir << "\n";
    return os.str();
}

}  // namespace ergeig
