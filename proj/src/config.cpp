#include "degensim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace degensim {
namespace {

struct RawConfig {
    // section.key -> (value, line number)
    std::map<std::string, std::pair<std::string, int>> entries;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

RawConfig tokenize(const std::string& text, std::vector<std::string>& errors) {
    RawConfig raw;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) +
                                 ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) +
                             ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty() || key.empty()) {
            errors.push_back("line " + std::to_string(lineno) +
                             ": key outside a section");
            continue;
        }
        const std::string full = section + "." + key;
        if (raw.entries.count(full))
            errors.push_back("line " + std::to_string(lineno) + ": duplicate key " +
                             full);
        raw.entries[full] = {value, lineno};
    }
    return raw;
}

class Extractor {
public:
    Extractor(RawConfig raw, std::vector<std::string>& errors)
        : raw_(std::move(raw)), errors_(errors) {}

    bool has(const std::string& key) const { return raw_.entries.count(key) > 0; }

    double number(const std::string& key, double fallback) {
        used_.insert(key);
        const auto it = raw_.entries.find(key);
        if (it == raw_.entries.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second.first, &pos);
            if (pos != it->second.first.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            fail(key, "not a number: '" + it->second.first + "'");
            return fallback;
        }
    }

    int integer(const std::string& key, int fallback) {
        const double v = number(key, fallback);
        if (v != std::floor(v)) {
            fail(key, "expected an integer");
            return fallback;
        }
        return static_cast<int>(v);
    }

    std::string text(const std::string& key, const std::string& fallback) {
        used_.insert(key);
        const auto it = raw_.entries.find(key);
        return it == raw_.entries.end() ? fallback : it->second.first;
    }

    /// Comma-separated pair "a,b"; a single value is broadcast.
    std::array<double, 2> pair(const std::string& key, double fallback) {
        used_.insert(key);
        const auto it = raw_.entries.find(key);
        if (it == raw_.entries.end()) return {fallback, fallback};
        const std::string& v = it->second.first;
        const auto comma = v.find(',');
        try {
            if (comma == std::string::npos) {
                const double a = std::stod(v);
                return {a, a};
            }
            return {std::stod(v.substr(0, comma)), std::stod(v.substr(comma + 1))};
        } catch (...) {
            fail(key, "expected value or value,value");
            return {fallback, fallback};
        }
    }

    std::vector<Face> faces(const std::string& key, int dimension) {
        used_.insert(key);
        std::vector<Face> out;
        const auto it = raw_.entries.find(key);
        if (it == raw_.entries.end()) return out;
        std::string v = it->second.first;
        if (v == "none" || v.empty()) return out;
        std::replace(v.begin(), v.end(), ',', ' ');
        std::istringstream is(v);
        std::string tok;
        while (is >> tok) {
            if (tok == "left") out.push_back(Face::Left);
            else if (tok == "right") out.push_back(Face::Right);
            else if (tok == "bottom" && dimension == 2) out.push_back(Face::Bottom);
            else if (tok == "top" && dimension == 2) out.push_back(Face::Top);
            else fail(key, "unknown face '" + tok + "'");
        }
        return out;
    }

    void fail(const std::string& key, const std::string& why) {
        const auto it = raw_.entries.find(key);
        const std::string where =
            it != raw_.entries.end()
                ? " (line " + std::to_string(it->second.second) + ")"
                : "";
        errors_.push_back(key + where + ": " + why);
    }

    void reject_unknown() {
        for (const auto& [key, value] : raw_.entries)
            if (!used_.count(key))
                errors_.push_back(key + " (line " + std::to_string(value.second) +
                                  "): unknown key");
    }

private:
    RawConfig raw_;
    std::vector<std::string>& errors_;
    std::set<std::string> used_;
};

RunConfig extract(RawConfig raw, std::vector<std::string>& errors) {
    Extractor ex(std::move(raw), errors);
    RunConfig cfg;

    cfg.dimension = ex.integer("domain.dimension", 1);
    if (cfg.dimension != 1 && cfg.dimension != 2) {
        ex.fail("domain.dimension", "must be 1 or 2");
        cfg.dimension = 1;  // keep scanning the rest of the file
    }
    const auto len = ex.pair("domain.length", 1.0);
    cfg.length = len;
    const auto cells = ex.pair("domain.cells", 64.0);
    cfg.cells = {static_cast<int>(cells[0]), static_cast<int>(cells[1])};
    for (int d = 0; d < cfg.dimension; ++d) {
        if (!(cfg.length[d] > 0.0)) ex.fail("domain.length", "must be positive");
        if (cfg.cells[d] < 2) ex.fail("domain.cells", "needs at least 2 cells");
        if (cells[d] != std::floor(cells[d]))
            ex.fail("domain.cells", "expected an integer");
    }

    const std::string phi_kind = ex.text("phi.kind", "linear");
    const double a = ex.number("phi.a", 1.0);
    const double b = ex.number("phi.b", 1.0);
    const double m = ex.number("phi.m", 2.0);
    const double slope = ex.number("phi.slope", 1.0);
    try {
        if (phi_kind == "linear") cfg.phi = PhiSpec::linear(slope);
        else if (phi_kind == "porous_medium") cfg.phi = PhiSpec::porous_medium(m);
        else if (phi_kind == "singular_power") cfg.phi = PhiSpec::singular_power(a, b);
        else ex.fail("phi.kind", "unknown kind '" + phi_kind + "'");
    } catch (const DomainError& e) {
        ex.fail("phi.kind", e.what());
    }

    cfg.reaction_kind = ex.text("reaction.kind", "none");
    if (cfg.reaction_kind != "none" && cfg.reaction_kind != "porous_fischer" &&
        cfg.reaction_kind != "biofilm" && cfg.reaction_kind != "biofilm_scalar")
        ex.fail("reaction.kind", "unknown kind '" + cfg.reaction_kind + "'");
    cfg.K1 = ex.number("reaction.K1", 1.0);
    cfg.K2 = ex.number("reaction.K2", 1.0);
    cfg.K3 = ex.number("reaction.K3", 1.0);
    cfg.K4 = ex.number("reaction.K4", 1.0);
    cfg.d1 = ex.number("reaction.d1", 1.0);
    cfg.d2 = ex.number("reaction.d2", 1.0);
    cfg.L_override = ex.number("reaction.L_override", -1.0);
    if (cfg.reaction_kind == "biofilm" || cfg.reaction_kind == "biofilm_scalar") {
        if (!(cfg.K4 > 0.0)) ex.fail("reaction.K4", "must be positive");
        if (cfg.K1 < 0 || cfg.K2 < 0 || cfg.K3 < 0)
            ex.fail("reaction.K1", "K1..K3 must be nonnegative");
    }
    if (!(cfg.d1 > 0.0)) ex.fail("reaction.d1", "must be positive");
    if (!(cfg.d2 > 0.0)) ex.fail("reaction.d2", "must be positive");

    cfg.dirichlet_u = ex.faces("bc.dirichlet_u", cfg.dimension);
    cfg.dirichlet_v = ex.faces("bc.dirichlet_v", cfg.dimension);
    cfg.u_D = ex.number("bc.u_D", 0.0);
    cfg.v_D = ex.number("bc.v_D", 1.0);

    cfg.ic_preset = ex.text("ic.preset", "constant");
    if (cfg.ic_preset != "constant" && cfg.ic_preset != "bumps" &&
        cfg.ic_preset != "file" && cfg.ic_preset != "barenblatt")
        ex.fail("ic.preset", "unknown preset '" + cfg.ic_preset + "'");
    cfg.ic_value = ex.number("ic.value", 0.0);
    cfg.ic_count = ex.integer("ic.count", 3);
    cfg.ic_radius = ex.number("ic.radius", 0.1);
    cfg.ic_height = ex.number("ic.height", 0.5);
    cfg.ic_file = ex.text("ic.file", "");
    cfg.ic_t0 = ex.number("ic.t0", 0.1);
    cfg.ic_C = ex.number("ic.C", 0.1);
    cfg.v0_value = ex.number("ic.v0_value", 1.0);
    if (cfg.ic_preset == "bumps") {
        if (cfg.ic_count < 1) ex.fail("ic.count", "needs at least one bump");
        if (!(cfg.ic_radius > 0.0)) ex.fail("ic.radius", "must be positive");
    }
    if (cfg.ic_preset == "file" && cfg.ic_file.empty())
        ex.fail("ic.file", "required for the file preset");
    if (cfg.ic_preset == "barenblatt" && !(cfg.ic_t0 > 0.0))
        ex.fail("ic.t0", "must be positive");

    cfg.T = ex.number("time.T", 1.0);
    cfg.tau = ex.number("time.tau", 1e-2);
    cfg.snapshot_every = ex.integer("time.snapshot_every", 0);
    if (!(cfg.T > 0.0)) ex.fail("time.T", "must be positive");
    if (!(cfg.tau > 0.0)) ex.fail("time.tau", "must be positive");
    if (cfg.T > 0.0 && cfg.tau > 0.0) {
        const double ratio = cfg.T / cfg.tau;
        if (std::abs(ratio - std::round(ratio)) > 1e-8 * std::max(1.0, ratio))
            ex.fail("time.T", "must be an integer multiple of time.tau");
    }
    if (cfg.snapshot_every < 0) ex.fail("time.snapshot_every", "must be >= 0");

    cfg.output_directory = ex.text("output.directory", "out");

    // Cross-section checks.
    if (cfg.coupled() && cfg.dirichlet_v.empty())
        ex.fail("bc.dirichlet_v", "coupled runs need a Dirichlet part for v");
    if (cfg.reaction_kind == "biofilm" || cfg.reaction_kind == "biofilm_scalar") {
        if (cfg.phi.kind != PhiSpec::Kind::SingularPower)
            ex.fail("phi.kind", "biofilm reactions expect singular_power phi");
        if (!(cfg.u_D >= 0.0) || cfg.u_D >= 1.0)
            ex.fail("bc.u_D", "must lie in [0,1)");
    }

    ex.reject_unknown();
    return cfg;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    std::vector<std::string> errors;
    RawConfig raw = tokenize(text, errors);
    RunConfig cfg = extract(std::move(raw), errors);
    if (!errors.empty()) {
        std::string all = "configuration errors:";
        for (const std::string& e : errors) all += "\n  " + e;
        throw ConfigError(all);
    }
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

Field RunConfig::make_initial_u(const std::shared_ptr<const Grid>& grid) const {
    const Grid& g = *grid;
    Field u0(grid, 0.0, FieldRole::U);
    if (ic_preset == "constant") {
        for (double& v : u0.values) v = ic_value;
    } else if (ic_preset == "bumps") {
        // Deterministic pockets: evenly spaced along x, seated on the
        // substratum (y = 0) in 2D.
        for (int k = 0; k < ic_count; ++k) {
            const double cx = (k + 0.5) * g.length[0] / ic_count;
            for (std::size_t i = 0; i < u0.size(); ++i) {
                const double dx = g.x_of(i) - cx;
                const double dy = g.dimension == 2 ? g.y_of(i) : 0.0;
                const double q = 1.0 - (dx * dx + dy * dy) / (ic_radius * ic_radius);
                if (q > 0.0) u0[i] += ic_height * q * q;
            }
        }
        for (double& v : u0.values) v = std::min(v, ic_height);
    } else if (ic_preset == "barenblatt") {
        const double xc = 0.5 * g.length[0];
        for (std::size_t i = 0; i < u0.size(); ++i) {
            const double dx = g.x_of(i) - xc;
            const double val =
                ic_C - dx * dx / (12.0 * std::pow(ic_t0, 2.0 / 3.0));
            u0[i] = val > 0.0 ? std::pow(ic_t0, -1.0 / 3.0) * val : 0.0;
        }
    } else if (ic_preset == "file") {
        std::ifstream is(ic_file);
        if (!is) throw ConfigError("cannot open ic.file: " + ic_file);
        std::string line;
        std::getline(is, line);  // header
        std::size_t i = 0;
        while (std::getline(is, line)) {
            if (trim(line).empty()) continue;
            if (i >= u0.size())
                throw ConfigError("ic.file has more rows than grid nodes");
            const auto comma = line.find_last_of(',');
            u0[i++] = std::stod(line.substr(comma + 1));
        }
        if (i != u0.size())
            throw ConfigError("ic.file row count does not match the grid");
    }
    return u0;
}

ScalarProblem RunConfig::make_scalar_problem() const {
    ScalarProblem p;
    std::vector<Extent> ext;
    for (int d = 0; d < dimension; ++d) ext.push_back({length[d], cells[d]});
    p.grid = std::make_shared<const Grid>(build_grid(dimension, ext));
    p.bc = tag_boundary(*p.grid, dirichlet_u);
    p.bc.verification_only = p.bc.pure_neumann();
    p.phi = std::make_shared<const PhiEvaluator>(phi);

    if (reaction_kind == "none") p.reaction = ReactionSpec::none();
    else if (reaction_kind == "porous_fischer")
        p.reaction = ReactionSpec::porous_fischer();
    else if (reaction_kind == "biofilm_scalar")
        p.reaction = ReactionSpec::biofilm_scalar(K1, K2, K3, K4);
    else
        throw ConfigError("reaction kind '" + reaction_kind +
                          "' is not a scalar preset");
    p.reaction.L_override = L_override;

    p.dirichlet_w = Field(p.grid, p.phi->phi(u_D), FieldRole::W);
    p.initial_u = make_initial_u(p.grid);
    p.horizon = T;
    p.step = tau;
    p.diffusion = d2;
    return p;
}

std::vector<ConvergenceRow> run_convergence_study(const RunConfig& cfg,
                                                  int levels) {
    if (cfg.coupled())
        throw ConfigError("convergence studies use the scalar solver");
    if (levels < 1) throw ConfigError("levels must be positive");
    std::vector<ConvergenceRow> rows;

    const bool barenblatt = cfg.ic_preset == "barenblatt" && cfg.dimension == 1 &&
                            cfg.phi.kind == PhiSpec::Kind::PorousMedium &&
                            cfg.phi.m == 2.0 && cfg.reaction_kind == "none";
    if (barenblatt) {
        auto exact = [&](double x, double t) {
            const double tt = t + cfg.ic_t0;
            const double xc = 0.5 * cfg.length[0];
            const double val =
                cfg.ic_C - (x - xc) * (x - xc) / (12.0 * std::pow(tt, 2.0 / 3.0));
            return val > 0.0 ? std::pow(tt, -1.0 / 3.0) * val : 0.0;
        };
        for (int lvl = 0; lvl < levels; ++lvl) {
            RunConfig c = cfg;
            c.cells[0] = cfg.cells[0] << lvl;
            ScalarProblem p = c.make_scalar_problem();
            const SolutionTrace tr = solve_scalar(p, 0);
            const Field& uT = tr.u.back();
            double err = 0.0;
            for (std::size_t i = 0; i < uT.size(); ++i)
                err += std::abs(uT[i] - exact(p.grid->x_of(i), cfg.T));
            rows.push_back({p.grid->h[0], c.tau, err * p.grid->cell_volume()});
        }
        return rows;
    }

    // Self-reference by consecutive differences: ||u_tau - u_{tau/2}|| is an
    // unbiased first-order error surrogate, unlike distances to one fixed
    // fine run which skew the last level's observed order.
    std::vector<Field> finals;
    std::vector<double> taus;
    for (int lvl = 0; lvl <= levels; ++lvl) {
        RunConfig c = cfg;
        c.tau = cfg.tau / (1 << lvl);
        ScalarProblem p = c.make_scalar_problem();
        finals.push_back(solve_scalar(p, 0).u.back());
        taus.push_back(c.tau);
    }
    for (int lvl = 0; lvl < levels; ++lvl) {
        double err = 0.0;
        for (std::size_t i = 0; i < finals[lvl].size(); ++i)
            err += std::abs(finals[lvl][i] - finals[lvl + 1][i]);
        rows.push_back({finals[lvl].grid->h[0], taus[lvl],
                        err * finals[lvl].grid->cell_volume()});
    }
    return rows;
}

CoupledProblem RunConfig::make_coupled_problem() const {
    if (!coupled()) throw ConfigError("config does not describe a coupled run");
    CoupledProblem p;
    std::vector<Extent> ext;
    for (int d = 0; d < dimension; ++d) ext.push_back({length[d], cells[d]});
    p.grid = std::make_shared<const Grid>(build_grid(dimension, ext));
    p.bc_u = tag_boundary(*p.grid, dirichlet_u);
    p.bc_v = tag_boundary(*p.grid, dirichlet_v);
    p.phi = std::make_shared<const PhiEvaluator>(phi);
    p.reaction = ReactionSpec::biofilm(K1, K2, K3, K4);
    p.reaction.L_override = L_override;
    p.dirichlet_w = Field(p.grid, p.phi->phi(u_D), FieldRole::W);
    p.dirichlet_v = Field(p.grid, v_D, FieldRole::V);
    p.initial_u = make_initial_u(p.grid);
    p.initial_v = Field(p.grid, v0_value, FieldRole::V);
    p.horizon = T;
    p.step = tau;
    p.diffusion_u = d2;
    p.diffusion_v = d1;
    return p;
}

} // namespace degensim
