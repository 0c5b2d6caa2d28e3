#ifndef BOOJUM_CONFIG_HPP
#define BOOJUM_CONFIG_HPP

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "boojum/anchoring.hpp"
#include "boojum/energy.hpp"
#include "boojum/grid.hpp"
#include "boojum/minimize.hpp"

// Flat key=value run configuration with dotted section prefixes.  Lines are
// `section.key = value`; `#` starts a comment; unknown or duplicate keys and
// malformed values are reported with file:line and the offending field.

namespace boojum {

struct AnalysisFlags {
    bool defects = true;
    bool densities = false;
    bool tangent_ode = false;
    bool far_field = true;
};

struct RunConfig {
    GridConfig grid;
    ModelParams model;
    AnchoringParams anchoring;
    std::string anchoring_profile;  // CSV path; empty selects the default family
    SolveConfig solver;
    InitMode init = InitMode::meridian_rotation;
    std::string init_checkpoint;  // required when init = from_checkpoint
    std::string outputs = "out";
    int threads = 0;  // 0 = hardware concurrency
    AnalysisFlags analyses;

    void validate() const {
        grid.validate();
        model.validate();
        if (anchoring_profile.empty()) anchoring.validate();
        solver.validate();
        if (init == InitMode::from_checkpoint && init_checkpoint.empty())
            throw std::invalid_argument(
                "solver.init_checkpoint: required when solver.init = from_checkpoint");
        if (outputs.empty())
            throw std::invalid_argument("outputs.dir: must not be empty");
        if (threads < 0) throw std::invalid_argument("threads: must be >= 0");
    }
};

namespace detail {

struct ConfigCursor {
    const std::string& name;
    int line;

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw std::invalid_argument(name + ":" + std::to_string(line) + ": " +
                                    (key.empty() ? msg : key + ": " + msg));
    }

    double num(const std::string& key, const std::string& v) const {
        double x = 0;
        std::size_t used = 0;
        try {
            x = std::stod(v, &used);
        } catch (const std::invalid_argument&) {
            fail(key, "expected a number, got '" + v + "'");
        } catch (const std::out_of_range&) {
            fail(key, "number out of range '" + v + "'");
        }
        if (used != v.size()) fail(key, "trailing characters in number '" + v + "'");
        return x;
    }

    int integer(const std::string& key, const std::string& v) const {
        const double x = num(key, v);
        const int n = static_cast<int>(x);
        if (x != n) fail(key, "expected an integer, got '" + v + "'");
        return n;
    }

    bool boolean(const std::string& key, const std::string& v) const {
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        fail(key, "expected true/false, got '" + v + "'");
    }
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// parses the key=value stream; type errors carry name:line diagnostics.
/// Range validation is the caller's RunConfig::validate() step.
inline RunConfig parse_run_config(std::istream& is, const std::string& name = "config") {
    RunConfig rc;
    std::string line;
    std::vector<std::string> seen;
    detail::ConfigCursor cur{name, 0};
    while (std::getline(is, line)) {
        ++cur.line;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) cur.fail("", "expected key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty()) cur.fail("", "empty key");
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            cur.fail(key, "duplicate key");
        seen.push_back(key);

        if (key == "grid.n_radial")
            rc.grid.n_radial = cur.integer(key, val);
        else if (key == "grid.n_polar")
            rc.grid.n_polar = cur.integer(key, val);
        else if (key == "grid.outer_radius")
            rc.grid.outer_radius = cur.num(key, val);
        else if (key == "grid.grading")
            rc.grid.grading = cur.num(key, val);
        else if (key == "model.nu")
            rc.model.nu = cur.num(key, val);
        else if (key == "model.mu")
            rc.model.mu = cur.num(key, val);
        else if (key == "anchoring.amp_polar")
            rc.anchoring.amp_polar = cur.num(key, val);
        else if (key == "anchoring.amp_tilt")
            rc.anchoring.amp_tilt = cur.num(key, val);
        else if (key == "anchoring.profile")
            rc.anchoring_profile = val;
        else if (key == "solver.max_iters")
            rc.solver.max_iters = cur.integer(key, val);
        else if (key == "solver.grad_tol")
            rc.solver.grad_tol = cur.num(key, val);
        else if (key == "solver.step_rule") {
            if (val == "fixed")
                rc.solver.step_rule = StepRule::fixed;
            else if (val == "adaptive_secant")
                rc.solver.step_rule = StepRule::adaptive_secant;
            else
                cur.fail(key, "expected fixed or adaptive_secant, got '" + val + "'");
        } else if (key == "solver.restarts")
            rc.solver.restarts = cur.integer(key, val);
        else if (key == "solver.perturbation_scale")
            rc.solver.perturbation_scale = cur.num(key, val);
        else if (key == "solver.seed") {
            try {
                rc.solver.seed = std::stoull(val);
            } catch (const std::exception&) {
                cur.fail(key, "expected an unsigned integer, got '" + val + "'");
            }
        } else if (key == "solver.continuation_nus") {
            rc.solver.continuation_nus.clear();
            std::istringstream vs(val);
            std::string piece;
            while (std::getline(vs, piece, ','))
                rc.solver.continuation_nus.push_back(
                    cur.num(key, detail::trim(piece)));
        } else if (key == "solver.init") {
            if (val == "meridian_rotation")
                rc.init = InitMode::meridian_rotation;
            else if (val == "perturbed")
                rc.init = InitMode::perturbed;
            else if (val == "from_checkpoint")
                rc.init = InitMode::from_checkpoint;
            else
                cur.fail(key, "expected meridian_rotation, perturbed or "
                              "from_checkpoint, got '" + val + "'");
        } else if (key == "solver.init_checkpoint")
            rc.init_checkpoint = val;
        else if (key == "outputs.dir")
            rc.outputs = val;
        else if (key == "threads")
            rc.threads = cur.integer(key, val);
        else if (key == "analyses.defects")
            rc.analyses.defects = cur.boolean(key, val);
        else if (key == "analyses.densities")
            rc.analyses.densities = cur.boolean(key, val);
        else if (key == "analyses.tangent_ode")
            rc.analyses.tangent_ode = cur.boolean(key, val);
        else if (key == "analyses.far_field")
            rc.analyses.far_field = cur.boolean(key, val);
        else
            cur.fail(key, "unknown key");
    }
    return rc;
}

inline RunConfig read_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument(path + ": cannot open config");
    return parse_run_config(is, path);
}

}  // namespace boojum

#endif
