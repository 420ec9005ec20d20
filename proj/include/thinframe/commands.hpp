#pragma once

#include "thinframe/cell_homog.hpp"
#include "thinframe/config.hpp"
#include "thinframe/direct_solver.hpp"
#include "thinframe/limit_spectrum.hpp"
#include "thinframe/macro_fem.hpp"
#include "thinframe/micro_spectral.hpp"
#include "thinframe/report.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace thinframe {

/// f(x) = (sin pi x1 sin pi x2, 0).
Field default_source();

struct ConvergenceRow {
    int cells = 0;
    int n_fine = 0;
    double distance = 0.0;
    double energy_eps = 0.0;
    double energy_hom = 0.0;
    double energy_gap = 0.0;
    double r_fwd = 0.0;
    double r_bwd = 0.0;
    std::vector<double> omegas;
};

/// Lazily computed quantities shared by the commands of one run.
class Session {
public:
    explicit Session(RunConfig cfg);

    const RunConfig& config() const { return cfg_; }
    const FrameworkGraph& graph() const { return graph_; }
    const MacroTensor& ahom();
    const MicroSystem& micro_system();
    /// N modes plus a few extra so the last cluster is not cut.
    const MicroSpectrum& micro_spectrum();
    const MacroSpace& macro_space();
    const std::vector<double>& macro_lambda();
    const BetaFunction& beta();
    const BandStructure& bands();
    const HomogenisedSolution& homogenised();
    EpsParameters eps_parameters(int cells) const;
    const std::vector<ConvergenceRow>& convergence();

    Json ahom_json();
    Json micro_json();
    Json bands_json();
    Json solve_json();
    Json direct_json();
    std::string converge_csv();
    Json report_json();

private:
    RunConfig cfg_;
    FrameworkGraph graph_;
    std::optional<MacroTensor> ahom_;
    std::unique_ptr<MicroSystem> micro_;
    std::optional<MicroSpectrum> spectrum_;
    std::unique_ptr<MacroSpace> macro_;
    std::optional<std::vector<double>> lambda_;
    std::unique_ptr<BetaFunction> beta_;
    std::optional<BandStructure> bands_;
    std::optional<HomogenisedSolution> hom_;
    std::optional<std::vector<ConvergenceRow>> rows_;
};

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"ahom", "micro", "bands", "solve", "direct", "converge", "report"};
    return names;
}

/// Runs one command and writes its artifacts into cfg.out. Returns the written paths.
std::vector<std::string> run_command(const std::string& command, Session& session, std::ostream& log);

}  // namespace thinframe
