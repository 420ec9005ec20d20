#include "thinframe/commands.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace thinframe {

namespace {

// Extra micro modes computed past N so a degenerate cluster at the cut is seen.
constexpr int kLookahead = 4;

Json vec2(const Vec2& v) { return Json::array({v.x(), v.y()}); }

std::string csv_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

}  // namespace

Field default_source() {
    return [](const Vec2& x) { return Vec2(std::sin(M_PI * x.x()) * std::sin(M_PI * x.y()), 0.0); };
}

Session::Session(RunConfig cfg) : cfg_(std::move(cfg)), graph_((validate(cfg_), resolve_framework(cfg_.framework))) {}

const MacroTensor& Session::ahom() {
    if (!ahom_) ahom_ = compute_ahom(graph_, cfg_.a1());
    return *ahom_;
}

const MicroSystem& Session::micro_system() {
    if (!micro_) {
        const MicroParameters mp{cfg_.a0(), cfg_.a1(), cfg_.theta};
        micro_ = std::make_unique<MicroSystem>(build_cell_mesh(graph_, cfg_.n), graph_, mp);
    }
    return *micro_;
}

const MicroSpectrum& Session::micro_spectrum() {
    if (!spectrum_) {
        if (cfg_.modes == 0) {
            spectrum_ = MicroSpectrum{};
        } else {
            const MicroSystem& sys = micro_system();
            const auto avail = static_cast<int>(sys.reduced_dofs()) - 1;
            if (cfg_.modes > avail) throw ConfigError("modes: exceeds the cell mesh size");
            spectrum_ = solve_micro(sys, std::min(cfg_.modes + kLookahead, avail));
        }
    }
    return *spectrum_;
}

const MacroSpace& Session::macro_space() {
    if (!macro_) macro_ = std::make_unique<MacroSpace>(cfg_.macro_n);
    return *macro_;
}

const std::vector<double>& Session::macro_lambda() {
    if (!lambda_) {
        if (!cfg_.macro_spectrum.empty()) {
            lambda_ = load_spectrum_file(cfg_.macro_spectrum);
        } else {
            if (!ahom().elliptic) throw ConfigError("A^hom not elliptic; supply --macro-spectrum or use grid-diag");
            const Eigen::VectorXd v = macro_spectrum(ahom(), macro_space(), cfg_.macro_k);
            lambda_ = std::vector<double>(v.data(), v.data() + v.size());
        }
    }
    return *lambda_;
}

const BetaFunction& Session::beta() {
    if (!beta_) beta_ = std::make_unique<BetaFunction>(micro_spectrum(), cfg_.modes, graph_.symmetric());
    return *beta_;
}

const BandStructure& Session::bands() {
    if (!bands_) {
        const std::vector<double>& lambda = macro_lambda();
        bands_ = assemble_bands(beta(), find_gammas(beta()), lambda);
    }
    return *bands_;
}

const HomogenisedSolution& Session::homogenised() {
    if (!hom_) {
        const MacroTensor& a = ahom();
        if (!a.elliptic) throw ConfigError("A^hom not elliptic; the source problem needs an elliptic framework such as grid-diag");
        const MicroSystem* sys = cfg_.modes > 0 ? &micro_system() : nullptr;
        const MicroSpectrum* sp = cfg_.modes > 0 ? &micro_spectrum() : nullptr;
        hom_ = solve_homogenised(macro_space(), a, default_source(), sys, sp, cfg_.modes);
    }
    return *hom_;
}

EpsParameters Session::eps_parameters(int cells) const {
    EpsParameters p;
    p.cells = cells;
    p.theta = cfg_.theta;
    p.n_fine = cfg_.n_fine;
    p.mode = cfg_.boundary;
    p.a0 = cfg_.a0();
    p.a1 = cfg_.a1();
    return p;
}

const std::vector<ConvergenceRow>& Session::convergence() {
    if (!rows_) {
        const HomogenisedSolution& hom = homogenised();
        const std::vector<double> skeleton = bands().skeleton();
        const MicroSystem* sys = cfg_.modes > 0 ? &micro_system() : nullptr;
        const MicroSpectrum* sp = cfg_.modes > 0 ? &micro_spectrum() : nullptr;
        std::vector<ConvergenceRow> rows;
        for (int cells : cfg_.ladder) {
            const EpsProblem p(graph_, eps_parameters(cells));
            const DirectSolution sol = solve_source(p, default_source());
            const DirectSpectrum ds = solve_spectrum(p, cfg_.direct_modes);
            ConvergenceRow r;
            r.cells = cells;
            r.n_fine = p.n_fine();
            r.distance = two_scale_distance(p, sol.u, macro_space(), hom, sys, sp);
            r.energy_eps = sol.energy;
            r.energy_hom = hom.energy;
            r.energy_gap = std::abs(sol.energy - hom.energy);
            r.omegas.assign(ds.omega.data(), ds.omega.data() + ds.omega.size());
            const HausdorffResidual h = hausdorff_residual(r.omegas, skeleton);
            r.r_fwd = h.forward;
            r.r_bwd = h.backward;
            rows.push_back(std::move(r));
        }
        rows_ = std::move(rows);
    }
    return *rows_;
}

Json Session::ahom_json() {
    const MacroTensor& a = ahom();
    return Json{{"framework", cfg_.framework},
                {"k1", k1_isotropic(cfg_.a1())},
                {"voigt", to_json(Eigen::MatrixXd(a.voigt.m))},
                {"ellipticity", a.ellipticity},
                {"elliptic", a.elliptic}};
}

Json Session::micro_json() {
    const MicroSpectrum& sp = micro_spectrum();
    Json out = Json::array();
    for (int i = 0; i < cfg_.modes; ++i)
        out.push_back(Json{{"omega", sp.omega[i]},
                           {"avg", vec2(sp.averages[i])},
                           {"zero_average", static_cast<bool>(sp.zero_average[i])},
                           {"residual", sp.residuals[i]}});
    return out;
}

Json Session::bands_json() {
    const BandStructure& bs = bands();
    Json bands = Json::array();
    for (const Band& b : bs.bands)
        bands.push_back(Json{{"branch", b.branch}, {"lo", b.lo}, {"hi", b.hi}, {"points", b.points}});
    Json gaps = Json::array();
    for (const auto& [lo, hi] : bs.gaps) gaps.push_back(Json::array({lo, hi}));
    Json tail = Json::array();
    for (double g : bs.gamma) tail.push_back(beta().tail_bound(g));
    return Json{{"gamma", bs.gamma},   {"delta", bs.delta},         {"alpha", bs.alpha},
                {"bands", bands},      {"gaps", gaps},              {"Lambda", bs.lambda},
                {"modes_used", beta().modes_used()}, {"tail_bound_at_gamma", tail}};
}

Json Session::solve_json() {
    const HomogenisedSolution& h = homogenised();
    const MacroSpace& space = macro_space();
    const Eigen::VectorXd free = space.restrict(h.u0);
    return Json{{"modes", h.modes},
                {"energy", h.energy},
                {"residual", h.residual},
                {"S", to_json(Eigen::MatrixXd(h.s))},
                {"u0_l2", std::sqrt(space.mass().quad(free))},
                {"macro_n", cfg_.macro_n}};
}

Json Session::direct_json() {
    const EpsProblem p(graph_, eps_parameters(cfg_.eps));
    const DirectSpectrum ds = solve_spectrum(p, cfg_.direct_modes);
    return Json{{"eps", inverse_string(cfg_.eps)},
                {"theta", cfg_.theta},
                {"n_fine", p.n_fine()},
                {"boundary", to_string(cfg_.boundary)},
                {"total_measure", p.total_measure()},
                {"omegas", to_json(ds.omega)},
                {"residuals", to_json(ds.residuals)}};
}

std::string Session::converge_csv() {
    std::ostringstream o;
    o << "eps,D,energy_gap,r_fwd,r_bwd\n";
    for (const ConvergenceRow& r : convergence()) {
        for (double v : {r.distance, r.energy_gap, r.r_fwd, r.r_bwd})
            if (!std::isfinite(v)) throw NumericalError("converge: non-finite value at eps = " + inverse_string(r.cells));
        o << inverse_string(r.cells) << ',' << csv_number(r.distance) << ',' << csv_number(r.energy_gap) << ','
          << csv_number(r.r_fwd) << ',' << csv_number(r.r_bwd) << '\n';
    }
    return o.str();
}

Json Session::report_json() {
    Json rows = Json::array();
    for (const ConvergenceRow& r : convergence())
        rows.push_back(Json{{"eps", inverse_string(r.cells)},
                            {"n_fine", r.n_fine},
                            {"D", r.distance},
                            {"E_eps", r.energy_eps},
                            {"E_hom", r.energy_hom},
                            {"energy_gap", r.energy_gap},
                            {"r_fwd", r.r_fwd},
                            {"r_bwd", r.r_bwd},
                            {"omegas", r.omegas}});
    const std::string eigen = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION);
    return Json{{"versions", {{"thinframe", kVersion}, {"eigen", eigen}}},
                {"config", echo(cfg_)},
                {"ahom", ahom_json()},
                {"micro", micro_json()},
                {"bands", bands_json()},
                {"homogenised", solve_json()},
                {"convergence", rows}};
}

std::vector<std::string> run_command(const std::string& command, Session& s, std::ostream& log) {
    const std::filesystem::path out(s.config().out);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& text) {
        write_file(out / name, text);
        written.push_back((out / name).string());
        log << "wrote " << (out / name).string() << '\n';
    };
    if (command == "ahom") {
        emit("ahom.json", dump_checked(s.ahom_json(), "ahom"));
    } else if (command == "micro") {
        emit("micro.json", dump_checked(s.micro_json(), "micro"));
    } else if (command == "bands") {
        const Json j = s.bands_json();
        emit("bands.json", dump_checked(j, "bands"));
        emit("bands.svg", band_svg(s.bands()));
    } else if (command == "solve") {
        emit("solve.json", dump_checked(s.solve_json(), "solve"));
    } else if (command == "direct") {
        emit("direct.json", dump_checked(s.direct_json(), "direct"));
    } else if (command == "converge") {
        emit("converge.csv", s.converge_csv());
    } else if (command == "report") {
        emit("report.json", dump_checked(s.report_json(), "report"));
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }
    return written;
}

}  // namespace thinframe
