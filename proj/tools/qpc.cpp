// qpc: quasiperiodic invariant circle toolkit front end.

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "qpc/circle_io.hpp"
#include "qpc/continuation.hpp"
#include "qpc/recipe.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotQuasiperiodic = 2;
constexpr int kExitSolverFailure = 3;
constexpr int kExitIo = 4;

struct MapOpts {
    std::string map = "henon";
    double alpha = 0.0;
    double alpha_cos = 2.0;  // sentinel: > 1 means unset

    qpc::MapSpec spec() const {
        qpc::MapSpec s;
        s.family = qpc::family_from_name(map);
        s.alpha = alpha_cos <= 1.0 ? std::acos(alpha_cos) : alpha;
        return s;
    }
};

void add_map_options(CLI::App* cmd, MapOpts& opts) {
    cmd->add_option("--map", opts.map, "Map family: henon or standard")
        ->check(CLI::IsMember({"henon", "standard"}));
    cmd->add_option("--alpha", opts.alpha, "Map parameter alpha (radians)");
    cmd->add_option("--alpha-cos", opts.alpha_cos,
                    "Set alpha = acos(value) instead of --alpha");
}

std::pair<double, double> parse_pair(const std::string& s) {
    size_t comma = s.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("expected x,y pair: " + s);
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

std::string now_string() {
    char buf[64];
    std::time_t t = std::time(nullptr);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

qpc::CircleFileData to_file_data(const qpc::RecipeResult& res,
                                 const qpc::RecipeConfig& cfg) {
    qpc::CircleFileData data;
    data.spec = cfg.spec;
    data.system = res.system;
    data.unfolding = res.report.unfolding;
    data.final_defect = res.report.final_defect;
    data.seed = cfg.seed;
    data.center = res.center;
    data.phase = res.phase;
    data.m_rho = cfg.M_rho;
    data.m_coeff = cfg.M_coeff;
    data.created = now_string();
    return data;
}

int cmd_classify(const MapOpts& mopts, const std::string& seed_str, long M,
                 const std::string& center_str, const std::string& json_out) {
    qpc::MapSpec spec = mopts.spec();
    auto [sx, sy] = parse_pair(seed_str);
    qpc::Point2 center = qpc::default_center(spec);
    if (!center_str.empty()) {
        auto [cx, cy] = parse_pair(center_str);
        center = {cx, cy};
    }
    qpc::OrbitSegment orbit = qpc::iterate_orbit(spec, {sx, sy}, M, 1);
    qpc::AngleSequence angles = qpc::project_angles(orbit, center);
    std::vector<long> checkpoints = {M / 4, M / 2, 3 * M / 4, M};
    qpc::Classification cls = qpc::classify_orbit(angles, checkpoints);

    std::printf("%12s  %-20s\n", "M", "rho_M");
    for (auto& [m, rho] : cls.estimate.history)
        std::printf("%12ld  %.15f\n", m, rho);
    std::printf("spread = %.3e\n", cls.estimate.spread);
    bool quasi = cls.cls == qpc::OrbitClass::Quasiperiodic;
    std::printf("classification: %s\n", quasi ? "quasiperiodic" : "non-convergent");

    if (!json_out.empty()) {
        nlohmann::json j;
        j["classification"] = quasi ? "quasiperiodic" : "non-convergent";
        j["rho"] = cls.estimate.rho;
        j["spread"] = cls.estimate.spread;
        j["history"] = nlohmann::json::array();
        for (auto& [m, rho] : cls.estimate.history)
            j["history"].push_back({{"M", m}, {"rho", rho}});
        std::ofstream os(json_out);
        if (!os) {
            std::fprintf(stderr, "cannot write %s\n", json_out.c_str());
            return kExitIo;
        }
        os << j.dump(2) << "\n";
    }
    return quasi ? kExitOk : kExitNotQuasiperiodic;
}

int cmd_circle(const MapOpts& mopts, const std::string& seed_str, int period,
               int n_modes, const std::string& out, const std::string& plot,
               int plot_samples, bool mod_2pi) {
    qpc::RecipeConfig cfg;
    cfg.spec = mopts.spec();
    auto [sx, sy] = parse_pair(seed_str);
    cfg.seed = {sx, sy};
    cfg.period = period;
    cfg.N_override = n_modes;

    qpc::RecipeResult res;
    try {
        res = qpc::run_recipe(cfg);
    } catch (const qpc::recipe_error& e) {
        std::fprintf(stderr, "recipe failed: %s\n", e.what());
        return kExitSolverFailure;
    } catch (const qpc::overflow_error& e) {
        std::fprintf(stderr, "orbit overflow: %s\n", e.what());
        return kExitNotQuasiperiodic;
    }
    if (res.classification.cls != qpc::OrbitClass::Quasiperiodic) {
        std::fprintf(stderr, "seed orbit is not quasiperiodic (spread %.3e)\n",
                     res.classification.estimate.spread);
        return kExitNotQuasiperiodic;
    }
    if (!res.report.converged) {
        std::fprintf(stderr, "newton did not converge (defect %.3e)\n",
                     res.report.final_defect);
        return kExitSolverFailure;
    }
    std::printf("rho = %.15f  N = %d  defect = %.3e  iterations = %d\n",
                res.system.rho, res.N, res.report.final_defect,
                res.report.iterations);
    try {
        if (!out.empty()) qpc::write_circle_file(out, to_file_data(res, cfg));
        if (!plot.empty()) {
            std::ofstream os(plot);
            if (!os) throw qpc::io_error("cannot write " + plot);
            qpc::write_plot_csv(os, res.system, plot_samples, mod_2pi);
        }
    } catch (const qpc::io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    }
    return kExitOk;
}

int cmd_continue(const std::string& in, double step, int direction, long max_steps,
                 const std::string& out) {
    qpc::CircleFileData data;
    try {
        data = qpc::read_circle_file(in);
    } catch (const qpc::io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    }
    qpc::ContinuationConfig cfg;
    cfg.initial_step = step;
    cfg.max_steps = max_steps;
    qpc::ContinuationRecord start;
    start.rho = data.system.rho;
    start.system = data.system;
    start.defect = qpc::defect(data.system, data.spec);

    auto print_rec = [&cfg](const qpc::ContinuationRecord& rec) {
        double s1 = 0, s5 = 0, s10 = 0;
        for (auto& [order, nval] : rec.sobolev) {
            if (order == 1) s1 = nval;
            if (order == 5) s5 = nval;
            if (order == 10) s10 = nval;
        }
        std::printf("rho %.15f  defect %.3e  sobolev(1) %.6g  sobolev(5) %.6g  "
                    "sobolev(10) %.6g\n",
                    rec.rho, rec.defect, s1, s5, s10);
        (void)cfg;
    };
    qpc::FamilyResult fam =
        qpc::continue_family(start, cfg, direction, data.spec, print_rec);
    std::printf("stop: %s after %zu records\n",
                qpc::stop_reason_name(fam.stop_reason).c_str(), fam.records.size());

    if (!out.empty()) {
        qpc::FamilyFileData fd;
        fd.spec = data.spec;
        fd.stop_reason = fam.stop_reason;
        for (const qpc::ContinuationRecord& rec : fam.records) {
            qpc::CircleFileData cd = data;
            cd.system = rec.system;
            cd.final_defect = rec.defect;
            cd.created = now_string();
            fd.records.push_back(std::move(cd));
            fd.sobolev.push_back(rec.sobolev);
        }
        try {
            qpc::write_family_file(out, fd);
        } catch (const qpc::io_error& e) {
            std::fprintf(stderr, "io error: %s\n", e.what());
            return kExitIo;
        }
    }
    return kExitOk;
}

int cmd_verify(const std::string& in) {
    qpc::CircleFileData data;
    try {
        data = qpc::read_circle_file(in);
    } catch (const qpc::io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    }
    bool ok = true;
    auto check = [&ok](const char* name, bool pass, double value) {
        std::printf("%-10s %s (%.3e)\n", name, pass ? "PASS" : "FAIL", value);
        if (!pass) ok = false;
    };

    double df = qpc::defect(data.system, data.spec);
    check("defect", df <= std::max(1e-9, 10.0 * data.final_defect), df);

    double sym = 0.0;
    for (const qpc::FourierCircle& K : data.system.circles)
        sym = std::max(sym, qpc::symmetry_residual(K));
    check("symmetry", sym <= 1e-10, sym);

    double beta = std::fabs(data.unfolding.beta);
    check("beta", beta <= 1e-10, beta);
    if (!data.unfolding.gamma.empty()) {
        check("gamma", data.unfolding.max_gamma() <= 1e-10,
              data.unfolding.max_gamma());
        check("omega", data.unfolding.max_omega() <= 1e-10,
              data.unfolding.max_omega());
    }

    qpc::AreaDiagnostics areas = qpc::unfolding_diagnostics(
        data.system.circles[0], data.spec, data.system.rho);
    double a12 = std::fabs(areas.A1 - areas.A2);
    check("area12", a12 <= 1e-12 * std::max(1.0, std::fabs(areas.A1)), a12);
    double a13 = std::fabs(areas.A1 - areas.A3) / std::max(1e-300, std::fabs(areas.A1));
    check("area13", a13 <= 1e-7, a13);

    std::printf("verify: %s\n", ok ? "PASS" : "FAIL");
    return ok ? kExitOk : kExitSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasiperiodic invariant circle toolkit"};
    app.require_subcommand(1);

    MapOpts mopts_classify, mopts_circle;
    std::string seed = "0.4,0", center, json_out;
    long M = 20000;
    CLI::App* classify = app.add_subcommand("classify", "classify a seed orbit");
    add_map_options(classify, mopts_classify);
    classify->add_option("--seed", seed, "seed point x,y")->required();
    classify->add_option("--m", M, "orbit length");
    classify->add_option("--center", center, "projection center x,y");
    classify->add_option("--json", json_out, "write JSON report");

    std::string cseed = "0.4,0", out, plot;
    int period = 1, n_modes = 0, plot_samples = 1024;
    bool mod_2pi = false;
    CLI::App* circle = app.add_subcommand("circle", "compute an invariant circle");
    add_map_options(circle, mopts_circle);
    circle->add_option("--seed", cseed, "seed point x,y")->required();
    circle->add_option("--period", period, "system period d");
    circle->add_option("--n-modes", n_modes, "truncation override");
    circle->add_option("--out", out, "output circle file");
    circle->add_option("--plot", plot, "output CSV of curve samples");
    circle->add_option("--plot-samples", plot_samples, "samples per component");
    circle->add_flag("--mod-2pi", mod_2pi, "reduce x mod 2pi in plot output");

    std::string cin_file, cout_file;
    double step = 1e-3;
    int direction = 1;
    long max_steps = 100000;
    CLI::App* cont = app.add_subcommand("continue", "continue a circle family in rho");
    cont->add_option("--in", cin_file, "input circle file")->required();
    cont->add_option("--step", step, "initial rho increment");
    cont->add_option("--direction", direction, "+1 or -1");
    cont->add_option("--max-steps", max_steps, "record limit");
    cont->add_option("--out", cout_file, "output family file");

    std::string vin_file;
    CLI::App* verify = app.add_subcommand("verify", "re-verify a stored circle");
    verify->add_option("--in", vin_file, "input circle file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (classify->parsed())
            return cmd_classify(mopts_classify, seed, M, center, json_out);
        if (circle->parsed())
            return cmd_circle(mopts_circle, cseed, period, n_modes, out, plot,
                              plot_samples, mod_2pi);
        if (cont->parsed())
            return cmd_continue(cin_file, step, direction, max_steps, cout_file);
        if (verify->parsed()) return cmd_verify(vin_file);
    } catch (const qpc::degenerate_projection_error& e) {
        std::fprintf(stderr, "projection error: %s\n", e.what());
        return kExitNotQuasiperiodic;
    } catch (const qpc::overflow_error& e) {
        std::fprintf(stderr, "orbit overflow: %s\n", e.what());
        return kExitNotQuasiperiodic;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSolverFailure;
    }
    return kExitOk;
}
