// nsbench: benchmark scenarios for the rotation-form Navier-Stokes solver.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prns/error.hpp"
#include "prns/scenarios.hpp"

namespace fs = std::filesystem;
using namespace prns;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 2;
constexpr int kExitConfig = 3;

struct Options {
    std::string scenario;
    int k = 2;
    int levels = 3;
    double nu = 0.1;
    std::string re_schedule;
    std::string method = "reconstructed";
    std::string mesh = std::string(PRNS_DATA_DIR) + "/cylinder_channel.mesh";
    double gamma = 2.5;
    int M = 40;
    double lambda = 1e6;
    bool mixed = true;
    bool drop_outflow_term = false;
    std::string out = "nsbench_out";
};

std::vector<double> parse_schedule(const std::string& csv) {
    std::vector<double> re;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            re.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidArgument("bad Reynolds number '" + item + "' in --re-schedule");
        }
    }
    return re;
}

std::string header(const Options& o) {
    std::ostringstream s;
    s << "# scenario=" << o.scenario << " k=" << o.k << " method=" << o.method;
    if (o.scenario == "cavity" || o.scenario == "cylinder") {
        s << " re_schedule=" << o.re_schedule;
        if (o.scenario == "cavity") s << " M=" << o.M << " gamma=" << o.gamma;
        else s << " mesh=" << o.mesh;
    } else {
        s << " levels=" << o.levels;
        if (o.scenario == "irrotational") s << " lambda=" << o.lambda;
        else s << " nu=" << o.nu;
        if (o.scenario == "mms") s << " mixed=" << o.mixed << " outflow_term=" << !o.drop_outflow_term;
    }
    s << '\n';
    return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
}

/// Exports velocity and kinematic pressure of a solved level.
LevelHook vtk_hook(const fs::path& path, int k) {
    return [path, k](const FormContext& ctx, const SolveReport& rep) {
        const DiscreteField u = rep.velocity(ctx);
        const DiscreteField p = rep.pressure(ctx);
        const DiscreteField pk = kinematic_pressure(u, p);
        export_vtk(ctx.mesh(), {{"velocity", &u}, {"bernoulli_pressure", &p}, {"kinematic_pressure", &pk}}, path,
                   k);
    };
}

int run_rates(const Options& o, const fs::path& stem) {
    const Method method = parse_method(o.method);
    const LevelHook hook = vtk_hook(stem.string() + ".vtk", o.k);
    ConvergenceResult r;
    if (o.scenario == "kovasznay") r = run_kovasznay(o.k, o.levels, o.nu, method, hook);
    else if (o.scenario == "noflow") r = run_noflow(o.k, o.levels, o.nu, method, hook);
    else if (o.scenario == "irrotational") r = run_irrotational(o.k, o.levels, o.lambda, method, hook);
    else r = run_mms(o.k, o.levels, o.mixed, !o.drop_outflow_term, method, o.nu, hook);
    write_file(stem.string() + ".csv", rate_table_csv(r.rows));
    const std::string table = header(o) + rate_table_text(r.rows);
    write_file(stem.string() + ".txt", table);
    std::cout << table;
    if (!r.converged) {
        std::cerr << "nsbench: " << r.failure << '\n';
        return kExitNoConvergence;
    }
    return kExitOk;
}

void write_profile(const fs::path& path, const char* coord, const char* value,
                   const std::vector<std::pair<double, double>>& data) {
    std::ostringstream s;
    s.precision(12);
    s << coord << ',' << value << '\n';
    for (const auto& [c, v] : data) s << c << ',' << v << '\n';
    write_file(path, s.str());
}

int run_cavity_cli(const Options& o, const fs::path& stem) {
    CavityOptions c;
    c.k = o.k;
    c.M = o.M;
    c.gamma = o.gamma;
    if (!o.re_schedule.empty()) c.reynolds = parse_schedule(o.re_schedule);
    c.method = parse_method(o.method);
    c.hook = [&stem, &o](const FormContext& ctx, const SolveReport& rep, double) {
        vtk_hook(stem.string() + ".vtk", o.k)(ctx, rep);
    };
    const auto steps = run_cavity(c);
    std::ostringstream csv, txt;
    csv.precision(10);
    txt.precision(6);
    csv << "Re,iterations,converged,phi_min,x_center,y_center\n";
    txt << header(o);
    bool ok = true;
    for (const auto& s : steps) {
        csv << s.re << ',' << s.iterations << ',' << s.converged;
        txt << "Re=" << s.re << " newton=" << s.iterations;
        if (s.vortex) {
            csv << ',' << s.vortex->value << ',' << s.vortex->center.x() << ',' << s.vortex->center.y();
            txt << " phi=" << s.vortex->value << " center=(" << s.vortex->center.x() << ", "
                << s.vortex->center.y() << ")";
            const std::string re = std::to_string(static_cast<long>(s.re));
            write_profile(stem.string() + "_Re" + re + "_u1_x0.5.csv", "y", "u1", s.u1_vertical);
            write_profile(stem.string() + "_Re" + re + "_u2_y0.5.csv", "x", "u2", s.u2_horizontal);
        } else {
            csv << ",,,";
        }
        csv << '\n';
        if (!s.converged) {
            txt << " FAILED: " << s.failure;
            ok = false;
        }
        txt << '\n';
    }
    write_file(stem.string() + ".csv", csv.str());
    write_file(stem.string() + ".txt", txt.str());
    std::cout << txt.str();
    return ok ? kExitOk : kExitNoConvergence;
}

int run_cylinder_cli(const Options& o, const fs::path& stem) {
    CylinderOptions c;
    c.mesh = o.mesh;
    c.k = o.k;
    if (!o.re_schedule.empty()) c.reynolds = parse_schedule(o.re_schedule);
    c.method = parse_method(o.method);
    c.hook = [&stem, &o](const FormContext& ctx, const SolveReport& rep, double) {
        vtk_hook(stem.string() + ".vtk", o.k)(ctx, rep);
    };
    const auto steps = run_cylinder(c);
    std::ostringstream csv, txt;
    csv.precision(10);
    csv << "Re,iterations,converged,outlet_mean_pressure\n";
    txt << header(o);
    bool ok = true;
    for (const auto& s : steps) {
        csv << s.re << ',' << s.iterations << ',' << s.converged << ',' << s.outlet_mean_pressure << '\n';
        txt << "Re=" << s.re << " newton=" << s.iterations << " outlet_mean_p=" << s.outlet_mean_pressure;
        if (!s.converged) {
            txt << " FAILED: " << s.failure;
            ok = false;
        }
        txt << '\n';
    }
    write_file(stem.string() + ".csv", csv.str());
    write_file(stem.string() + ".txt", txt.str());
    std::cout << txt.str();
    return ok ? kExitOk : kExitNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Pressure-robust Navier-Stokes benchmarks"};
    app.add_option("scenario", o.scenario, "kovasznay | noflow | irrotational | cavity | cylinder | mms")
        ->required()
        ->check(CLI::IsMember({"kovasznay", "noflow", "irrotational", "cavity", "cylinder", "mms"}));
    app.add_option("--k", o.k, "velocity degree")->check(CLI::Range(2, 4));
    app.add_option("--levels", o.levels, "number of mesh levels")->check(CLI::PositiveNumber);
    app.add_option("--nu", o.nu, "viscosity")->check(CLI::PositiveNumber);
    app.add_option("--re-schedule", o.re_schedule, "comma-separated Reynolds numbers");
    app.add_option("--method", o.method, "reconstructed | classical")
        ->check(CLI::IsMember({"reconstructed", "classical"}));
    app.add_option("--mesh", o.mesh, "mesh file for the cylinder scenario");
    app.add_option("--gamma", o.gamma, "cavity stretching parameter")->check(CLI::NonNegativeNumber);
    app.add_option("--M", o.M, "cavity cells per side")->check(CLI::PositiveNumber);
    app.add_option("--lambda", o.lambda, "pressure scale of the irrotational scenario");
    app.add_flag("!--dirichlet-only", o.mixed, "mms: Dirichlet data on the whole boundary");
    app.add_flag("--drop-outflow-term", o.drop_outflow_term, "mms: omit the outflow convection term");
    app.add_option("--out", o.out, "output directory");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    try {
        fs::create_directories(o.out);
        const fs::path stem = fs::path(o.out) / (o.scenario + "_k" + std::to_string(o.k));
        if (o.scenario == "cavity") return run_cavity_cli(o, stem);
        if (o.scenario == "cylinder") return run_cylinder_cli(o, stem);
        return run_rates(o, stem);
    } catch (const InvalidArgument& e) {
        std::cerr << "nsbench: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << "nsbench: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "nsbench: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "nsbench: " << e.what() << '\n';
        return kExitNoConvergence;
    }
}
