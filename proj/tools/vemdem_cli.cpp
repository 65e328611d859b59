#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "vemdem/dem.hpp"
#include "vemdem/mdem.hpp"
#include "vemdem/mesh.hpp"
#include "vemdem/output.hpp"
#include "vemdem/relax.hpp"
#include "vemdem/scenario.hpp"
#include "vemdem/sim.hpp"
#include "vemdem/vem.hpp"

using namespace vemdem;

namespace {

struct Common {
    std::string out;
    int seed = 0;  // reserved: every command is deterministic
    unsigned threads = 0;
    int vtk_every = -1;
};

void apply(const Common& c, scenario::Scenario& sc) {
    if (!c.out.empty()) sc.output_dir = c.out;
    if (c.threads > 0) sc.threads = c.threads;
    if (c.vtk_every >= 0) sc.vtk_every = c.vtk_every;
}

int simulate(const scenario::Scenario& sc) {
    const auto t0 = std::chrono::steady_clock::now();
    sim::Simulation s(sc);
    std::printf("mesh: %zu nodes, %zu cells; injection rate %.6g m^2/s\n", s.mesh().num_nodes(), s.mesh().num_cells(),
                s.injection_rate());
    const auto res = s.run([](const sim::Simulation& x) {
        std::printf("t=%-7g max p=%.4g Pa  fractured=%zu\n", x.state().time, x.state().p.maxCoeff(), x.events().size());
        std::fflush(stdout);
    });
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%zu fracture events; fractured-set aspect (vertical/horizontal) %.3g; %zu relaxation steps; %.1fs\n",
                res.events.size(), sim::fracture_aspect(s.geometry(), s.state().fractured), res.relax_steps, secs);
    if (!sc.output_dir.empty()) std::printf("output written to %s\n", sc.output_dir.c_str());
    return 0;
}

int patch_test(const Common& c) {
    const auto m = mesh::build_hybrid_mesh({6.0, 6.0, 6, 6}, {mesh::Vec2(3, 3), 1.0, 0.2, 0.0});
    Eigen::Matrix2d G;
    G << 1e-3, -2e-3, 3e-3, 5e-4;
    const auto g = [G](const mesh::Vec2& x) { return mesh::Vec2(G * x + mesh::Vec2(0.1, -0.2)); };
    const auto D = tensors::isotropic_stiffness(1e9, 0.3);
    const std::vector<tensors::StiffnessTensor> Ds(m.num_cells(), D);
    const auto sys = vem::assemble(m, Ds, vem::BcSpec::all_fixed(g), nullptr, std::max(1u, c.threads));
    const Eigen::VectorXd u = relax::direct_solve(sys);
    double err = 0.0, umax = 0.0;
    for (std::size_t n = 0; n < m.num_nodes(); ++n) {
        err = std::max(err, (u.segment<2>(2 * n) - g(m.nodes[n])).norm());
        umax = std::max(umax, g(m.nodes[n]).norm());
    }
    const auto eps = vem::cell_strains(m, vem::local_operators(m, Ds), u);
    const tensors::KelvinVector sref = D.matrix() * tensors::to_kelvin(0.5 * (G + G.transpose()));
    double spread = 0.0;
    for (const auto& e : eps) spread = std::max(spread, (D.matrix() * e - sref).norm() / sref.norm());
    std::printf("hybrid mesh: %zu nodes, %zu cells\n", m.num_nodes(), m.num_cells());
    std::printf("max nodal error (relative): %.3e\nmax cell stress deviation (relative): %.3e\n", err / umax, spread);
    if (!c.out.empty()) {
        std::filesystem::create_directories(c.out);
        output::Snapshot s;
        s.u = u;
        s.pressure = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.num_cells()));
        s.divergence = vem::discrete_divergence(m, mesh::compute_geometry(m)) * u;
        for (const auto& e : eps) s.cell_stress.push_back(D.matrix() * e);
        s.nodal_stress = sim::stress_recovery(m, mesh::compute_geometry(m).area, s.cell_stress);
        s.fractured.assign(m.num_cells(), 0);
        output::write_vtk(m, s, c.out + "/patch_test.vtk");
        std::printf("wrote %s/patch_test.vtk\n", c.out.c_str());
    }
    return err / umax < 1e-9 && spread < 1e-8 ? 0 : 1;
}

int dem_analyze(const Common& c, double kn, double ks, int samples) {
    const auto sq = dem::effective_lame(dem::Packing::Square3d, kn, ks);
    const auto rs = dem::effective_lame(dem::Packing::RegularSimplex, kn, ks);
    std::printf("kn=%g ks=%g\n", kn, ks);
    std::printf("square-3d:       lambda=%g mu=%g\n", sq.lambda, sq.mu);
    std::printf("regular-simplex: lambda=%g mu=%g\n", rs.lambda, rs.mu);
    std::printf("Poisson ratio: 3d=%.6g plane-strain=%.6g plane-stress=%.6g\n",
                dem::poisson_limit(kn, ks, dem::PoissonMode::ThreeD),
                dem::poisson_limit(kn, ks, dem::PoissonMode::PlaneStrain),
                dem::poisson_limit(kn, ks, dem::PoissonMode::PlaneStress));
    const std::string dir = c.out.empty() ? "." : c.out;
    std::filesystem::create_directories(dir);
    dem::write_poisson_table(dir + "/poisson.csv", samples);
    std::printf("wrote %s/poisson.csv\n", dir.c_str());
    return 0;
}

int gap_map(const Common& c, double nu, int n, double extent) {
    const auto grid = mdem::gap_tensor_map(tensors::isotropic_stiffness(1.0, nu).matrix(), n, extent);
    const std::string dir = c.out.empty() ? "." : c.out;
    std::filesystem::create_directories(dir);
    mdem::write_gap_csv(grid, dir + "/gap_map.csv");
    double worst = 0.0;
    for (const auto& s : grid.samples) {
        if (s.T) worst = std::max(worst, s.T->cwiseAbs().maxCoeff());
    }
    std::printf("%dx%d apex offsets in [-%g, %g], nu=%g: max |T| = %.4g\nwrote %s/gap_map.csv\n", n, n, extent, extent,
                nu, worst, dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid VEM / MDEM hydraulic fracturing simulator"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--out", common.out, "Output directory");
    app.add_option("--seed", common.seed, "Random seed (reserved; all commands are deterministic)");
    app.add_option("--threads", common.threads, "Threads for local operator assembly")->check(CLI::PositiveNumber);
    app.add_option("--vtk-every", common.vtk_every, "Write a VTK snapshot every k steps (0: last step only)")
        ->check(CLI::NonNegativeNumber);

    std::string scenario_path;
    auto* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("scenario", scenario_path, "Scenario JSON")->required();

    app.add_subcommand("patch-test", "Linear-field patch test on a hybrid mesh with hanging nodes");

    double kn = 1.0, ks = 0.5;
    int samples = 21;
    auto* dem_cmd = app.add_subcommand("dem-analyze", "Effective constants of DEM packings; writes poisson.csv");
    dem_cmd->add_option("--kn", kn, "Normal contact stiffness");
    dem_cmd->add_option("--ks", ks, "Shear contact stiffness");
    dem_cmd->add_option("--samples", samples, "Rows in the Poisson table")->check(CLI::PositiveNumber);

    double nu = 0.25, extent = 0.3;
    int n = 21;
    auto* gap = app.add_subcommand("gap-map", "MDEM gap tensor over apex perturbations; writes gap_map.csv");
    gap->add_option("--nu", nu, "Poisson ratio");
    gap->add_option("-n", n, "Samples per axis")->check(CLI::PositiveNumber);
    gap->add_option("--extent", extent, "Largest apex offset");

    app.add_subcommand("demo", "Scaled 10 m x 10 m injection example");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto sc = scenario::load(scenario_path);
            apply(common, sc);
            return simulate(sc);
        }
        if (app.got_subcommand("patch-test")) return patch_test(common);
        if (dem_cmd->parsed()) return dem_analyze(common, kn, ks, samples);
        if (gap->parsed()) return gap_map(common, nu, n, extent);
        if (app.got_subcommand("demo")) {
            scenario::Scenario sc;
            sc.output_dir = "demo_out";
            sc.vtk_every = 10;
            apply(common, sc);
            return simulate(sc);
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
