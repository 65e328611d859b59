#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vemdem/sim.hpp"

using namespace vemdem;
using namespace vemdem::sim;
using mesh::Vec2;
using tensors::KelvinVector;

namespace {

scenario::Scenario small_scenario() {
    scenario::Scenario sc;
    sc.inner = {{5.0, 5.0}, 1.0, 0.25, 0.25, true};
    sc.steps = 3;
    return sc;
}

mesh::PolyMesh two_rectangles() {
    // Areas 1 and 3, sharing the nodes at x = 1.
    mesh::PolyMesh m;
    m.nodes = {Vec2(0, 0), Vec2(1, 0), Vec2(4, 0), Vec2(0, 1), Vec2(1, 1), Vec2(4, 1)};
    m.cells = {{0, 1, 4, 3}, {1, 2, 5, 4}};
    m.kind = {mesh::CellKind::Polygon, mesh::CellKind::Polygon};
    m.region = {mesh::Region::FarField, mesh::Region::FarField};
    return m;
}

mesh::PolyMesh four_triangles() {
    mesh::PolyMesh m;
    m.nodes = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1), Vec2(0.5, 0.5)};
    m.cells = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
    m.kind.assign(4, mesh::CellKind::Simplex);
    m.region.assign(4, mesh::Region::NearField);
    return m;
}

KelvinVector uniaxial(double s) { return KelvinVector(s, 0.0, 0.0); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string scratch(const std::string& name) {
    const auto dir = std::filesystem::path(testing::TempDir()) / ("vemdem_" + name);
    std::filesystem::remove_all(dir);
    return dir.string();
}

} // namespace

TEST(StressRecovery, UniformFieldIsExact) {
    const auto m = mesh::build_hybrid_mesh({4.0, 4.0, 4, 4}, {{2.0, 2.0}, 1.0, 0.25, 0.0});
    const auto g = mesh::compute_geometry(m);
    const KelvinVector s(1.5, -2.0, 0.3);
    const auto nodal = stress_recovery(m, g.area, std::vector<KelvinVector>(m.num_cells(), s));
    for (const auto& n : nodal) EXPECT_LT((n - s).norm(), 1e-14);
}

TEST(StressRecovery, AreaWeightedAverage) {
    const auto m = two_rectangles();
    const auto g = mesh::compute_geometry(m);
    const KelvinVector s1(1, 2, 3), s2(5, 6, 7);
    const auto nodal = stress_recovery(m, g.area, {s1, s2});
    EXPECT_LT((nodal[1] - (s1 + 3 * s2) / 4).norm(), 1e-15);
    EXPECT_LT((nodal[4] - (s1 + 3 * s2) / 4).norm(), 1e-15);
    EXPECT_EQ(nodal[0], s1);
    EXPECT_EQ(nodal[2], s2);
    // Equal areas give the plain mean.
    const auto eq = stress_recovery(m, {2.0, 2.0}, {s1, s2});
    EXPECT_LT((eq[1] - (s1 + s2) / 2).norm(), 1e-15);
    EXPECT_THROW(stress_recovery(m, {1.0}, {s1, s2}), ValidationError);
}

TEST(FractureSweep, NoViolator) {
    const auto m = four_triangles();
    EXPECT_FALSE(fracture_sweep(m, std::vector<char>(4, 0), std::vector<KelvinVector>(4, uniaxial(1e5)), 2e5));
    // Equal to the strength is not a failure.
    EXPECT_FALSE(fracture_sweep(m, std::vector<char>(4, 0), std::vector<KelvinVector>(4, uniaxial(2e5)), 2e5));
}

TEST(FractureSweep, OneViolator) {
    const auto m = four_triangles();
    std::vector<KelvinVector> s(4, uniaxial(1e5));
    s[2] = uniaxial(3e5);
    const auto hit = fracture_sweep(m, std::vector<char>(4, 0), s, 2e5);
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->cell, 2);
    EXPECT_DOUBLE_EQ(hit->stress, 3e5);
}

TEST(FractureSweep, LargerOfTwoViolators) {
    const auto m = four_triangles();
    std::vector<KelvinVector> s(4, uniaxial(1e5));
    s[1] = uniaxial(3e5);
    s[3] = uniaxial(4e5);
    EXPECT_EQ(fracture_sweep(m, std::vector<char>(4, 0), s, 2e5)->cell, 3);
}

TEST(FractureSweep, TieGoesToLowerId) {
    const auto m = four_triangles();
    std::vector<KelvinVector> s(4, uniaxial(5e5));
    EXPECT_EQ(fracture_sweep(m, std::vector<char>(4, 0), s, 2e5)->cell, 0);
}

TEST(FractureSweep, SkipsFracturedWellAndPolygonCells) {
    auto m = four_triangles();
    std::vector<KelvinVector> s(4, uniaxial(5e5));
    std::vector<char> frac{1, 0, 0, 0};
    m.region[1] = mesh::Region::Well;
    m.region[2] = mesh::Region::FarField;
    EXPECT_EQ(fracture_sweep(m, frac, s, 2e5)->cell, 3);
    frac[3] = 1;
    EXPECT_FALSE(fracture_sweep(m, frac, s, 2e5));
    EXPECT_THROW(fracture_sweep(m, frac, s, -1.0), ParameterError);
}

TEST(EventLog, TimeOrderAndCsv) {
    EventLog log;
    log.add({72.0, 5, 2.5e5});
    log.add({72.0, 9, 2.1e5});
    EXPECT_THROW(log.add({10.0, 1, 3e5}), ValidationError);
    EXPECT_EQ(log.size(), 2u);
    const std::string path = testing::TempDir() + "events.csv";
    log.write_csv(path);
    EXPECT_EQ(slurp(path), "time,cell,max_principal_stress\n72,5,250000\n72,9,210000\n");
}

TEST(Simulation, NoInjectionMatchesMechanicsOnly) {
    auto sc = small_scenario();
    sc.well_rate = 0.0;
    Simulation sim(sc);
    const VectorXd u0 = sim.mechanics_only();
    const auto res = sim.run();
    EXPECT_TRUE(res.events.empty());
    EXPECT_LT((sim.state().u - u0).norm(), 1e-6 * u0.norm());
    EXPECT_LT((sim.state().p.array() - sc.initial_pressure).abs().maxCoeff(), 1e-6 * sc.initial_pressure);
}

TEST(Simulation, UnbreakableRockPressureRisesMonotonically) {
    auto sc = small_scenario();
    sc.tensile_strength = 1e12;
    sc.steps = 5;
    Simulation sim(sc);
    const auto res = sim.run();
    EXPECT_TRUE(res.events.empty());
    ASSERT_EQ(res.trace.size(), 6u);
    for (std::size_t k = 1; k < res.trace.size(); ++k) {
        EXPECT_GT(res.trace[k].max_pressure, res.trace[k - 1].max_pressure);
        EXPECT_EQ(res.trace[k].fractured, 0);
    }
    EXPECT_GT(sim.injection_rate(), 0.0);
}

TEST(Simulation, InjectionRateIsWellPoreVolumePerDuration) {
    Simulation sim(small_scenario());
    double well_area = 0.0;
    for (std::size_t c = 0; c < sim.mesh().num_cells(); ++c) {
        if (sim.mesh().region[c] == mesh::Region::Well) well_area += sim.geometry().area[c];
    }
    EXPECT_GT(well_area, 0.0);
    EXPECT_NEAR(sim.injection_rate(), 0.3 * well_area / 3600.0, 1e-18);
}

TEST(Simulation, DeterministicAcrossRuns) {
    auto sc = small_scenario();
    sc.steps = 4;  // first failures at the third step
    Simulation a(sc), b(sc);
    const auto ra = a.run();
    const auto rb = b.run();
    EXPECT_GT(ra.events.size(), 0u);
    ASSERT_EQ(ra.events.size(), rb.events.size());
    for (std::size_t i = 0; i < ra.events.size(); ++i) {
        EXPECT_EQ(ra.events.events()[i].cell, rb.events.events()[i].cell);
        EXPECT_EQ(ra.events.events()[i].stress, rb.events.events()[i].stress);
    }
    EXPECT_EQ(a.state().u, b.state().u);
    EXPECT_EQ(a.state().p, b.state().p);
}

TEST(Simulation, FracturesOnlyNearFieldSimplices) {
    auto sc = small_scenario();
    sc.steps = 4;
    Simulation sim(sc);
    sim.run();
    int n = 0;
    for (std::size_t c = 0; c < sim.mesh().num_cells(); ++c) {
        if (!sim.state().fractured[c]) continue;
        ++n;
        EXPECT_EQ(sim.mesh().kind[c], mesh::CellKind::Simplex);
        EXPECT_EQ(sim.mesh().region[c], mesh::Region::NearField);
    }
    EXPECT_EQ(static_cast<std::size_t>(n), sim.events().size());
}

TEST(Simulation, WritesOutputFiles) {
    auto sc = small_scenario();
    sc.steps = 2;
    sc.vtk_every = 1;
    sc.output_dir = scratch("out");
    Simulation sim(sc);
    const auto res = sim.run();
    EXPECT_EQ(res.snapshots.size(), 3u);
    for (const char* f : {"snapshot_0000.vtk", "snapshot_0001.vtk", "snapshot_0002.vtk", "events.csv", "trace.csv"}) {
        EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(sc.output_dir) / f)) << f;
    }
    const std::string trace = slurp(sc.output_dir + "/trace.csv");
    EXPECT_EQ(trace.rfind("time,max_pressure,fractured_count\n", 0), 0u);
}

TEST(Vtk, CountsMatchMesh) {
    auto sc = small_scenario();
    Simulation sim(sc);
    const std::string path = testing::TempDir() + "counts.vtk";
    output::write_vtk(sim.mesh(), sim.snapshot(), path);
    std::ifstream in(path);
    std::string line;
    std::size_t points = 0, cells = 0, cell_data = 0, point_data = 0;
    std::vector<std::string> fields;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "POINTS") ls >> points;
        if (key == "CELLS") ls >> cells;
        if (key == "CELL_DATA") ls >> cell_data;
        if (key == "POINT_DATA") ls >> point_data;
        if (key == "SCALARS" || key == "VECTORS" || key == "TENSORS") {
            std::string name;
            ls >> name;
            fields.push_back(name);
        }
    }
    EXPECT_EQ(points, sim.mesh().num_nodes());
    EXPECT_EQ(point_data, sim.mesh().num_nodes());
    EXPECT_EQ(cells, sim.mesh().num_cells());
    EXPECT_EQ(cell_data, sim.mesh().num_cells());
    const std::vector<std::string> expected{"displacement", "stress",  "pressure", "div_u", "sigma_max",
                                            "sigma_min",    "dir_max", "dir_min",  "fractured", "region"};
    EXPECT_EQ(fields, expected);
}

TEST(Vtk, RejectsMismatchedSnapshot) {
    const auto m = four_triangles();
    output::Snapshot s;
    EXPECT_THROW(output::write_vtk(m, s, testing::TempDir() + "bad.vtk"), ValidationError);
}

TEST(Vtk, GoldenFile) {
    // Uniaxial compression of a tiny hybrid mesh; written once and frozen.
    auto sc = small_scenario();
    sc.region_overrides.clear();
    sc.well_rate = 0.0;
    sc.top.value = {0.0, -1.0};
    sc.initial_pressure = 2.0;
    const auto m = mesh::build_hybrid_mesh({3.0, 3.0, 3, 3}, {{1.5, 1.5}, 0.5, 0.5, 0.0});
    Simulation sim(sc, m);
    const std::string path = testing::TempDir() + "golden.vtk";
    output::write_vtk(sim.mesh(), sim.snapshot(), path);
    const std::string golden = std::string(VEMDEM_TEST_DATA) + "/golden_small.vtk";
    ASSERT_TRUE(std::filesystem::exists(golden)) << "missing " << golden;
    EXPECT_EQ(slurp(path), slurp(golden));
}

TEST(Scenario, DefaultsDescribeScaledExample) {
    const scenario::Scenario sc;
    EXPECT_EQ(sc.outer.width, 10.0);
    EXPECT_EQ(sc.rock.E, 1e9);
    EXPECT_EQ(sc.rock.nu, 0.3);
    EXPECT_EQ(sc.tensile_strength, 2e5);
    EXPECT_EQ(sc.initial_pressure, 1e7);
    EXPECT_EQ(sc.top.value.y(), -1e7);
    EXPECT_NEAR(sc.permeability, 9.869233e-21, 1e-30);
    EXPECT_EQ(sc.porosity, 0.3);
    EXPECT_EQ(sc.storativity, 1e-10);
    EXPECT_EQ(sc.injection_duration, 3600.0);
    EXPECT_NO_THROW(sc.check());
}

TEST(Scenario, JsonParsing) {
    const auto doc = nlohmann::json::parse(R"({
        "geometry": {"width": 8, "height": 6, "nx": 8, "ny": 6,
                     "inner": {"center": [4, 3], "half_size": 1, "half_height": 2, "edge_length": 0.5,
                               "well_radius": 0, "conform_well": false}},
        "materials": {"E": 2e9, "nu": 0.25, "tensile_strength": 1e5, "regions": {"well": {"E": 1e3}}},
        "bc": {"top": {"type": "traction", "traction": [0, -5]}, "left": {"type": "fixed"}},
        "fluid": {"permeability": 1e-18, "volume_coupling": "all"},
        "well": {"rate": 1e-6, "duration": 100},
        "time": {"dt": 10, "steps": 4},
        "solver": {"tol": 1e-7, "threads": 2},
        "output": {"dir": "out", "vtk_every": 2}
    })");
    const auto sc = scenario::from_json(doc);
    EXPECT_EQ(sc.outer.nx, 8);
    EXPECT_EQ(sc.inner.half_height, 2.0);
    EXPECT_EQ(sc.inner.edge_length, 0.5);
    EXPECT_FALSE(sc.inner.conform_well);
    EXPECT_EQ(sc.rock.E, 2e9);
    EXPECT_EQ(sc.material(mesh::Region::Well).E, 1e3);
    EXPECT_EQ(sc.material(mesh::Region::Well).nu, 0.25);
    EXPECT_EQ(sc.top.value.y(), -5.0);
    EXPECT_EQ(sc.left.type, vem::SideBc::Type::Fixed);
    EXPECT_EQ(sc.coupling, scenario::VolumeCoupling::All);
    EXPECT_EQ(*sc.well_rate, 1e-6);
    EXPECT_EQ(sc.steps, 4);
    EXPECT_EQ(sc.relax.tol, 1e-7);
    EXPECT_EQ(sc.threads, 2u);
    EXPECT_EQ(sc.vtk_every, 2);
}

TEST(Scenario, JsonErrors) {
    using nlohmann::json;
    auto bad = [](const char* text) { return scenario::from_json(json::parse(text)); };
    EXPECT_THROW(bad(R"({"bc": {"middle": {"type": "rolling"}}})"), ConfigError);
    EXPECT_THROW(bad(R"({"bc": {"top": {"type": "glued"}}})"), ConfigError);
    EXPECT_THROW(bad(R"({"bc": {"top": {"type": "traction"}}})"), ConfigError);
    EXPECT_THROW(bad(R"({"time": {"dt": -1}})"), ConfigError);
    EXPECT_THROW(bad(R"({"time": {"dt": "fast"}})"), ConfigError);
    EXPECT_THROW(bad(R"({"fluid": {"storativity": 0}})"), ConfigError);
    EXPECT_THROW(bad(R"({"materials": {"nu": 0.5}})"), ConfigError);
    EXPECT_THROW(bad(R"({"materials": {"regions": {"core": {"E": 1}}}})"), ConfigError);
    EXPECT_THROW(bad(R"({"solver": {"damping": 1.5}})"), ConfigError);
    EXPECT_THROW(bad(R"({"geometry": 3})"), ConfigError);
    EXPECT_THROW(bad(R"([1, 2])"), ConfigError);
    EXPECT_THROW(scenario::load("/nonexistent/scenario.json"), IoError);
}

TEST(Scenario, OverrideForMissingRegionIsRejected) {
    auto sc = small_scenario();
    sc.inner.well_radius = 0.0;
    sc.inner.conform_well = false;
    sc.well_rate = 0.0;
    EXPECT_THROW(Simulation{sc}, ConfigError);
}

TEST(Scenario, MeshFileRelativeToScenario) {
    const std::string dir = scratch("meshfile");
    std::filesystem::create_directories(dir);
    const auto m = mesh::build_hybrid_mesh({3.0, 3.0, 3, 3}, {{1.5, 1.5}, 0.5, 0.5, 0.0});
    mesh::write_mesh_json(m, dir + "/mesh.json");
    std::ofstream(dir + "/scenario.json") << R"({"geometry": {"mesh_file": "mesh.json"},
        "materials": {"regions": {}}, "well": {"rate": 0}, "time": {"steps": 1}})";
    const auto sc = scenario::load(dir + "/scenario.json");
    EXPECT_EQ(*sc.mesh_file, dir + "/mesh.json");
    Simulation sim(sc);
    EXPECT_EQ(sim.mesh().num_cells(), m.num_cells());
}

TEST(Scenario, DemoSampleMatchesDefaults) {
    const auto sc = scenario::load(std::string(VEMDEM_TEST_DATA) + "/../../samples/demo.json");
    const scenario::Scenario d;
    EXPECT_EQ(sc.inner.edge_length, d.inner.edge_length);
    EXPECT_EQ(sc.inner.half_height, d.inner.half_height);
    EXPECT_EQ(sc.inner.well_radius, d.inner.well_radius);
    EXPECT_EQ(sc.inner.conform_well, d.inner.conform_well);
    EXPECT_EQ(sc.material(mesh::Region::Well).E, d.material(mesh::Region::Well).E);
    EXPECT_EQ(sc.top.value, d.top.value);
    EXPECT_DOUBLE_EQ(sc.permeability, d.permeability);
    EXPECT_EQ(sc.coupling, d.coupling);
    EXPECT_EQ(sc.dt, d.dt);
    EXPECT_EQ(sc.steps, d.steps);
    EXPECT_EQ(sc.relax.tol, d.relax.tol);
    EXPECT_FALSE(sc.well_rate);
}
