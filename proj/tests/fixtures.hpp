#pragma once

#include "vemdem/mesh.hpp"
#include "vemdem/vem.hpp"

// Shared small problems for the unit tests and the acceptance runner.

namespace vemdem::fixtures {

/// 4 m x 4 m hybrid plate, fine 2 m x 2 m centre block with h = 1/7
/// (482 DOF), rolling on left/right/bottom and a downward top traction.
struct Plate {
    mesh::PolyMesh mesh;
    vem::GlobalSystem sys;
};

inline Plate traction_plate(double traction = 1.0, double E = 1.0, double nu = 0.3) {
    Plate p;
    p.mesh = mesh::build_hybrid_mesh({4.0, 4.0, 4, 4}, {{2.0, 2.0}, 1.0, 1.0 / 7.0, 0.0});
    const std::vector<tensors::StiffnessTensor> D(p.mesh.num_cells(), tensors::isotropic_stiffness(E, nu));
    vem::BcSpec bc;
    bc.top = vem::SideBc::traction_load({0.0, -traction});
    p.sys = vem::assemble(p.mesh, D, bc);
    return p;
}

} // namespace vemdem::fixtures
