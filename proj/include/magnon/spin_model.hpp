#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace magnon {

using Vec3 = Eigen::Vector3d;

// all energies/fields in Tesla-equivalent units (energy per moment)
struct MaterialParams {
    double exchange_field = 0;   // J
    double dm_field = 0;         // D, DM vector along b
    double anisotropy_a = 0;     // A_a
    double anisotropy_c = 0;     // A_c
    double gamma = 1.76085963e11; // rad/s/T
    double gilbert_damping = 0;

    void validate() const;
};

struct FieldConfig {
    double magnitude = 0; // T
    double theta_deg = 0; // tilt from c toward b

    Vec3 vector() const;
    void validate() const;
};

struct EquilibriumState {
    Vec3 r1, r2;
    double beta_z = 0; // angle between R_i and the a-b plane
    double energy = 0;
    double tangent_gradient = 0;
    int iterations = 0;
};

double free_energy(const MaterialParams& p, const FieldConfig& f, const Vec3& r1, const Vec3& r2);

// -dE/dr_i, not projected
void effective_fields(const MaterialParams& p, const FieldConfig& f, const Vec3& r1, const Vec3& r2,
                      Vec3& h1, Vec3& h2);

// undamped precession dr_i/dt = -gamma r_i x H_i, in rad/s units
Eigen::Matrix<double, 6, 1> llg_rhs(const MaterialParams& p, const FieldConfig& f,
                                    const Eigen::Matrix<double, 6, 1>& y, double alpha);

struct EquilibriumOptions {
    double gradient_tol = 1e-12;
    int max_iterations = 200;
};

EquilibriumState find_equilibrium(const MaterialParams& p, const FieldConfig& f,
                                  const std::optional<EquilibriumState>& warm = std::nullopt,
                                  const EquilibriumOptions& opt = {});

// lowest field at which r1 = r2 (|G| < 1e-9) along an upward warm-started sweep; bisection to tol
double alignment_field(const MaterialParams& p, double theta_deg, double h_max = 5000, double tol = 1e-6);

// fastest small-oscillation angular frequency about eq (from the 6x6 flow Jacobian)
double fastest_mode(const MaterialParams& p, const FieldConfig& f, const EquilibriumState& eq);

struct Impulse {
    Vec3 axis{1, 0, 0};
    double angle = 1e-3; // rad
};

struct TrajectorySample {
    double t;
    Vec3 r1, r2, F, G;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double dt = 0;
};

// both spins rotated by impulse.angle about impulse.axis
EquilibriumState apply_impulse(const EquilibriumState& eq, const Impulse& imp);

Trajectory integrate_llg(const MaterialParams& p, const FieldConfig& f, const EquilibriumState& initial,
                         double duration, double dt);

} // namespace magnon
