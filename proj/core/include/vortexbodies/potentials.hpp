#pragma once
// All potentials attached to one configuration: coupled and standalone
// Kirchhoff potentials, circulation stream functions, the Biot-Savart
// correction, added-mass matrices, shape derivatives, conformal centres, and
// the phantom (kappa-removed) approximation of the exterior field.

#include <Eigen/Dense>
#include <array>
#include <map>
#include <memory>
#include <optional>

#include "vortexbodies/laplace.hpp"
#include "vortexbodies/vorticity.hpp"

namespace vb {

// Primitive of K_{kappa,j} along the body boundary (boundary data of the
// harmonic conjugate of the Kirchhoff potential).
double kirchhoff_primitive(int j, const Vec2& x, const Vec2& h);

// d/ds of nodal values along a component (spectral).
std::vector<double> tangential_derivative(const BoundaryGrid& g, const std::vector<double>& v);

// --- standalone (body alone in the plane) ----------------------------------

class StandaloneBodyPotentials {
  public:
    StandaloneBodyPotentials(const BodyShape& shape, double eps, const Pose& pose, int panels);

    const BoundaryGrid& grid() const { return solver_.body_grid(); }
    Vec2 center() const { return grid().center; }

    // Kirchhoff potentials phi_hat_j, j in 1..5 (zero boundary mean).
    Vec2 phi_gradient(int j, const Vec2& x) const;
    Mat2 phi_gradient_jacobian(int j, const Vec2& x) const;
    double phi_value(int j, const Vec2& x) const;          // off-boundary
    const std::vector<double>& phi_trace(int j) const;     // on the body, zero mean

    // circulation stream psi_hat (unit circulation, decaying gradient)
    double psi_value(const Vec2& x) const;
    Vec2 psi_gradient(const Vec2& x) const;
    Mat2 psi_hessian(const Vec2& x) const;
    double psi_constant() const { return fpsi_.c_hat(); }
    const std::vector<double>& psi_normal_derivative() const;  // on the body

    Eigen::Matrix3d added_mass() const;  // standalone added inertia, rows i, cols i'
    Vec2 conformal_center() const;

  private:
    const ExteriorField& G(int j) const;

    ExteriorSolver solver_;
    mutable std::array<std::optional<ExteriorField>, 5> Ghat_;   // conjugates of phi_hat_j
    mutable std::array<std::optional<std::vector<double>>, 5> trace_;
    mutable std::array<double, 5> shift_{};  // boundary-mean normalization offsets
    ExteriorField fpsi_;  // correction of the log in psi_hat
    mutable std::optional<std::vector<double>> dn_psi_;
};

// --- coupled bundle ---------------------------------------------------------

enum class KirchhoffNormalization { PinOuter, ZeroMeanOwnBody };

class PotentialBundle {
  public:
    PotentialBundle(const Configuration& cfg, const VorticityField& omega,
                    int panel_override = 0);

    const Configuration& config() const { return cfg_; }
    const MultiDomain& domain() const { return *dom_; }
    const DomainSolver& solver() const { return *solver_; }
    const VorticityField& vorticity() const { return omega_; }
    int body_count() const { return cfg_.body_count(); }

    const StandaloneBodyPotentials& standalone(int k) const;

    // coupled Kirchhoff potential phi_{k,j} (Neumann data K_{k,j} on body k)
    const NeumannField& kirchhoff(int k, int j) const;
    // boundary values of phi_{k,j} on component comp
    const std::vector<double>& kirchhoff_trace(int k, int j, int comp) const;

    // circulation stream psi_k: zero trace on the outer wall, constants on the
    // bodies, flux -delta_{nk} (unit circulation around body k)
    const ModifiedDirichletSolution& circulation_stream(int k) const;

    // Biot-Savart: free blob part plus the domain correction stream w
    const ModifiedDirichletSolution& bs_correction() const;
    Vec2 blob_velocity_sum(const Vec2& x, int skip_blob = -1) const;
    Vec2 biot_savart(const Vec2& x, int skip_blob = -1) const;
    Mat2 biot_savart_jacobian(const Vec2& x) const;

    // u = sum_{nu,i} p_{nu,i} grad phi_{nu,i} + sum gamma_nu rot grad psi_nu + K[omega]
    Vec2 velocity(const Eigen::VectorXd& p, const std::vector<double>& gamma, const Vec2& x,
                  int skip_blob = -1) const;
    Mat2 velocity_jacobian(const Eigen::VectorXd& p, const std::vector<double>& gamma,
                           const Vec2& x) const;

    const Eigen::MatrixXd& added_mass() const;  // coupled 3N x 3N

    // shape derivative d phi_{lam,ell} / d q_{mu,m}
    NeumannField shape_derivative_kirchhoff(int lam, int ell, int mu, int m) const;
    // Dirichlet data (on body mu) of the conjugate of that shape derivative
    std::vector<double> shape_derivative_data(int lam, int ell, int mu, int m) const;

    KirchhoffNormalization normalization{KirchhoffNormalization::PinOuter};

  private:
    Configuration cfg_;
    VorticityField omega_;
    std::shared_ptr<const MultiDomain> dom_;
    std::unique_ptr<DomainSolver> solver_;
    mutable std::vector<std::unique_ptr<StandaloneBodyPotentials>> standalone_;
    mutable std::map<std::pair<int, int>, NeumannField> kirchhoff_;
    mutable std::map<std::tuple<int, int, int>, std::vector<double>> traces_;
    mutable std::vector<std::optional<ModifiedDirichletSolution>> streams_;
    mutable std::optional<ModifiedDirichletSolution> bs_;
    mutable std::optional<Eigen::MatrixXd> added_;
    int panels_{0};
};

// Conformal centre of a placed body: zeta = -oint (x-h) dn psi_hat ds, computed
// on a remote contour where the quadrature is spectrally clean.
Vec2 conformal_center(const BodyShape& shape, double eps, const Pose& pose, int panels);

// --- phantom approximation of the kappa-th exterior field -------------------

class PhantomVelocity {
  public:
    PhantomVelocity(const Configuration& cfg, int kappa, const VorticityField& omega,
                    const Eigen::VectorXd& p_full, const std::vector<double>& gamma,
                    int panel_override = 0);

    Vec2 value(const Vec2& x) const;
    Mat2 jacobian(const Vec2& x) const;

    const ModifiedDirichletSolution& psi_r_phantom() const { return psi_r_nok_; }
    const PotentialBundle& reduced_bundle() const { return *bundle_; }

  private:
    int kappa_;
    double gamma_kappa_;
    std::unique_ptr<PotentialBundle> bundle_;          // on cfg without body kappa
    std::unique_ptr<StandaloneBodyPotentials> own_;    // standalone of the removed body
    ModifiedDirichletSolution psi_r_nok_;
    Eigen::VectorXd p_reduced_;
    std::vector<double> gamma_reduced_;
};

}  // namespace vb
