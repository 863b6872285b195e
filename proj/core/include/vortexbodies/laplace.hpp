#pragma once
// Harmonic solvers on multiply connected domains, Kress-style Nystrom on the
// double-layer representation
//
//     u(x) = D[mu](x) + sum_k b_k ln|x - z_k|,
//
// with one log source per enclosed body and the side conditions
// oint_{body k} mu ds = 0. Dirichlet traces are second kind; normal
// derivatives and the boundary values of harmonic conjugates come from the
// imaginary part of the underlying Cauchy integral, whose on-curve singular
// part reduces to a Fourier multiplier after integrating by parts against the
// log kernel.

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "vortexbodies/errors.hpp"
#include "vortexbodies/geometry.hpp"
#include "vortexbodies/grid.hpp"

namespace vb {

// Samples on every component of the fluid boundary (outer may be absent).
struct BoundaryData {
    Eigen::VectorXd outer;
    std::vector<Eigen::VectorXd> body;

    double sup_norm() const;
    BoundaryData& operator+=(const BoundaryData& r);
    BoundaryData& operator-=(const BoundaryData& r);
    BoundaryData operator-(const BoundaryData& r) const;
    BoundaryData operator+(const BoundaryData& r) const;
};

class MultiDomain {
  public:
    MultiDomain(std::optional<BoundaryGrid> outer, std::vector<BoundaryGrid> bodies);

    bool has_outer() const { return outer_.has_value(); }
    int body_count() const { return int(bodies_.size()); }
    const BoundaryGrid& outer() const { return *outer_; }
    const BoundaryGrid& body(int k) const { return bodies_[k]; }

    // Stacked components: outer first when present, then bodies in order.
    int comp_count() const { return int(comps_.size()); }
    const BoundaryGrid& comp(int c) const { return *comps_[c]; }
    bool comp_is_body(int c) const { return comps_[c]->is_body; }
    int comp_of_body(int k) const { return has_outer() ? k + 1 : k; }
    int offset(int c) const { return offsets_[c]; }
    int total_nodes() const { return total_; }

    BoundaryData zero_data() const;

    // Kress remainder matrix of component c (cached):
    // r(t_j, t_i) = ln(|y(t_j)-y(t_i)| / |2 sin((t_j-t_i)/2)|).
    const Eigen::MatrixXd& log_remainder(int c) const;

  private:
    std::optional<BoundaryGrid> outer_;
    std::vector<BoundaryGrid> bodies_;
    std::vector<const BoundaryGrid*> comps_;
    std::vector<int> offsets_;
    int total_{0};
    mutable std::vector<std::unique_ptr<Eigen::MatrixXd>> remainders_;
};

std::shared_ptr<const MultiDomain> make_domain(const Configuration& cfg, int panel_override = 0);
std::shared_ptr<const MultiDomain> make_domain(std::optional<BoundaryGrid> outer,
                                               std::vector<BoundaryGrid> bodies);

// A solved harmonic field: double-layer density + log strengths.
class HarmonicField {
  public:
    HarmonicField() = default;
    HarmonicField(std::shared_ptr<const MultiDomain> dom, Eigen::VectorXd mu,
                  std::vector<double> logs);

    double value(const Vec2& x) const;
    Vec2 gradient(const Vec2& x) const;
    Mat2 hessian(const Vec2& x) const;

    // Flux through body k, exact for the representation: -2 pi b_k.
    double flux(int body) const;
    double log_strength(int body) const { return logs_[body]; }

    // Boundary values, on component c, of the single-valued harmonic conjugate
    // of the double-layer part (log sources excluded; one free global constant).
    std::vector<double> conj_trace(int c) const;
    // The same conjugate evaluated off the boundary.
    double conj_value(const Vec2& x) const;

    // Normal derivative of the full field on component c (out-of-fluid normal).
    std::vector<double> normal_derivative(int c) const;

    // Fluid-side Dirichlet trace of the representation on component c
    // (jump relation applied to the stored density plus log terms).
    std::vector<double> dirichlet_trace(int c) const;

    const MultiDomain& domain() const { return *dom_; }
    std::shared_ptr<const MultiDomain> domain_ptr() const { return dom_; }
    const Eigen::VectorXd& density() const { return mu_; }

    HarmonicField& axpy(double a, const HarmonicField& other);  // this += a * other

  private:
    std::shared_ptr<const MultiDomain> dom_;
    Eigen::VectorXd mu_;
    std::vector<double> logs_;
};

struct ModifiedDirichletSolution {
    HarmonicField field;
    std::vector<double> constants;  // c_1..c_N
};

// Assembles and factors the collocation system for one geometry; every solve
// afterwards is a cheap back-substitution, so one factorization serves all
// Kirchhoff, stream, and shape-derivative right-hand sides at a given q.
class DomainSolver {
  public:
    explicit DomainSolver(std::shared_ptr<const MultiDomain> dom);

    const MultiDomain& domain() const { return *dom_; }
    std::shared_ptr<const MultiDomain> domain_ptr() const { return dom_; }

    // Plain Dirichlet problem: trace = data on every component.
    HarmonicField solve_plain(const BoundaryData& data) const;

    // Trace = data + c_k on bodies, data on the outer wall, with the flux
    // through body k prescribed (constant correction through the cached basis
    // fields and their flux map).
    ModifiedDirichletSolution solve_with_fluxes(const BoundaryData& data,
                                                const std::vector<double>& fluxes) const;
    ModifiedDirichletSolution solve_modified(const BoundaryData& data) const;

    const HarmonicField& basis_field(int k) const;  // data 1 on body k, 0 elsewhere
    const Eigen::MatrixXd& flux_map() const { return flux_map_; }

    double condition_estimate() const;  // 1-norm estimate of cond(A)

  private:
    Eigen::VectorXd solve_system(const Eigen::VectorXd& rhs) const;

    std::shared_ptr<const MultiDomain> dom_;
    Eigen::MatrixXd A_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    std::vector<HarmonicField> basis_;
    Eigen::MatrixXd flux_map_;       // N x N, fluxes of the basis fields
    Eigen::PartialPivLU<Eigen::MatrixXd> flux_lu_;
};

// --- named operations --------------------------------------------------------

// Interior Dirichlet problem on a single closed curve (fluid inside).
HarmonicField solve_interior_dirichlet(const BoundaryGrid& curve, const std::vector<double>& data);

// Exterior standalone solve via inversion about the body centre. The field
// decays at infinity; the trace equals data + c_hat on the body.
class ExteriorField {
  public:
    ExteriorField() = default;
    ExteriorField(HarmonicField theta, Vec2 h, double inv_scale, double theta_at_zero,
                  std::vector<int> node_map);

    double value(const Vec2& x) const;
    Vec2 gradient(const Vec2& x) const;
    Mat2 hessian(const Vec2& x) const;
    double conj_value(const Vec2& x) const;  // harmonic conjugate, const free
    double c_hat() const { return c_hat_; }

    // Boundary traces on the body grid the solver was built for.
    std::vector<double> boundary_conj_values() const;   // conjugate, global const free
    std::vector<double> boundary_normal_derivative(const BoundaryGrid& body) const;

  private:
    HarmonicField theta_;     // interior solution in the inverted plane
    Vec2 h_{0.0, 0.0};
    double s_{1.0};           // inversion scale: w = s / (z - h)
    double c_hat_{0.0};
    std::vector<int> map_;    // image node i <-> body node map_[i]
};

class ExteriorSolver {
  public:
    ExteriorSolver(const BodyShape& shape, double eps, const Pose& pose, int panels = 0);

    const BoundaryGrid& body_grid() const { return body_; }
    // data sampled at the body grid nodes
    ExteriorField solve(const std::vector<double>& data) const;

  private:
    BoundaryGrid body_;
    std::shared_ptr<const MultiDomain> image_dom_;
    std::unique_ptr<DomainSolver> image_solver_;
    Vec2 h_;
    double s_;
    std::vector<int> map_;
};

// Integrates beta along the curve (must have zero mean flux) and returns the
// Dirichlet data whose solved field, rotated by 90 degrees, carries Neumann
// data beta on that body and zero on all other components.
std::vector<double> tangential_primitive(const BoundaryGrid& g, const std::vector<double>& beta);

// A Neumann solution represented through its harmonic conjugate.
class NeumannField {
  public:
    NeumannField() = default;
    explicit NeumannField(ModifiedDirichletSolution conj) : g_(std::move(conj)) {}

    Vec2 gradient(const Vec2& x) const { return g_.field.gradient(x).perp(); }
    Mat2 gradient_jacobian(const Vec2& x) const { return perp_rows(g_.field.hessian(x)); }
    double value(const Vec2& x) const { return g_.field.conj_value(x); }
    std::vector<double> boundary_values(int comp) const { return g_.field.conj_trace(comp); }
    const ModifiedDirichletSolution& conjugate() const { return g_; }

  private:
    ModifiedDirichletSolution g_;
};

// Solves the Neumann problem with flux data beta on body k (zero elsewhere)
// through the conjugation route. Throws on nonzero mean flux.
NeumannField neumann_from_tangential(const DomainSolver& solver, int body, const std::vector<double>& beta);

// Quadrature helpers over a contour grid.
double flux_through(const HarmonicField& f, const BoundaryGrid& contour);

}  // namespace vb
