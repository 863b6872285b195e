#include "vortexbodies/potentials.hpp"

#include <cmath>

#include "vortexbodies/fft.hpp"

namespace vb {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

double kirchhoff_primitive(int j, const Vec2& x, const Vec2& h) {
    const Vec2 r = x - h;
    switch (j) {
        case 1: return -r.y;
        case 2: return r.x;
        case 3: return 0.5 * r.norm2();
        case 4: return r.x * r.y;
        case 5: return 0.5 * (r.x * r.x - r.y * r.y);
        default: throw InvalidParameterError("kirchhoff_primitive: index must be in 1..5");
    }
}

std::vector<double> tangential_derivative(const BoundaryGrid& g, const std::vector<double>& v) {
    std::vector<double> d = spectral_derivative(v);
    for (int i = 0; i < g.size(); ++i) d[i] /= g.speed[i];
    return d;
}

// ---------------------------------------------------------------------------
// StandaloneBodyPotentials

StandaloneBodyPotentials::StandaloneBodyPotentials(const BodyShape& shape, double eps,
                                                   const Pose& pose, int panels)
    : solver_(shape, eps, pose, panels),
      fpsi_([&] {
          // log data normalized by the body size so densities are exactly
          // scale invariant (the exterior operator does not see the constant)
          const BoundaryGrid& g = solver_.body_grid();
          double circum = 0.0;
          for (const auto& x : g.x) circum = std::max(circum, (x - g.center).norm());
          std::vector<double> d(g.size());
          for (int i = 0; i < g.size(); ++i)
              d[i] = -std::log((g.x[i] - g.center).norm() / circum) / kTwoPi;
          return solver_.solve(d);
      }()) {}

const ExteriorField& StandaloneBodyPotentials::G(int j) const {
    auto& slot = Ghat_[j - 1];
    if (!slot) {
        const BoundaryGrid& g = solver_.body_grid();
        std::vector<double> d(g.size());
        for (int i = 0; i < g.size(); ++i) d[i] = kirchhoff_primitive(j, g.x[i], g.center);
        slot = solver_.solve(d);
    }
    return *slot;
}

Vec2 StandaloneBodyPotentials::phi_gradient(int j, const Vec2& x) const {
    return G(j).gradient(x).perp();
}

Mat2 StandaloneBodyPotentials::phi_gradient_jacobian(int j, const Vec2& x) const {
    return perp_rows(G(j).hessian(x));
}

double StandaloneBodyPotentials::phi_value(int j, const Vec2& x) const {
    phi_trace(j);  // establishes the zero-mean shift
    return G(j).conj_value(x) - shift_[j - 1];
}

const std::vector<double>& StandaloneBodyPotentials::phi_trace(int j) const {
    auto& slot = trace_[j - 1];
    if (!slot) {
        std::vector<double> v = G(j).boundary_conj_values();
        const BoundaryGrid& g = solver_.body_grid();
        double mean = 0.0, wsum = 0.0;
        for (int i = 0; i < g.size(); ++i) {
            mean += g.w[i] * v[i];
            wsum += g.w[i];
        }
        mean /= wsum;
        for (double& x : v) x -= mean;
        shift_[j - 1] = mean;
        slot = std::move(v);
    }
    return *slot;
}

double StandaloneBodyPotentials::psi_value(const Vec2& x) const {
    return std::log((x - center()).norm()) / kTwoPi + fpsi_.value(x);
}

Vec2 StandaloneBodyPotentials::psi_gradient(const Vec2& x) const {
    const Vec2 d = x - center();
    return d * (1.0 / (kTwoPi * d.norm2())) + fpsi_.gradient(x);
}

Mat2 StandaloneBodyPotentials::psi_hessian(const Vec2& x) const {
    const Vec2 d = x - center();
    const double r2 = d.norm2();
    Mat2 lh{1.0 / r2 - 2.0 * d.x * d.x / (r2 * r2), -2.0 * d.x * d.y / (r2 * r2),
            -2.0 * d.x * d.y / (r2 * r2), 1.0 / r2 - 2.0 * d.y * d.y / (r2 * r2)};
    return lh * (1.0 / kTwoPi) + fpsi_.hessian(x);
}

const std::vector<double>& StandaloneBodyPotentials::psi_normal_derivative() const {
    if (!dn_psi_) {
        const BoundaryGrid& g = solver_.body_grid();
        std::vector<double> v = fpsi_.boundary_normal_derivative(g);
        for (int i = 0; i < g.size(); ++i) {
            const Vec2 d = g.x[i] - g.center;
            v[i] += g.n[i].dot(d) / (kTwoPi * d.norm2());
        }
        dn_psi_ = std::move(v);
    }
    return *dn_psi_;
}

Eigen::Matrix3d StandaloneBodyPotentials::added_mass() const {
    const BoundaryGrid& g = solver_.body_grid();
    Eigen::Matrix3d M;
    for (int i = 1; i <= 3; ++i) {
        const std::vector<double>& tr = phi_trace(i);
        for (int j = 1; j <= 3; ++j) {
            double s = 0.0;
            for (int q = 0; q < g.size(); ++q) s += g.w[q] * tr[q] * xi_normal_trace(j, g, q);
            M(i - 1, j - 1) = s;
        }
    }
    return M;
}

Vec2 StandaloneBodyPotentials::conformal_center() const {
    const BoundaryGrid& g = solver_.body_grid();
    double circum = 0.0;
    for (const auto& x : g.x) circum = std::max(circum, (x - g.center).norm());
    BoundaryGrid contour = circle_contour(g.center, 4.0 * circum, g.size(), false);
    Vec2 zeta{0.0, 0.0};
    for (int i = 0; i < contour.size(); ++i) {
        const Vec2 x = contour.x[i];
        const double dn = contour.n[i].dot(psi_gradient(x));
        const double val = psi_value(x);
        zeta += contour.w[i] * ((x - g.center) * dn - contour.n[i] * val);
    }
    return zeta;
}

// ---------------------------------------------------------------------------
// PotentialBundle

PotentialBundle::PotentialBundle(const Configuration& cfg, const VorticityField& omega,
                                 int panel_override)
    : cfg_(cfg), omega_(omega), panels_(panel_override) {
    dom_ = make_domain(cfg, panel_override);
    solver_ = std::make_unique<DomainSolver>(dom_);
    standalone_.resize(cfg.body_count());
    streams_.resize(cfg.body_count());
}

const StandaloneBodyPotentials& PotentialBundle::standalone(int k) const {
    if (!standalone_[k]) {
        const auto& b = cfg_.bodies[k];
        standalone_[k] = std::make_unique<StandaloneBodyPotentials>(b.shape, b.eps, b.pose,
                                                                    dom_->body(k).size());
    }
    return *standalone_[k];
}

const NeumannField& PotentialBundle::kirchhoff(int k, int j) const {
    auto it = kirchhoff_.find({k, j});
    if (it == kirchhoff_.end()) {
        BoundaryData d = dom_->zero_data();
        const BoundaryGrid& g = dom_->body(k);
        for (int i = 0; i < g.size(); ++i)
            d.body[k][i] = kirchhoff_primitive(j, g.x[i], g.center);
        it = kirchhoff_.emplace(std::make_pair(k, j), NeumannField(solver_->solve_modified(d)))
                 .first;
    }
    return it->second;
}

const std::vector<double>& PotentialBundle::kirchhoff_trace(int k, int j, int comp) const {
    auto key = std::make_tuple(k, j, comp);
    auto it = traces_.find(key);
    if (it == traces_.end()) {
        std::vector<double> v = kirchhoff(k, j).boundary_values(comp);
        double shift = 0.0;
        if (normalization == KirchhoffNormalization::PinOuter && dom_->has_outer()) {
            // pin the global additive constant at a fixed point of the wall
            std::vector<double> outer_vals = (comp == 0) ? v : kirchhoff(k, j).boundary_values(0);
            shift = outer_vals[0];
        } else {
            const BoundaryGrid& g = dom_->body(k);
            std::vector<double> own =
                (comp == dom_->comp_of_body(k)) ? v : kirchhoff(k, j).boundary_values(dom_->comp_of_body(k));
            double mean = 0.0, ws = 0.0;
            for (int i = 0; i < g.size(); ++i) {
                mean += g.w[i] * own[i];
                ws += g.w[i];
            }
            shift = mean / ws;
        }
        for (double& x : v) x -= shift;
        it = traces_.emplace(key, std::move(v)).first;
    }
    return it->second;
}

const ModifiedDirichletSolution& PotentialBundle::circulation_stream(int k) const {
    if (!streams_[k]) {
        std::vector<double> fluxes(cfg_.body_count(), 0.0);
        fluxes[k] = -1.0;  // circ-norma: oint dn psi_k = -delta_{nu k}
        streams_[k] = solver_->solve_with_fluxes(dom_->zero_data(), fluxes);
    }
    return *streams_[k];
}

const ModifiedDirichletSolution& PotentialBundle::bs_correction() const {
    if (!bs_) {
        BoundaryData d = dom_->zero_data();
        auto blob_sum = [&](const Vec2& x) {
            double s = 0.0;
            for (std::size_t i = 0; i < omega_.blobs.size(); ++i)
                s += omega_.blobs[i].gamma *
                     blob_stream(x - omega_.blobs[i].z, omega_.effective_core(i));
            return s;
        };
        for (int i = 0; i < d.outer.size(); ++i) d.outer[i] = -blob_sum(dom_->outer().x[i]);
        for (int k = 0; k < cfg_.body_count(); ++k) {
            const BoundaryGrid& g = dom_->body(k);
            for (int i = 0; i < g.size(); ++i) d.body[k][i] = -blob_sum(g.x[i]);
        }
        // prescribe fluxes of w so every body circulation of K[omega] vanishes:
        // circ(blob part) = -flux(w) must cancel
        std::vector<double> fluxes(cfg_.body_count(), 0.0);
        for (int k = 0; k < cfg_.body_count(); ++k) {
            const BoundaryGrid& g = dom_->body(k);
            double circ = 0.0;
            for (int i = 0; i < g.size(); ++i)
                circ += g.w[i] * blob_velocity_sum(g.x[i]).dot(g.circ_tangent(i));
            fluxes[k] = circ;
        }
        bs_ = solver_->solve_with_fluxes(d, fluxes);
    }
    return *bs_;
}

Vec2 PotentialBundle::blob_velocity_sum(const Vec2& x, int skip_blob) const {
    Vec2 u{0.0, 0.0};
    for (std::size_t i = 0; i < omega_.blobs.size(); ++i) {
        if (int(i) == skip_blob) continue;
        u += omega_.blobs[i].gamma *
             blob_velocity(x - omega_.blobs[i].z, omega_.effective_core(i));
    }
    return u;
}

Vec2 PotentialBundle::biot_savart(const Vec2& x, int skip_blob) const {
    if (omega_.blobs.empty()) return {0.0, 0.0};
    return blob_velocity_sum(x, skip_blob) + bs_correction().field.gradient(x).perp();
}

Mat2 PotentialBundle::biot_savart_jacobian(const Vec2& x) const {
    if (omega_.blobs.empty()) return {};
    Mat2 J;
    for (std::size_t i = 0; i < omega_.blobs.size(); ++i)
        J += blob_velocity_jacobian(x - omega_.blobs[i].z, omega_.effective_core(i)) *
             omega_.blobs[i].gamma;
    J += perp_rows(bs_correction().field.hessian(x));
    return J;
}

Vec2 PotentialBundle::velocity(const Eigen::VectorXd& p, const std::vector<double>& gamma,
                               const Vec2& x, int skip_blob) const {
    Vec2 u{0.0, 0.0};
    for (int k = 0; k < cfg_.body_count(); ++k) {
        for (int j = 1; j <= 3; ++j) {
            const double pk = p[3 * k + j - 1];
            if (pk != 0.0) u += pk * kirchhoff(k, j).gradient(x);
        }
        if (gamma[k] != 0.0) u += gamma[k] * circulation_stream(k).field.gradient(x).perp();
    }
    u += biot_savart(x, skip_blob);
    return u;
}

Mat2 PotentialBundle::velocity_jacobian(const Eigen::VectorXd& p, const std::vector<double>& gamma,
                                        const Vec2& x) const {
    Mat2 J;
    for (int k = 0; k < cfg_.body_count(); ++k) {
        for (int j = 1; j <= 3; ++j) {
            const double pk = p[3 * k + j - 1];
            if (pk != 0.0) J += kirchhoff(k, j).gradient_jacobian(x) * pk;
        }
        if (gamma[k] != 0.0)
            J += perp_rows(circulation_stream(k).field.hessian(x)) * gamma[k];
    }
    J += biot_savart_jacobian(x);
    return J;
}

const Eigen::MatrixXd& PotentialBundle::added_mass() const {
    if (!added_) {
        const int n = cfg_.body_count();
        Eigen::MatrixXd M(3 * n, 3 * n);
        for (int k = 0; k < n; ++k) {
            for (int i = 1; i <= 3; ++i) {
                for (int kp = 0; kp < n; ++kp) {
                    const BoundaryGrid& g = dom_->body(kp);
                    const std::vector<double>& tr = kirchhoff_trace(k, i, dom_->comp_of_body(kp));
                    for (int ip = 1; ip <= 3; ++ip) {
                        double s = 0.0;
                        for (int q = 0; q < g.size(); ++q)
                            s += g.w[q] * tr[q] * xi_normal_trace(ip, g, q);
                        M(3 * k + i - 1, 3 * kp + ip - 1) = s;
                    }
                }
            }
        }
        added_ = std::move(M);
    }
    return *added_;
}

std::vector<double> PotentialBundle::shape_derivative_data(int lam, int ell, int mu, int m) const {
    const BoundaryGrid& g = dom_->body(mu);
    const int comp = dom_->comp_of_body(mu);
    const std::vector<double>& tr = kirchhoff_trace(lam, ell, comp);
    const std::vector<double> dtau = tangential_derivative(g, tr);
    std::vector<double> data(g.size());
    for (int i = 0; i < g.size(); ++i) {
        double v = dtau[i];
        if (lam == mu) v -= g.tau[i].dot(xi_field(ell, g.x[i], g.center));
        v *= xi_normal_trace(m, g, i);
        if (lam == mu && ell >= 3 && m <= 2) {
            const Vec2 e = (m == 1) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
            v += xi_field(ell, g.x[i], g.center).perp().dot(e);
        }
        data[i] = v;
    }
    return data;
}

NeumannField PotentialBundle::shape_derivative_kirchhoff(int lam, int ell, int mu, int m) const {
    BoundaryData d = dom_->zero_data();
    const std::vector<double> data = shape_derivative_data(lam, ell, mu, m);
    for (int i = 0; i < dom_->body(mu).size(); ++i) d.body[mu][i] = data[i];
    return NeumannField(solver_->solve_modified(d));
}

Vec2 conformal_center(const BodyShape& shape, double eps, const Pose& pose, int panels) {
    StandaloneBodyPotentials sb(shape, eps, pose, panels);
    return sb.conformal_center();
}

// ---------------------------------------------------------------------------
// PhantomVelocity

PhantomVelocity::PhantomVelocity(const Configuration& cfg, int kappa, const VorticityField& omega,
                                 const Eigen::VectorXd& p_full, const std::vector<double>& gamma,
                                 int panel_override)
    : kappa_(kappa), gamma_kappa_(gamma[kappa]) {
    Configuration reduced = cfg.without_body(kappa);
    bundle_ = std::make_unique<PotentialBundle>(reduced, omega, panel_override);
    const auto& b = cfg.bodies[kappa];
    own_ = std::make_unique<StandaloneBodyPotentials>(
        b.shape, b.eps, b.pose,
        panel_override > 0 ? panel_override : b.shape.panel_count());

    // psi^{r, not kappa}: Dirichlet data -psi_hat_kappa on every remaining
    // component, zero fluxes
    const MultiDomain& dom = bundle_->domain();
    BoundaryData d = dom.zero_data();
    for (int i = 0; i < d.outer.size(); ++i) d.outer[i] = -own_->psi_value(dom.outer().x[i]);
    for (int k = 0; k < dom.body_count(); ++k) {
        const BoundaryGrid& g = dom.body(k);
        for (int i = 0; i < g.size(); ++i) d.body[k][i] = -own_->psi_value(g.x[i]);
    }
    psi_r_nok_ = bundle_->solver().solve_modified(d);

    p_reduced_.resize(3 * reduced.body_count());
    gamma_reduced_.resize(reduced.body_count());
    int out = 0;
    for (int k = 0; k < cfg.body_count(); ++k) {
        if (k == kappa) continue;
        p_reduced_.segment(3 * out, 3) = p_full.segment(3 * k, 3);
        gamma_reduced_[out] = gamma[k];
        ++out;
    }
}

Vec2 PhantomVelocity::value(const Vec2& x) const {
    Vec2 u = bundle_->velocity(p_reduced_, gamma_reduced_, x);
    u += gamma_kappa_ * psi_r_nok_.field.gradient(x).perp();
    return u;
}

Mat2 PhantomVelocity::jacobian(const Vec2& x) const {
    Mat2 J = bundle_->velocity_jacobian(p_reduced_, gamma_reduced_, x);
    J += perp_rows(psi_r_nok_.field.hessian(x)) * gamma_kappa_;
    return J;
}

}  // namespace vb
