#include "vortexbodies/laplace.hpp"

#include <cmath>
#include <complex>

#include "vortexbodies/fft.hpp"

namespace vb {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Double-layer kernel pieces with d = y - x (y source node, x target).
inline double dl_value(const Vec2& n, const Vec2& d) { return n.dot(d) / d.norm2(); }

inline Vec2 dl_gradient(const Vec2& n, const Vec2& d) {
    const double r2 = d.norm2();
    return (d * (2.0 * n.dot(d) / r2) - n) / r2;
}

inline Mat2 dl_hessian(const Vec2& n, const Vec2& d) {
    const double r2 = d.norm2();
    const double r4 = r2 * r2;
    const double nd = n.dot(d);
    Mat2 h = outer(n, d) + outer(d, n);
    h = h * (-2.0 / r4);
    h.a += -2.0 * nd / r4 + 8.0 * nd * d.x * d.x / (r4 * r2);
    h.d += -2.0 * nd / r4 + 8.0 * nd * d.y * d.y / (r4 * r2);
    h.b += 8.0 * nd * d.x * d.y / (r4 * r2);
    h.c += 8.0 * nd * d.x * d.y / (r4 * r2);
    return h;
}

// Kernel of the harmonic conjugate of the double layer (log sources excluded):
// the per-component orientation sign folds into n^perp.
inline double conj_kernel(const Vec2& n, const Vec2& d) { return -n.perp().dot(d) / d.norm2(); }

}  // namespace

// ---------------------------------------------------------------------------
// BoundaryData

double BoundaryData::sup_norm() const {
    double m = 0.0;
    for (int i = 0; i < outer.size(); ++i) m = std::max(m, std::abs(outer[i]));
    for (const auto& v : body)
        for (int i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

BoundaryData& BoundaryData::operator+=(const BoundaryData& r) {
    if (r.outer.size()) outer += r.outer;
    for (std::size_t k = 0; k < body.size(); ++k)
        if (r.body[k].size()) body[k] += r.body[k];
    return *this;
}

BoundaryData& BoundaryData::operator-=(const BoundaryData& r) {
    if (r.outer.size()) outer -= r.outer;
    for (std::size_t k = 0; k < body.size(); ++k)
        if (r.body[k].size()) body[k] -= r.body[k];
    return *this;
}

BoundaryData BoundaryData::operator+(const BoundaryData& r) const {
    BoundaryData out = *this;
    out += r;
    return out;
}

BoundaryData BoundaryData::operator-(const BoundaryData& r) const {
    BoundaryData out = *this;
    out -= r;
    return out;
}

// ---------------------------------------------------------------------------
// MultiDomain

MultiDomain::MultiDomain(std::optional<BoundaryGrid> outer, std::vector<BoundaryGrid> bodies)
    : outer_(std::move(outer)), bodies_(std::move(bodies)) {
    if (outer_) comps_.push_back(&*outer_);
    for (auto& b : bodies_) comps_.push_back(&b);
    offsets_.resize(comps_.size());
    total_ = 0;
    for (std::size_t c = 0; c < comps_.size(); ++c) {
        offsets_[c] = total_;
        total_ += comps_[c]->size();
        if (!is_pow2(std::size_t(comps_[c]->size())))
            throw InvalidParameterError("domain: panel counts must be powers of two");
    }
    remainders_.resize(comps_.size());
}

BoundaryData MultiDomain::zero_data() const {
    BoundaryData d;
    if (outer_) d.outer = Eigen::VectorXd::Zero(outer_->size());
    d.body.resize(bodies_.size());
    for (std::size_t k = 0; k < bodies_.size(); ++k)
        d.body[k] = Eigen::VectorXd::Zero(bodies_[k].size());
    return d;
}

const Eigen::MatrixXd& MultiDomain::log_remainder(int c) const {
    if (!remainders_[c]) {
        const BoundaryGrid& g = comp(c);
        const int m = g.size();
        auto R = std::make_unique<Eigen::MatrixXd>(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                if (i == j) {
                    (*R)(i, j) = std::log(g.speed[i]);
                } else {
                    const double dt = kTwoPi * double(j - i) / m;
                    const double denom = std::abs(2.0 * std::sin(0.5 * dt));
                    (*R)(i, j) = std::log((g.x[j] - g.x[i]).norm() / denom);
                }
            }
        }
        remainders_[c] = std::move(R);
    }
    return *remainders_[c];
}

std::shared_ptr<const MultiDomain> make_domain(const Configuration& cfg, int panel_override) {
    std::vector<BoundaryGrid> bodies;
    bodies.reserve(cfg.bodies.size());
    for (int k = 0; k < cfg.body_count(); ++k) bodies.push_back(cfg.body_grid(k, panel_override));
    return std::make_shared<const MultiDomain>(cfg.outer_grid(panel_override), std::move(bodies));
}

std::shared_ptr<const MultiDomain> make_domain(std::optional<BoundaryGrid> outer,
                                               std::vector<BoundaryGrid> bodies) {
    return std::make_shared<const MultiDomain>(std::move(outer), std::move(bodies));
}

// ---------------------------------------------------------------------------
// HarmonicField

HarmonicField::HarmonicField(std::shared_ptr<const MultiDomain> dom, Eigen::VectorXd mu,
                             std::vector<double> logs)
    : dom_(std::move(dom)), mu_(std::move(mu)), logs_(std::move(logs)) {}

double HarmonicField::value(const Vec2& x) const {
    double v = 0.0;
    for (int c = 0; c < dom_->comp_count(); ++c) {
        const BoundaryGrid& g = dom_->comp(c);
        const int off = dom_->offset(c);
        for (int q = 0; q < g.size(); ++q) {
            v += g.w[q] * mu_[off + q] * dl_value(g.n[q], g.x[q] - x);
        }
    }
    v /= kTwoPi;
    for (int k = 0; k < int(logs_.size()); ++k) {
        if (logs_[k] != 0.0) v += logs_[k] * std::log((x - dom_->body(k).center).norm());
    }
    return v;
}

Vec2 HarmonicField::gradient(const Vec2& x) const {
    Vec2 v{0.0, 0.0};
    for (int c = 0; c < dom_->comp_count(); ++c) {
        const BoundaryGrid& g = dom_->comp(c);
        const int off = dom_->offset(c);
        for (int q = 0; q < g.size(); ++q) {
            v += g.w[q] * mu_[off + q] * dl_gradient(g.n[q], g.x[q] - x);
        }
    }
    v *= 1.0 / kTwoPi;
    for (int k = 0; k < int(logs_.size()); ++k) {
        if (logs_[k] != 0.0) {
            const Vec2 e = x - dom_->body(k).center;
            v += e * (logs_[k] / e.norm2());
        }
    }
    return v;
}

Mat2 HarmonicField::hessian(const Vec2& x) const {
    Mat2 h;
    for (int c = 0; c < dom_->comp_count(); ++c) {
        const BoundaryGrid& g = dom_->comp(c);
        const int off = dom_->offset(c);
        for (int q = 0; q < g.size(); ++q) {
            h += dl_hessian(g.n[q], g.x[q] - x) * (g.w[q] * mu_[off + q]);
        }
    }
    h = h * (1.0 / kTwoPi);
    for (int k = 0; k < int(logs_.size()); ++k) {
        if (logs_[k] != 0.0) {
            const Vec2 e = x - dom_->body(k).center;
            const double r2 = e.norm2();
            Mat2 lh{1.0 / r2 - 2.0 * e.x * e.x / (r2 * r2), -2.0 * e.x * e.y / (r2 * r2),
                    -2.0 * e.x * e.y / (r2 * r2), 1.0 / r2 - 2.0 * e.y * e.y / (r2 * r2)};
            h += lh * logs_[k];
        }
    }
    return h;
}

double HarmonicField::flux(int body) const { return -kTwoPi * logs_[body]; }

std::vector<double> HarmonicField::conj_trace(int c) const {
    const BoundaryGrid& g = dom_->comp(c);
    const int m = g.size();
    const int off = dom_->offset(c);
    const double sign = g.is_body ? -1.0 : 1.0;

    std::vector<double> mu(m);
    for (int i = 0; i < m; ++i) mu[i] = mu_[off + i];

    // Singular self part: -(i/2) sgn multiplier on mu plus the smooth log
    // remainder against mu'.
    std::vector<double> out = conjugation_multiplier(mu);
    const std::vector<double> dmu = spectral_derivative(mu);
    const Eigen::MatrixXd& R = dom_->log_remainder(c);
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += R(i, j) * dmu[j];
        out[i] = sign * (out[i] + s / m);
    }

    // Smooth cross-component contributions.
    for (int c2 = 0; c2 < dom_->comp_count(); ++c2) {
        if (c2 == c) continue;
        const BoundaryGrid& g2 = dom_->comp(c2);
        const int off2 = dom_->offset(c2);
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            for (int q = 0; q < g2.size(); ++q) {
                s += g2.w[q] * mu_[off2 + q] * conj_kernel(g2.n[q], g2.x[q] - g.x[i]);
            }
            out[i] += s / kTwoPi;
        }
    }
    return out;
}

double HarmonicField::conj_value(const Vec2& x) const {
    double v = 0.0;
    for (int c = 0; c < dom_->comp_count(); ++c) {
        const BoundaryGrid& g = dom_->comp(c);
        const int off = dom_->offset(c);
        for (int q = 0; q < g.size(); ++q) {
            v += g.w[q] * mu_[off + q] * conj_kernel(g.n[q], g.x[q] - x);
        }
    }
    return v / kTwoPi;
}

std::vector<double> HarmonicField::normal_derivative(int c) const {
    const BoundaryGrid& g = dom_->comp(c);
    const int m = g.size();
    const double sign = g.is_body ? -1.0 : 1.0;

    const std::vector<double> conj = conj_trace(c);
    std::vector<double> dconj = spectral_derivative(conj);
    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) {
        out[i] = sign * dconj[i] / g.speed[i];
        for (int k = 0; k < int(logs_.size()); ++k) {
            if (logs_[k] != 0.0) {
                const Vec2 e = g.x[i] - dom_->body(k).center;
                out[i] += logs_[k] * g.n[i].dot(e) / e.norm2();
            }
        }
    }
    return out;
}

std::vector<double> HarmonicField::dirichlet_trace(int c) const {
    const BoundaryGrid& g = dom_->comp(c);
    const int off = dom_->offset(c);
    std::vector<double> out(g.size());
    for (int i = 0; i < g.size(); ++i) {
        double v = 0.5 * mu_[off + i];
        for (int c2 = 0; c2 < dom_->comp_count(); ++c2) {
            const BoundaryGrid& g2 = dom_->comp(c2);
            const int off2 = dom_->offset(c2);
            for (int q = 0; q < g2.size(); ++q) {
                const double k = (c2 == c && q == i)
                                     ? g2.curv_diag[q]
                                     : dl_value(g2.n[q], g2.x[q] - g.x[i]);
                v += g2.w[q] * mu_[off2 + q] * k / kTwoPi;
            }
        }
        for (int b = 0; b < int(logs_.size()); ++b) {
            if (logs_[b] != 0.0) v += logs_[b] * std::log((g.x[i] - dom_->body(b).center).norm());
        }
        out[i] = v;
    }
    return out;
}

HarmonicField& HarmonicField::axpy(double a, const HarmonicField& other) {
    mu_ += a * other.mu_;
    for (std::size_t k = 0; k < logs_.size(); ++k) logs_[k] += a * other.logs_[k];
    return *this;
}

// ---------------------------------------------------------------------------
// DomainSolver

DomainSolver::DomainSolver(std::shared_ptr<const MultiDomain> dom) : dom_(std::move(dom)) {
    const int t = dom_->total_nodes();
    const int nb = dom_->body_count();
    const int n = t + nb;
    A_ = Eigen::MatrixXd::Zero(n, n);

    for (int cp = 0; cp < dom_->comp_count(); ++cp) {
        const BoundaryGrid& gp = dom_->comp(cp);
        const int offp = dom_->offset(cp);
        for (int p = 0; p < gp.size(); ++p) {
            const int row = offp + p;
            A_(row, row) += 0.5;
            for (int cq = 0; cq < dom_->comp_count(); ++cq) {
                const BoundaryGrid& gq = dom_->comp(cq);
                const int offq = dom_->offset(cq);
                for (int q = 0; q < gq.size(); ++q) {
                    const double k = (cp == cq && p == q)
                                         ? gq.curv_diag[q]
                                         : dl_value(gq.n[q], gq.x[q] - gp.x[p]);
                    A_(row, offq + q) += gq.w[q] * k / kTwoPi;
                }
            }
            for (int b = 0; b < nb; ++b) {
                A_(row, t + b) = std::log((gp.x[p] - dom_->body(b).center).norm());
            }
        }
    }
    for (int b = 0; b < nb; ++b) {
        // side condition: mean of the density over the component vanishes
        // (scaled as a mean to keep the bordered system equilibrated)
        const int c = dom_->comp_of_body(b);
        const BoundaryGrid& g = dom_->body(b);
        const int off = dom_->offset(c);
        const double per = g.perimeter();
        for (int q = 0; q < g.size(); ++q) A_(t + b, off + q) = g.w[q] / per;
    }
    lu_.compute(A_);

    // Basis fields (data 1 on one body) and their flux map close the
    // zero-flux / prescribed-flux solves.
    if (nb > 0) {
        basis_.reserve(nb);
        flux_map_ = Eigen::MatrixXd::Zero(nb, nb);
        for (int k = 0; k < nb; ++k) {
            BoundaryData d = dom_->zero_data();
            d.body[k].setOnes();
            basis_.push_back(solve_plain(d));
            for (int v = 0; v < nb; ++v) flux_map_(v, k) = basis_[k].flux(v);
        }
        flux_lu_.compute(flux_map_);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(flux_map_);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > 1e12) {
            throw SolverFailureError("flux map of the constant basis is numerically singular",
                                     sv(0) / std::max(sv(sv.size() - 1), 1e-300));
        }
    }
}

Eigen::VectorXd DomainSolver::solve_system(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = lu_.solve(rhs);
    // one step of iterative refinement
    Eigen::VectorXd r = rhs - A_ * x;
    x += lu_.solve(r);
    const double scale = std::max(rhs.lpNorm<Eigen::Infinity>(), 1e-300);
    if (!((rhs - A_ * x).lpNorm<Eigen::Infinity>() < 1e-6 * scale)) {
        throw SolverFailureError("collocation system did not solve to tolerance (singular geometry?)",
                                 condition_estimate());
    }
    return x;
}

HarmonicField DomainSolver::solve_plain(const BoundaryData& data) const {
    const int t = dom_->total_nodes();
    const int nb = dom_->body_count();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(t + nb);
    if (dom_->has_outer()) {
        if (data.outer.size() != dom_->outer().size())
            throw InvalidParameterError("solve: outer data size mismatch");
        rhs.segment(dom_->offset(0), dom_->outer().size()) = data.outer;
    }
    for (int k = 0; k < nb; ++k) {
        if (int(data.body.size()) <= k || data.body[k].size() != dom_->body(k).size())
            throw InvalidParameterError("solve: body data size mismatch");
        rhs.segment(dom_->offset(dom_->comp_of_body(k)), dom_->body(k).size()) = data.body[k];
    }
    const Eigen::VectorXd x = solve_system(rhs);
    std::vector<double> logs(nb);
    for (int k = 0; k < nb; ++k) logs[k] = x[t + k];
    return HarmonicField(dom_, x.head(t), logs);
}

ModifiedDirichletSolution DomainSolver::solve_with_fluxes(const BoundaryData& data,
                                                          const std::vector<double>& fluxes) const {
    const int nb = dom_->body_count();
    ModifiedDirichletSolution sol;
    sol.field = solve_plain(data);
    sol.constants.assign(nb, 0.0);
    if (nb == 0) return sol;
    Eigen::VectorXd defect(nb);
    for (int v = 0; v < nb; ++v) defect[v] = fluxes[v] - sol.field.flux(v);
    const Eigen::VectorXd rho = flux_lu_.solve(defect);
    for (int k = 0; k < nb; ++k) {
        sol.field.axpy(rho[k], basis_[k]);
        sol.constants[k] = rho[k];
    }
    return sol;
}

ModifiedDirichletSolution DomainSolver::solve_modified(const BoundaryData& data) const {
    return solve_with_fluxes(data, std::vector<double>(dom_->body_count(), 0.0));
}

const HarmonicField& DomainSolver::basis_field(int k) const { return basis_[k]; }

double DomainSolver::condition_estimate() const {
    // 2-norm condition estimate by power iteration on A^T A and on the
    // inverse through the stored factorizations; diagnostic only.
    const int n = int(A_.rows());
    Eigen::PartialPivLU<Eigen::MatrixXd> luT(A_.transpose());
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0).normalized();
    double smax = 0.0;
    for (int it = 0; it < 12; ++it) {
        v = A_.transpose() * (A_ * v);
        smax = std::sqrt(v.norm());
        v.normalize();
    }
    Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(n, 2.0, 1.0).normalized();
    double inv_norm = 0.0;
    for (int it = 0; it < 12; ++it) {
        w = luT.solve(lu_.solve(w));
        inv_norm = std::sqrt(w.norm());
        w.normalize();
    }
    return smax * inv_norm;
}

// ---------------------------------------------------------------------------
// Interior Dirichlet on one curve

HarmonicField solve_interior_dirichlet(const BoundaryGrid& curve, const std::vector<double>& data) {
    BoundaryGrid g = curve;
    if (g.is_body) {
        // interior problem: flip the frame so normals point out of the curve
        g.is_body = false;
        for (int i = 0; i < g.size(); ++i) {
            g.n[i] = -g.n[i];
            g.curv_diag[i] = -g.curv_diag[i];
        }
    }
    auto dom = make_domain(std::move(g), {});
    DomainSolver solver(dom);
    BoundaryData d = dom->zero_data();
    if (int(data.size()) != dom->outer().size())
        throw InvalidParameterError("interior dirichlet: data size mismatch");
    for (int i = 0; i < d.outer.size(); ++i) d.outer[i] = data[i];
    return solver.solve_plain(d);
}

// ---------------------------------------------------------------------------
// Exterior standalone solver (inversion about the body centre)

namespace {

// Image of the body curve under w = s/(z - h), parameter-reversed so the image
// is positively oriented around w = 0.
BoundaryGrid image_grid(const BodyShape& shape, double eps, const Pose& q, double s, int m) {
    using C = std::complex<double>;
    const C rot = std::exp(C(0.0, q.theta));
    BoundaryGrid g;
    g.is_body = false;
    g.center = {0.0, 0.0};
    g.scale = 1.0;
    g.x.resize(m);
    g.tau.resize(m);
    g.n.resize(m);
    g.w.resize(m);
    g.speed.resize(m);
    g.curv_diag.resize(m);
    for (int i = 0; i < m; ++i) {
        const double u = kTwoPi - kTwoPi * i / m;  // reversed parameter
        const Vec2 p0 = shape.point(u), d10 = shape.derivative(u), d20 = shape.derivative2(u);
        const C Z = eps * rot * C(p0.x, p0.y);
        const C Zp = eps * rot * C(d10.x, d10.y);
        const C Zpp = eps * rot * C(d20.x, d20.y);
        const C W = s / Z;
        const C Wp = s * Zp / (Z * Z);
        const C Wpp = s * (2.0 * Zp * Zp - Zpp * Z) / (Z * Z * Z);
        g.x[i] = {W.real(), W.imag()};
        const Vec2 d1{Wp.real(), Wp.imag()};
        const Vec2 d2{Wpp.real(), Wpp.imag()};
        const double sp = d1.norm();
        g.speed[i] = sp;
        g.tau[i] = d1 / sp;
        g.n[i] = {g.tau[i].y, -g.tau[i].x};
        g.w[i] = (kTwoPi / m) * sp;
        g.curv_diag[i] = -g.n[i].dot(d2) / (2.0 * sp * sp);
    }
    return g;
}

}  // namespace

ExteriorSolver::ExteriorSolver(const BodyShape& shape, double eps, const Pose& pose, int panels)
    : body_(place_body(shape, eps, pose, panels)), h_(pose.h) {
    const int m = body_.size();
    s_ = eps * shape.circumradius();
    image_dom_ = make_domain(image_grid(shape, eps, pose, s_, m), {});
    image_solver_ = std::make_unique<DomainSolver>(image_dom_);
    map_.resize(m);
    for (int i = 0; i < m; ++i) map_[i] = (m - i) % m;
}

ExteriorField ExteriorSolver::solve(const std::vector<double>& data) const {
    const int m = body_.size();
    if (int(data.size()) != m) throw InvalidParameterError("exterior solve: data size mismatch");
    BoundaryData d = image_dom_->zero_data();
    for (int i = 0; i < m; ++i) d.outer[i] = data[map_[i]];
    HarmonicField theta = image_solver_->solve_plain(d);
    const double theta0 = theta.value({0.0, 0.0});
    return ExteriorField(std::move(theta), h_, s_, theta0, map_);
}

ExteriorField::ExteriorField(HarmonicField theta, Vec2 h, double inv_scale, double theta_at_zero,
                             std::vector<int> node_map)
    : theta_(std::move(theta)), h_(h), s_(inv_scale), c_hat_(-theta_at_zero), map_(std::move(node_map)) {}

double ExteriorField::value(const Vec2& x) const {
    using C = std::complex<double>;
    const C z(x.x - h_.x, x.y - h_.y);
    const C w = s_ / z;
    return theta_.value({w.real(), w.imag()}) + c_hat_;
}

Vec2 ExteriorField::gradient(const Vec2& x) const {
    using C = std::complex<double>;
    const C z(x.x - h_.x, x.y - h_.y);
    const C w = s_ / z;
    const Vec2 gt = theta_.gradient({w.real(), w.imag()});
    const C gtheta(gt.x, -gt.y);          // complex gradient of theta
    const C phi_p = -s_ / (z * z);        // w'(z)
    const C g = gtheta * phi_p;
    return {g.real(), -g.imag()};
}

Mat2 ExteriorField::hessian(const Vec2& x) const {
    using C = std::complex<double>;
    const C z(x.x - h_.x, x.y - h_.y);
    const C w = s_ / z;
    const Vec2 wv{w.real(), w.imag()};
    const Vec2 gt = theta_.gradient(wv);
    const Mat2 ht = theta_.hessian(wv);
    const C gtheta(gt.x, -gt.y);
    const C htheta(ht.a, -ht.b);          // Phi''(w) for harmonic theta
    const C phi_p = -s_ / (z * z);
    const C phi_pp = 2.0 * s_ / (z * z * z);
    const C H = htheta * phi_p * phi_p + gtheta * phi_pp;
    return {H.real(), -H.imag(), -H.imag(), -H.real()};
}

double ExteriorField::conj_value(const Vec2& x) const {
    using C = std::complex<double>;
    const C z(x.x - h_.x, x.y - h_.y);
    const C w = s_ / z;
    return theta_.conj_value({w.real(), w.imag()});
}

std::vector<double> ExteriorField::boundary_conj_values() const {
    const std::vector<double> ct = theta_.conj_trace(0);
    std::vector<double> out(ct.size());
    for (std::size_t i = 0; i < ct.size(); ++i) out[map_[i]] = ct[i];
    return out;
}

std::vector<double> ExteriorField::boundary_normal_derivative(const BoundaryGrid& body) const {
    using C = std::complex<double>;
    const BoundaryGrid& img = theta_.domain().comp(0);
    const int m = img.size();

    // Boundary gradient of theta in the image plane from its trace and the
    // trace of its conjugate.
    const std::vector<double> trace = theta_.dirichlet_trace(0);
    const std::vector<double> conj = theta_.conj_trace(0);
    const std::vector<double> dtr = spectral_derivative(trace);
    const std::vector<double> dcj = spectral_derivative(conj);

    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) {
        const double dtau = dtr[i] / img.speed[i];
        const double dn = dcj[i] / img.speed[i];  // outer-type component: dn = +d(conj)/ds
        const Vec2 grad_theta = img.tau[i] * dtau + img.n[i] * dn;
        const C gtheta(grad_theta.x, -grad_theta.y);
        const int bi = map_[i];
        const C z(body.x[bi].x - h_.x, body.x[bi].y - h_.y);
        const C phi_p = -s_ / (z * z);
        const C g = gtheta * phi_p;
        const Vec2 grad_f{g.real(), -g.imag()};
        out[bi] = body.n[bi].dot(grad_f);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Neumann through conjugation

std::vector<double> tangential_primitive(const BoundaryGrid& g, const std::vector<double>& beta) {
    const int m = g.size();
    double mean = 0.0;
    std::vector<double> f(m);
    for (int i = 0; i < m; ++i) {
        f[i] = beta[i] * g.speed[i];
        mean += beta[i] * g.w[i];
    }
    const double scale = g.perimeter();
    if (std::abs(mean) > 1e-9 * std::max(1.0, scale)) {
        throw InvalidParameterError("neumann data must have zero mean flux on the component");
    }
    // remove the tiny residual mean so the antiderivative stays periodic
    double pm = 0.0;
    for (double v : f) pm += v;
    pm /= m;
    for (double& v : f) v -= pm;
    return spectral_antiderivative(f);
}

NeumannField neumann_from_tangential(const DomainSolver& solver, int body,
                                     const std::vector<double>& beta) {
    const MultiDomain& dom = solver.domain();
    BoundaryData data = dom.zero_data();
    const std::vector<double> prim = tangential_primitive(dom.body(body), beta);
    for (int i = 0; i < dom.body(body).size(); ++i) data.body[body][i] = prim[i];
    return NeumannField(solver.solve_modified(data));
}

double flux_through(const HarmonicField& f, const BoundaryGrid& contour) {
    double s = 0.0;
    for (int i = 0; i < contour.size(); ++i) {
        s += contour.w[i] * f.gradient(contour.x[i]).dot(contour.n[i]);
    }
    return s;
}

}  // namespace vb
