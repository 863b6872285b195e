#include "vortexbodies/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "vortexbodies/fft.hpp"

namespace vb {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& path) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ValidationError(path + "." + it.key(), "unknown key");
        }
    }
}

double number_at(const json& j, const std::string& key, const std::string& path,
                 std::optional<double> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ValidationError(path + "." + key, "missing required value");
    }
    if (!j[key].is_number()) throw ValidationError(path + "." + key, "expected a number");
    return j[key].get<double>();
}

Vec2 vec_at(const json& j, const std::string& key, const std::string& path,
            std::optional<Vec2> fallback = {}) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        throw ValidationError(path + "." + key, "missing required value");
    }
    const auto& v = j[key];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ValidationError(path + "." + key, "expected [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

BodyShape parse_shape(const json& j, const std::string& path) {
    if (!j.contains("kind")) throw ValidationError(path + ".kind", "missing required value");
    const std::string kind = j["kind"].get<std::string>();
    const int panels = int(number_at(j, "panels", path, 64.0));
    if (!is_pow2(std::size_t(panels)))
        throw ValidationError(path + ".panels", "panel count must be a power of two");
    if (kind == "ellipse") {
        reject_unknown(j, {"kind", "a", "b", "panels"}, path);
        const double a = number_at(j, "a", path);
        const double b = number_at(j, "b", path);
        if (a <= 0.0 || b <= 0.0) throw ValidationError(path, "semi-axes must be positive");
        return BodyShape::ellipse(a, b, panels);
    }
    if (kind == "fourier") {
        reject_unknown(j, {"kind", "coefficients", "panels"}, path);
        if (!j.contains("coefficients"))
            throw ValidationError(path + ".coefficients", "missing required value");
        std::vector<FourierCoeff> cs;
        int idx = 0;
        for (const auto& c : j["coefficients"]) {
            if (!c.is_array() || c.size() != 3)
                throw ValidationError(path + ".coefficients[" + std::to_string(idx) + "]",
                                      "expected [k, re, im]");
            cs.push_back({c[0].get<int>(), {c[1].get<double>(), c[2].get<double>()}});
            ++idx;
        }
        try {
            return BodyShape::fourier(cs, panels);
        } catch (const std::exception& e) {
            throw ValidationError(path, e.what());
        }
    }
    throw ValidationError(path + ".kind", "must be \"ellipse\" or \"fourier\"");
}

Family parse_family(const json& j, const std::string& path) {
    const std::string f = j.value("family", "i");
    if (f == "i") return Family::I;
    if (f == "ii") return Family::II;
    if (f == "iii") return Family::III;
    throw ValidationError(path + ".family", "must be \"i\", \"ii\" or \"iii\"");
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError("$", std::string("parse error: ") + e.what());
    }
    reject_unknown(j, {"spec_version", "domain", "delta", "bodies", "blobs", "numerics", "outputs"},
                   "$");

    Scenario sc;
    if (!j.contains("spec_version") || !j["spec_version"].is_number_integer() ||
        j["spec_version"].get<int>() != 1) {
        throw ValidationError("$.spec_version", "must be the integer 1");
    }

    // domain
    if (!j.contains("domain")) throw ValidationError("$.domain", "missing required value");
    const auto& dom = j["domain"];
    const std::string dkind = dom.value("kind", "");
    if (dkind == "disc") {
        reject_unknown(dom, {"kind", "radius", "center", "panels"}, "$.domain");
        const double R = number_at(dom, "radius", "$.domain");
        if (R <= 0.0) throw ValidationError("$.domain.radius", "must be positive");
        const Vec2 c = vec_at(dom, "center", "$.domain", Vec2{0.0, 0.0});
        const int panels = int(number_at(dom, "panels", "$.domain", 128.0));
        if (!is_pow2(std::size_t(panels)))
            throw ValidationError("$.domain.panels", "panel count must be a power of two");
        std::vector<FourierCoeff> cs = {{0, {c.x, c.y}}, {1, {R, 0.0}}};
        sc.cfg.outer = BodyShape::fourier(cs, panels);
    } else if (dkind == "fourier") {
        sc.cfg.outer = parse_shape(dom, "$.domain");
    } else {
        throw ValidationError("$.domain.kind", "must be \"disc\" or \"fourier\"");
    }
    sc.cfg.delta = number_at(j, "delta", "$", 0.1);

    // bodies
    int nb = 0;
    if (j.contains("bodies")) {
        for (const auto& jb : j["bodies"]) {
            const std::string path = "bodies[" + std::to_string(nb) + "]";
            reject_unknown(jb,
                           {"shape", "epsilon", "family", "mass", "inertia", "alpha", "gamma",
                            "position", "theta", "velocity"},
                           path);
            BodySpec b;
            if (!jb.contains("shape")) throw ValidationError(path + ".shape", "missing required value");
            b.shape = parse_shape(jb["shape"], path + ".shape");
            b.eps = number_at(jb, "epsilon", path, 1.0);
            if (!(b.eps > 0.0 && b.eps <= 1.0))
                throw ValidationError(path + ".epsilon", "must lie in (0, 1]");
            b.family = parse_family(jb, path);
            b.mass1 = number_at(jb, "mass", path, 1.0);
            b.inertia1 = number_at(jb, "inertia", path, 1.0);
            b.alpha = number_at(jb, "alpha", path, 2.0);
            b.gamma = number_at(jb, "gamma", path, 0.0);
            b.pose.h = vec_at(jb, "position", path);
            b.pose.theta = number_at(jb, "theta", path, 0.0);
            if (b.family == Family::I && b.eps != 1.0)
                throw ValidationError(path + ".epsilon", "family (i) bodies must have epsilon = 1");
            if (b.family == Family::III && b.gamma == 0.0)
                throw ValidationError(path + ".gamma",
                                      "family (iii) bodies need a nonzero circulation");
            if (b.family == Family::III && b.shape.is_disc())
                throw ValidationError(path + ".shape",
                                      "family (iii) bodies must not be discs (degenerate added mass)");
            sc.cfg.bodies.push_back(b);
            ++nb;
        }
    }
    sc.p0 = Eigen::VectorXd::Zero(3 * nb);
    sc.gamma.resize(nb);
    for (int k = 0; k < nb; ++k) {
        const auto& jb = j["bodies"][k];
        const std::string path = "bodies[" + std::to_string(k) + "]";
        sc.gamma[k] = sc.cfg.bodies[k].gamma;
        if (jb.contains("velocity")) {
            const auto& v = jb["velocity"];
            if (!v.is_array() || v.size() != 3)
                throw ValidationError(path + ".velocity", "expected [vx, vy, omega]");
            for (int i = 0; i < 3; ++i) sc.p0[3 * k + i] = v[i].get<double>();
        }
    }

    // blobs
    if (j.contains("blobs")) {
        int i = 0;
        for (const auto& jb : j["blobs"]) {
            const std::string path = "blobs[" + std::to_string(i) + "]";
            reject_unknown(jb, {"position", "strength"}, path);
            VortexBlob b;
            b.z = vec_at(jb, "position", path);
            b.gamma = number_at(jb, "strength", path);
            sc.vorticity.blobs.push_back(b);
            ++i;
        }
    }

    // numerics
    if (j.contains("numerics")) {
        const auto& jn = j["numerics"];
        reject_unknown(jn, {"panels", "dt", "t_end", "blob_core", "reflect_tol", "solver"},
                       "$.numerics");
        sc.numerics.panels = int(number_at(jn, "panels", "$.numerics", 0.0));
        if (sc.numerics.panels != 0 && !is_pow2(std::size_t(sc.numerics.panels)))
            throw ValidationError("$.numerics.panels", "panel override must be a power of two");
        sc.numerics.dt = number_at(jn, "dt", "$.numerics", 1e-3);
        if (sc.numerics.dt <= 0.0) throw ValidationError("$.numerics.dt", "must be positive");
        sc.numerics.t_end = number_at(jn, "t_end", "$.numerics", 1.0);
        sc.numerics.blob_core = number_at(jn, "blob_core", "$.numerics", 0.05);
        sc.numerics.reflect_tol = number_at(jn, "reflect_tol", "$.numerics", 1e-10);
        sc.numerics.solver = jn.value("solver", "direct");
        if (sc.numerics.solver != "direct" && sc.numerics.solver != "reflections")
            throw ValidationError("$.numerics.solver", "must be \"direct\" or \"reflections\"");
    }
    sc.vorticity.core = sc.numerics.blob_core;

    // outputs
    if (j.contains("outputs")) {
        const auto& jo = j["outputs"];
        reject_unknown(jo, {"dir", "stride"}, "$.outputs");
        sc.outputs.dir = jo.value("dir", "out");
        sc.outputs.stride = int(number_at(jo, "stride", "$.outputs", 10.0));
        if (sc.outputs.stride < 1) throw ValidationError("$.outputs.stride", "must be at least 1");
    }

    // global admissibility
    std::vector<Vec2> zs;
    for (const auto& b : sc.vorticity.blobs) zs.push_back(b.z);
    MarginReport rep = admissibility(sc.cfg, zs, sc.vorticity.core);
    if (!rep.admissible) {
        std::ostringstream os;
        os << "configuration is not admissible: margin " << rep.margin() << " <= 2 delta = "
           << 2.0 * sc.cfg.delta;
        throw ValidationError("$", os.str());
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("$", "cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

FullState Scenario::full_state() const {
    FullState s;
    s.cfg = cfg;
    s.p = p0;
    s.gamma = gamma;
    s.vorticity = vorticity;
    validate_for_dynamics(s.cfg);
    return s;
}

LimitState Scenario::limit_state() const {
    LimitState s;
    s.cfg.outer = cfg.outer;
    s.cfg.delta = cfg.delta;
    s.vorticity.blobs = vorticity.blobs;
    s.vorticity.core = vorticity.core;
    std::vector<double> pbig;
    for (int k = 0; k < cfg.body_count(); ++k) {
        const auto& b = cfg.bodies[k];
        if (b.family == Family::I) {
            s.cfg.bodies.push_back(b);
            s.gamma.push_back(gamma[k]);
            for (int i = 0; i < 3; ++i) pbig.push_back(p0[3 * k + i]);
        } else {
            PointVortexRec v;
            v.z = b.pose.h;
            v.gamma = gamma[k];
            v.family = b.family;
            v.mass1 = b.mass1;
            v.hdot = {p0[3 * k], p0[3 * k + 1]};
            s.vorticity.points.push_back(v);
        }
    }
    s.p = Eigen::VectorXd::Zero(int(pbig.size()));
    for (std::size_t i = 0; i < pbig.size(); ++i) s.p[int(i)] = pbig[i];
    return s;
}

}  // namespace vb
