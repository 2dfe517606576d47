#include "sieve/noncon.hpp"

#include <algorithm>
#include <cmath>

#include "sieve/error.hpp"
#include "sieve/fem.hpp"

namespace sieve {

ZetaResult zeta(const Mesh& mesh, const EigOptions& opts) {
    ZetaResult r;
    if (mesh.region_area(is_passage_tag) <= 0.0) {
        r.field.assign(mesh.num_nodes(), 0.0);
        return r;
    }
    FemSystem sys = assemble(mesh);
    CsrMatrix A = sys.K.combine(1.0, sys.M, 1.0);
    CsrMatrix B = assemble_mass(mesh, is_passage_tag);
    DofMap dm = mesh.periodic_pairs.empty() ? DofMap::identity(mesh.num_nodes()) : DofMap::periodic(mesh);
    if (!dm.trivial()) {
        A = dm.condense(A);
        B = dm.condense(B);
    }
    EigenResult e = eig_largest(A, B, 1, opts);
    r.zeta = std::sqrt(std::clamp(e.values.at(0), 0.0, 1.0));
    r.residual = e.residuals.at(0);
    r.field = dm.trivial() ? e.vectors.at(0) : dm.expand(e.vectors.at(0));
    return r;
}

double passage_quotient(const Mesh& mesh, const std::vector<double>& v) {
    if (v.size() != mesh.num_nodes()) fail(ErrorKind::MeshMismatch, "field length differs from the node count");
    FemSystem sys = assemble(mesh);
    const double h1 = sys.K.quadratic_form(v) + sys.M.quadratic_form(v);
    if (!(h1 > 0.0)) return 0.0;
    return std::sqrt(assemble_mass(mesh, is_passage_tag).quadratic_form(v) / h1);
}

WitnessKind parse_witness(const std::string& name) {
    if (name == "bridge") return WitnessKind::Bridge;
    if (name == "bump") return WitnessKind::Bump;
    fail(ErrorKind::ConfigError, "unknown witness '" + name + "' (bridge, bump)");
}

double WitnessNorms::quotient() const {
    const double h1 = l2_sq + grad_sq;
    return h1 > 0.0 ? std::sqrt(l2_sq / h1) : 0.0;
}

WitnessNorms witness_closed_form(WitnessKind kind, double eps, double alpha, double xi) {
    if (!(eps > 0.0) || !(alpha > 0.0)) fail(ErrorKind::NonPositiveData, "eps and alpha must be positive");
    WitnessNorms w;
    if (kind == WitnessKind::Bridge) {
        w.l2_sq = 4.0 * eps * eps / 9.0 + 8.0 * std::pow(eps, 4.0 + alpha) / 9.0;
        w.grad_sq = 6.0 * std::pow(eps, 2.0 + alpha);
    } else {
        const double x = xi > 0.0 ? xi : 0.5 * eps;
        w.l2_sq = x * x + std::pow(x, 4.0 + alpha) / 3.0;
        w.grad_sq = std::pow(x, 2.0 + alpha);
    }
    return w;
}

ValidatedSpec witness_spec(WitnessKind kind, double eps, double alpha, double xi, double W, double L) {
    SieveSpec s;
    s.n = 2;
    s.eps = eps;
    s.W = W;
    s.L = L;
    s.lateral = Lateral::Neumann;
    Passage p;
    p.center = 0.0;
    p.rho = 0.4 * W;
    if (kind == WitnessKind::Bridge) {
        p.shape = PassageShape::bridge(alpha);
    } else {
        // Straight part as wide as the bridge neck would be; the bump carries the witness.
        p.shape = PassageShape::bump(0.25 * eps, alpha, xi);
    }
    s.passages.push_back(p);
    return validate_spec(s);
}

std::vector<double> witness_field(const Mesh& mesh, const ValidatedSpec& spec) {
    if (spec->passages.size() != 1) fail(ErrorKind::UnsupportedShape, "witness needs a single passage");
    const Passage& p = spec->passages.front();
    const double eps = spec->eps;
    std::vector<char> in_passage(mesh.num_nodes(), 0);
    for (std::size_t t = 0; t < mesh.num_tris(); ++t)
        if (is_passage_tag(mesh.region[t]))
            for (int v : mesh.tris[t]) in_passage[v] = 1;
    std::vector<double> v(mesh.num_nodes(), 0.0);
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
        if (!in_passage[i]) continue;
        const Vec2 x = mesh.nodes[i];
        if (p.shape.kind == ShapeKind::BumpedSquare) {
            const double y = std::abs(x.y);
            v[i] = y <= eps / 3.0 ? 1.0 : std::max(0.0, 1.5 / eps * (eps - y));
        } else if (p.shape.kind == ShapeKind::BumpedRect) {
            const double xi = p.shape.xi > 0.0 ? p.shape.xi : 0.5 * eps;
            v[i] = std::clamp((x.x - p.center - p.shape.d) / xi, 0.0, 1.0);
        } else {
            fail(ErrorKind::UnsupportedShape, "witness fields exist for bridge and bump passages only");
        }
    }
    return v;
}

WitnessResult witness_quotient(WitnessKind kind, double eps, double alpha, double xi, const DomainMeshOptions& mesh_opts,
                               bool with_zeta) {
    WitnessResult r;
    r.closed_form = witness_closed_form(kind, eps, alpha, xi).quotient();
    ValidatedSpec spec = witness_spec(kind, eps, alpha, xi);
    DomainMeshOptions mo = mesh_opts;
    mo.h = std::min(mo.h, 0.5 * eps);
    Mesh mesh = mesh_perforated(spec, mo);
    r.nodes = mesh.num_nodes();
    r.fem = passage_quotient(mesh, witness_field(mesh, spec));
    if (with_zeta) r.zeta = zeta(mesh).zeta;
    return r;
}

namespace {
struct ProfileStats {
    double sup = 0.0, inv_sup = 0.0, slope = 0.0;
};
ProfileStats stats(const Profile& f) {
    if (!(f.min_value() > 0.0)) fail(ErrorKind::DegenerateProfile, "profiles must be positive");
    return {f.max_value(), 1.0 / f.min_value(), f.max_slope()};
}
}  // namespace

CurvedBounds curved_bounds(const Profile& g, const Profile& h, double eps) {
    if (!(eps > 0.0)) fail(ErrorKind::NonPositiveData, "eps must be positive");
    ProfileStats sg = stats(g), sh = stats(h);
    const double d_plus = 0.5 * (g(eps) + h(eps));
    const double log_term = std::abs(std::log(d_plus));
    CurvedBounds b;
    b.G = eps * eps * sg.sup * sg.inv_sup * (1.0 + sg.slope * sg.slope) + eps * sg.sup * log_term;
    b.H = eps * eps * sh.sup * sh.inv_sup * (1.0 + sh.slope * sh.slope) + eps * sh.sup * log_term;
    return b;
}

CurvedBounds curved_bounds(const ValidatedSpec& spec) {
    const double eps = spec->eps;
    double g1 = 0.0, g2 = 0.0, h1 = 0.0, h2 = 0.0;
    for (const Passage& p : spec->passages) {
        Profile g, h;
        if (p.shape.kind == ShapeKind::VaryingWidth) {
            g = p.shape.g;
            h = p.shape.h;
        } else if (p.shape.kind == ShapeKind::Straight) {
            g = h = constant_profile(eps, p.shape.d);
        } else {
            fail(ErrorKind::UnsupportedShape, "curved bounds need straight or varying-width passages");
        }
        ProfileStats sg = stats(g), sh = stats(h);
        const double log_term = std::abs(std::log(0.5 * (g(eps) + h(eps))));
        g1 = std::max(g1, sg.sup * sg.inv_sup * (1.0 + sg.slope * sg.slope));
        g2 = std::max(g2, sg.sup * log_term);
        h1 = std::max(h1, sh.sup * sh.inv_sup * (1.0 + sh.slope * sh.slope));
        h2 = std::max(h2, sh.sup * log_term);
    }
    return {eps * eps * g1 + eps * g2, eps * eps * h1 + eps * h2};
}

}  // namespace sieve
