#include "sieve/interface_form.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "sieve/clip.hpp"
#include "sieve/domain.hpp"
#include "sieve/error.hpp"
#include "sieve/fem.hpp"
#include "sieve/numerics.hpp"
#include "sieve/parallel.hpp"

namespace sieve {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Composite Gauss-Legendre rule on [a, b].
QuadratureRule composite_rule(double a, double b, int panels, int points) {
    QuadratureRule out;
    for (int p = 0; p < panels; ++p) {
        double lo = a + (b - a) * p / panels, hi = a + (b - a) * (p + 1) / panels;
        QuadratureRule r = gauss_legendre(points, lo, hi);
        out.x.insert(out.x.end(), r.x.begin(), r.x.end());
        out.w.insert(out.w.end(), r.w.begin(), r.w.end());
    }
    return out;
}

bool same_profile(const Profile& a, const Profile& b) { return a.knots == b.knots; }

bool same_cell(const Passage& a, const Passage& b) {
    const auto& s = a.shape;
    const auto& t = b.shape;
    return s.kind == t.kind && s.d == t.d && s.waist == t.waist && s.alpha == t.alpha && s.xi == t.xi &&
           same_profile(s.g, t.g) && same_profile(s.h, t.h) && a.rho == b.rho;
}
}  // namespace

TestPair kappa_test_pair(double W, double L) {
    if (!(W > 0.0) || !(L > 0.0)) fail(ErrorKind::NonPositiveData, "strip dimensions must be positive");
    const double a = kPi / W;
    TestPair p;
    p.g.value = [=](Vec2 x, int s) {
        double t = 1.0 - s * x.y / L;
        return s * (2.0 + std::cos(a * x.x)) * t * t;
    };
    p.g.gradient = [=](Vec2 x, int s) {
        double t = 1.0 - s * x.y / L;
        double c = 2.0 + std::cos(a * x.x);
        return Vec2{-s * a * std::sin(a * x.x) * t * t, -2.0 * c * t / L};
    };
    p.g.hessian = [=](Vec2 x, int s) {
        double t = 1.0 - s * x.y / L;
        double c = 2.0 + std::cos(a * x.x);
        return std::array<double, 3>{-s * a * a * std::cos(a * x.x) * t * t, 2.0 * a * std::sin(a * x.x) * t / L,
                                     2.0 * s * c / (L * L)};
    };
    p.h.value = [](Vec2, int s) { return static_cast<double>(s); };
    p.h.gradient = [](Vec2, int) { return Vec2{0.0, 0.0}; };
    p.h.hessian = [](Vec2, int) { return std::array<double, 3>{0.0, 0.0, 0.0}; };
    return p;
}

double strip_norm(const PiecewiseField& f, double W, double L, int order) {
    if (order < 0 || order > 2) fail(ErrorKind::NonPositiveData, "strip norm order must be 0, 1 or 2");
    if (!f.value || (order >= 1 && !f.gradient) || (order >= 2 && !f.hessian))
        fail(ErrorKind::NonPositiveData, "field lacks the derivatives needed for the requested norm");
    QuadratureRule qx = composite_rule(-W, W, 16, 8);
    double sum = 0.0;
    for (int s : {1, -1}) {
        QuadratureRule qy = s > 0 ? composite_rule(0.0, 0.5 * L, 8, 8) : composite_rule(-0.5 * L, 0.0, 8, 8);
        for (std::size_t i = 0; i < qx.x.size(); ++i)
            for (std::size_t j = 0; j < qy.x.size(); ++j) {
                Vec2 x{qx.x[i], qy.x[j]};
                double v = f.value(x, s);
                double e = v * v;
                if (order >= 1) {
                    Vec2 g = f.gradient(x, s);
                    e += g.x * g.x + g.y * g.y;
                }
                if (order >= 2) {
                    auto h = f.hessian(x, s);
                    e += h[0] * h[0] + 2.0 * h[1] * h[1] + h[2] * h[2];
                }
                sum += qx.w[i] * qy.w[j] * e;
            }
    }
    return std::sqrt(sum);
}

GuardMeans guard_means(const DomainPolygons& cells, const PiecewiseField& f) {
    GuardMeans m;
    for (const auto& c : cells.cells) {
        for (int s : {1, -1}) {
            const Polygon& poly = s > 0 ? c.guard_plus : c.guard_minus;
            const double signed_area = polygon_signed_area(poly);
            if (!(std::abs(signed_area) > 0.0)) fail(ErrorKind::EmptyRegion, "guard half-disk has zero area");
            // The quadrature follows the polygon orientation, so the ratio is orientation free.
            double mean = integrate_function(poly, [&](Vec2 x) { return f.value(x, s); }) / signed_area;
            (s > 0 ? m.plus : m.minus).push_back(mean);
        }
    }
    return m;
}

GuardMeans guard_means(const Mesh& mesh, const std::vector<double>& f, int passages) {
    GuardMeans m;
    for (int k = 0; k < passages; ++k) {
        m.plus.push_back(mean_over_region(mesh, f, region_tag(RegionKind::GuardPlus, k)));
        m.minus.push_back(mean_over_region(mesh, f, region_tag(RegionKind::GuardMinus, k)));
    }
    return m;
}

double form_lhs(const std::vector<double>& capacities, const GuardMeans& g, const GuardMeans& h) {
    const std::size_t n = g.plus.size();
    if (g.minus.size() != n || h.plus.size() != n || h.minus.size() != n)
        fail(ErrorKind::MeshMismatch, "regional means cover different numbers of passages");
    if (capacities.size() != n)
        fail(ErrorKind::MissingCapacity, "expected " + std::to_string(n) + " capacities, got " +
                                             std::to_string(capacities.size()));
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(capacities[k]) || capacities[k] < 0.0)
            fail(ErrorKind::MissingCapacity, "capacity of passage " + std::to_string(k) + " is not available");
        sum += capacities[k] * (g.plus[k] - g.minus[k]) * (h.plus[k] - h.minus[k]);
    }
    return sum;
}

double form_rhs(const std::function<double(double)>& mu, const PiecewiseField& g, const PiecewiseField& h, double W) {
    QuadratureRule q = composite_rule(-W, W, 32, 8);
    double s = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) {
        Vec2 x{q.x[i], 0.0};
        double jg = g.value(x, 1) - g.value(x, -1);
        double jh = h.value(x, 1) - h.value(x, -1);
        s += q.w[i] * mu(q.x[i]) * jg * jh;
    }
    return s;
}

double form_rhs(const Mesh& hom, const std::vector<double>& mu, const std::vector<double>& g,
                const std::vector<double>& h) {
    const std::size_t n = hom.num_nodes();
    if (mu.size() != n || g.size() != n || h.size() != n)
        fail(ErrorKind::MeshMismatch, "field length differs from the node count");
    std::vector<int> lower(n, -1);
    for (const auto& [up, lo] : hom.gamma_pairs) lower[up] = lo;
    QuadratureRule q = gauss_legendre(3, 0.0, 1.0);
    double s = 0.0;
    for (const auto& e : hom.edges_of(EdgeKind::Gamma)) {
        if (lower[e.a] < 0 || lower[e.b] < 0) fail(ErrorKind::MissingPair, "Gamma node without a lower partner");
        double len = norm(hom.nodes[e.b] - hom.nodes[e.a]);
        double ja = g[e.a] - g[lower[e.a]], jb = g[e.b] - g[lower[e.b]];
        double ka = h[e.a] - h[lower[e.a]], kb = h[e.b] - h[lower[e.b]];
        for (std::size_t i = 0; i < q.x.size(); ++i) {
            double t = q.x[i];
            double m = (1 - t) * mu[e.a] + t * mu[e.b];
            s += len * q.w[i] * m * ((1 - t) * ja + t * jb) * ((1 - t) * ka + t * kb);
        }
    }
    return s;
}

double form_rhs(const Mesh& hom, double mu, const std::vector<double>& g, const std::vector<double>& h) {
    return form_rhs(hom, std::vector<double>(hom.num_nodes(), mu), g, h);
}

std::vector<double> passage_capacities(const ValidatedSpec& spec, const CapacityOptions& opts) {
    const auto& ps = spec->passages;
    std::vector<int> source(ps.size(), -1);
    std::vector<std::size_t> distinct;
    for (std::size_t k = 0; k < ps.size(); ++k) {
        for (std::size_t j : distinct)
            if (same_cell(ps[j], ps[k])) {
                source[k] = static_cast<int>(j);
                break;
            }
        if (source[k] < 0) {
            source[k] = static_cast<int>(k);
            distinct.push_back(k);
        }
    }
    std::vector<double> value(ps.size(), 0.0);
    parallel_for(distinct.size(), [&](std::size_t i) {
        int k = static_cast<int>(distinct[i]);
        value[k] = cell_capacity(spec, k, opts).value;
    });
    std::vector<double> out(ps.size());
    for (std::size_t k = 0; k < ps.size(); ++k) out[k] = value[source[k]];
    return out;
}

FormComparison compare_forms(const ValidatedSpec& spec, double mu, const TestPair& pair,
                             const std::vector<double>& capacities) {
    DomainPolygons cells = build_cells(spec);
    FormComparison c;
    c.lhs = form_lhs(capacities, guard_means(cells, pair.g), guard_means(cells, pair.h));
    c.rhs = form_rhs([mu](double) { return mu; }, pair.g, pair.h, spec->W);
    c.defect = std::abs(c.lhs - c.rhs);
    c.normalizer = strip_norm(pair.g, spec->W, spec->L, 2) * strip_norm(pair.h, spec->W, spec->L, 1);
    c.kappa = c.normalizer > 0.0 ? c.defect / c.normalizer : 0.0;
    return c;
}

FormComparison compare_forms(const ValidatedSpec& spec, double mu, const TestPair& pair, const CapacityOptions& opts) {
    return compare_forms(spec, mu, pair, passage_capacities(spec, opts));
}

std::vector<KappaRow> kappa_sweep(const std::vector<ValidatedSpec>& family, double mu, const TestPair& pair,
                                  const CapacityOptions& opts) {
    std::vector<KappaRow> rows(family.size());
    parallel_for(family.size(), [&](std::size_t i) {
        const auto& s = family[i];
        KappaRow r;
        r.eps = s->eps;
        r.rho = s->period;
        if (!(r.rho > 0.0))
            for (const auto& p : s->passages) r.rho = std::max(r.rho, 2.0 * p.rho);
        r.form = compare_forms(s, mu, pair, opts);
        rows[i] = r;
    });
    return rows;
}

std::string kappa_csv_header() { return "eps,lhs,rhs,defect,kappa"; }

std::string kappa_csv_row(const KappaRow& row) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(10) << row.eps << ',' << row.form.lhs << ',' << row.form.rhs << ','
       << row.form.defect << ',' << row.form.kappa;
    return os.str();
}

}  // namespace sieve
