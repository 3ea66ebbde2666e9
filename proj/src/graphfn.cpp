#include "riesztool/graphfn.hpp"

#include "riesztool/bumps.hpp"

#include <fstream>

#include <json.hpp>

namespace riesz {

double GraphFunction::window(const Vec& x) const {
    if (margin_ <= 0.0) return 1.0;
    double w = 1.0;
    for (int a = 0; a < n_; ++a) {
        const double lo_ramp = (x[a] - lo_[a]) / margin_;
        const double hi_ramp = (hi_[a] - x[a]) / margin_;
        w *= smoothstep5(lo_ramp) * smoothstep5(hi_ramp);
    }
    return w;
}

Vec GraphFunction::eval(const Vec& x) const {
    const int codim = d_ - n_;
    Vec out = Vec::Zero(codim);
    for (int a = 0; a < n_; ++a)
        if (x[a] < lo_[a] || x[a] > hi_[a]) return out;

    if (analytic()) {
        for (const FourierMode& m : modes_) {
            const double arg = 2.0 * M_PI * m.freq.dot(x) + m.phase;
            out += std::sin(arg) * m.amp;
        }
        out *= window(x);
        return out;
    }

    // multilinear interpolation
    double frac[8];
    int base[8];
    for (int a = 0; a < n_; ++a) {
        double t = (x[a] - lo_[a]) / h_;
        int i = static_cast<int>(std::floor(t));
        i = std::max(0, std::min(dims_[a] - 2, i));
        base[a] = i;
        frac[a] = std::min(1.0, std::max(0.0, t - i));
    }
    const int corners = 1 << n_;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t flat = 0;
        for (int a = 0; a < n_; ++a) {
            const int bit = (c >> a) & 1;
            w *= bit ? frac[a] : (1.0 - frac[a]);
            flat = flat * dims_[a] + (base[a] + bit);
        }
        if (w == 0.0) continue;
        for (int k = 0; k < codim; ++k) out[k] += w * values_[flat * codim + k];
    }
    return out;
}

Vec GraphFunction::grid_point(std::size_t flat) const {
    Vec p(n_);
    for (int a = n_ - 1; a >= 0; --a) {
        p[a] = lo_[a] + h_ * static_cast<double>(flat % dims_[a]);
        flat /= dims_[a];
    }
    return p;
}

Vec GraphFunction::value_at_node(std::size_t flat) const {
    const int codim = d_ - n_;
    Vec v(codim);
    for (int k = 0; k < codim; ++k) v[k] = values_[flat * codim + k];
    return v;
}

void GraphFunction::set_value_at_node(std::size_t flat, const Vec& v) {
    const int codim = d_ - n_;
    for (int k = 0; k < codim; ++k) values_[flat * codim + k] = v[k];
}

Mat GraphFunction::gradient(const Vec& x) const {
    const int codim = d_ - n_;
    Mat jac(codim, n_);
    for (int a = 0; a < n_; ++a) {
        double step = h_ > 0.0 ? h_ : 1e-6;
        double fwd = std::min(step, hi_[a] - x[a]);
        double bwd = std::min(step, x[a] - lo_[a]);
        if (fwd <= 0.0 && bwd <= 0.0) { jac.col(a).setZero(); continue; }
        Vec xp = x, xm = x;
        xp[a] += fwd;
        xm[a] -= bwd;
        jac.col(a) = (eval(xp) - eval(xm)) / (fwd + bwd);
    }
    return jac;
}

void GraphFunction::refresh_norm_cache() {
    const int codim = d_ - n_;
    const std::size_t nodes = grid_size();
    double ginf = 0.0, gl2 = 0.0, vl2 = 0.0;
    const double cell = std::pow(h_, n_);
    for (std::size_t i = 0; i < nodes; ++i) {
        const Vec p = grid_point(i);
        Mat jac = gradient(p);
        double op = jac.jacobiSvd().singularValues()[0];
        ginf = std::max(ginf, op);
        gl2 += cell * jac.squaredNorm();
        double v2 = 0.0;
        for (int k = 0; k < codim; ++k) v2 += values_[i * codim + k] * values_[i * codim + k];
        vl2 += cell * v2;
    }
    grad_inf_ = ginf;
    grad_l2_ = std::sqrt(gl2);
    value_l2_sq_ = vl2;
}

GraphFunction GraphFunction::init_grid(int n, int d, const Vec& lo, const Vec& hi, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("make_graph_function: spacing must be > 0");
    if (lo.size() != n || hi.size() != n)
        throw std::invalid_argument("make_graph_function: box dimension mismatch");
    GraphFunction g;
    g.n_ = n;
    g.d_ = d;
    g.lo_ = lo;
    g.hi_ = hi;
    g.h_ = h;
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) {
        if (!(hi[a] > lo[a])) throw std::invalid_argument("make_graph_function: empty box");
        // half-open box [lo, hi): sum of cell volumes over the nodes equals
        // the box volume exactly
        int count = static_cast<int>(std::round((hi[a] - lo[a]) / h));
        if (count < 2) throw std::invalid_argument("make_graph_function: box under-resolved");
        g.dims_.push_back(count);
        total *= count;
    }
    g.values_.assign(total * (d - n), 0.0);
    return g;
}

GraphFunction make_graph_function(const std::vector<FourierMode>& modes, const Vec& box_lo,
                                  const Vec& box_hi, double h, double window_margin,
                                  double grad_inf_bound) {
    int n = static_cast<int>(box_lo.size());
    int codim = modes.empty() ? 1 : static_cast<int>(modes.front().amp.size());
    GraphFunction g = GraphFunction::init_grid(n, n + codim, box_lo, box_hi, h);
    g.margin_ = window_margin;
    g.modes_ = modes;
    for (const FourierMode& m : modes)
        if (m.freq.size() != n || m.amp.size() != codim)
            throw std::invalid_argument("make_graph_function: malformed mode");
    const std::size_t nodes = g.grid_size();
    for (std::size_t i = 0; i < nodes; ++i) g.set_value_at_node(i, g.eval(g.grid_point(i)));
    g.refresh_norm_cache();
    if (grad_inf_bound > 0.0 && g.grad_inf_norm() > grad_inf_bound)
        throw std::invalid_argument("make_graph_function: requested gradient bound violated");
    return g;
}

GraphFunction make_graph_function_grid(int n, int d, const Vec& box_lo, const Vec& box_hi,
                                       double h, const std::function<Vec(const Vec&)>& fn) {
    GraphFunction g = GraphFunction::init_grid(n, d, box_lo, box_hi, h);
    const std::size_t nodes = g.grid_size();
    for (std::size_t i = 0; i < nodes; ++i) g.set_value_at_node(i, fn(g.grid_point(i)));
    g.refresh_norm_cache();
    return g;
}

double jacobian(const GraphFunction& a, const Vec& p) {
    for (int i = 0; i < a.n(); ++i)
        if (p[i] < a.box_lo()[i] || p[i] > a.box_hi()[i])
            throw std::invalid_argument("jacobian: point outside grid domain");
    Mat jac = a.gradient(p);
    Mat gram = Mat::Identity(a.n(), a.n()) + jac.transpose() * jac;
    // det(I + J^T J) equals the sum of squared n x n minors of the
    // differential of x -> (x, A(x)) (Binet-Cauchy)
    return std::sqrt(gram.determinant());
}

DiscreteMeasure sample_graph_measure(const GraphFunction& a, const GraphMeasureSpec& spec) {
    const int n = a.n(), d = a.d();
    const std::size_t nodes = a.grid_size();
    const double cell = std::pow(a.spacing(), n);
    std::vector<double> coords;
    std::vector<double> weights;
    coords.reserve(nodes * d);
    weights.reserve(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const Vec p = a.grid_point(i);
        const Vec v = a.value_at_node(i);
        double g = spec.density ? spec.density(p) : 1.0;
        if (!(g > 0.0)) throw std::invalid_argument("sample_graph_measure: non-positive density");
        if (g < 1.0 / spec.c1 || g > spec.c1)
            throw std::invalid_argument("sample_graph_measure: density outside [1/C1, C1]");
        double w = spec.mu0_mode ? cell : g * jacobian(a, p) * cell;
        for (int k = 0; k < n; ++k) coords.push_back(p[k]);
        for (int k = 0; k < d - n; ++k) coords.push_back(v[k]);
        weights.push_back(w);
    }
    DiscreteMeasure mu = build_measure_flat(std::move(coords), std::move(weights), d, n);
    mu.set_truncation_floor(2.0 * a.spacing());
    return mu;
}

GraphFunction load_graph_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    std::vector<FourierMode> modes;
    for (const auto& jm : j.at("modes")) {
        FourierMode m;
        const auto& f = jm.at("freq");
        const auto& amp = jm.at("amp");
        m.freq = Vec(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) m.freq[i] = f[i].get<double>();
        m.amp = Vec(amp.size());
        for (std::size_t i = 0; i < amp.size(); ++i) m.amp[i] = amp[i].get<double>();
        m.phase = jm.value("phase", 0.0);
        modes.push_back(std::move(m));
    }
    const auto& box = j.at("box");
    const auto& lo = box.at("lo");
    const auto& hi = box.at("hi");
    Vec vlo(lo.size()), vhi(hi.size());
    for (std::size_t i = 0; i < lo.size(); ++i) vlo[i] = lo[i].get<double>();
    for (std::size_t i = 0; i < hi.size(); ++i) vhi[i] = hi[i].get<double>();
    return make_graph_function(modes, vlo, vhi, j.at("h").get<double>(), j.value("window", 0.0));
}

void save_graph_spec(const GraphFunction& a, const std::string& path) {
    if (!a.analytic()) throw std::invalid_argument("save_graph_spec: analytic spec required");
    nlohmann::json j;
    j["modes"] = nlohmann::json::array();
    for (const FourierMode& m : a.modes()) {
        nlohmann::json jm;
        jm["freq"] = std::vector<double>(m.freq.data(), m.freq.data() + m.freq.size());
        jm["amp"] = std::vector<double>(m.amp.data(), m.amp.data() + m.amp.size());
        jm["phase"] = m.phase;
        j["modes"].push_back(jm);
    }
    j["box"]["lo"] = std::vector<double>(a.box_lo().data(), a.box_lo().data() + a.n());
    j["box"]["hi"] = std::vector<double>(a.box_hi().data(), a.box_hi().data() + a.n());
    j["h"] = a.spacing();
    j["window"] = a.window_margin();
    j["d"] = a.d();
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

}  // namespace riesz
