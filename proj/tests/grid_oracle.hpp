#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "symgrid/engine.hpp"
#include "symgrid/matpower.hpp"

namespace symgrid::oracle {

// Gauss-Seidel power flow on the three-node feeder of the examples (node 1 slack at
// 1+0i, both lines 0.005+0.03i) with nodes 2 and 3 as PQ injections.
inline std::pair<Complex, Complex> gauss_seidel_pq(Complex s2, Complex s3) {
    const Complex y = 1.0 / Complex(0.005, 0.03);
    const Complex y22 = 2.0 * y, y33 = y;
    Complex v1 = 1, v2 = 1, v3 = 1;
    for (int it = 0; it < 20000; ++it) {
        Complex n2 = (std::conj(s2) / std::conj(v2) + y * v1 + y * v3) / y22;
        Complex n3 = (std::conj(s3) / std::conj(v3) + y * n2) / y33;
        double d = std::max(std::abs(n2 - v2), std::abs(n3 - v3));
        v2 = n2;
        v3 = n3;
        if (d < 1e-15) break;
    }
    return {v2, v3};
}

// Piecewise volt-VAr characteristic: plateau 0.66 below 0.94, slope down to 0 at 1.00,
// deadband to 1.04, slope down to -0.66 at 1.10.
inline double volt_var(double v) {
    const double q = 0.44 * 1.5, sp = 1.02;
    const double dead_lo = sp - 0.02, dead_hi = sp + 0.02, reg_lo = sp - 0.08, reg_hi = sp + 0.08;
    if (v < reg_lo) return q;
    if (v < dead_lo) return q - q / (dead_lo - reg_lo) * (v - reg_lo);
    if (v > reg_hi) return -q;
    if (v > dead_hi) return -q / (reg_hi - dead_hi) * (v - dead_hi);
    return 0.0;
}

// Brute-force admittance construction straight from the branch and bus tables.
inline Eigen::MatrixXcd ybus_oracle(const CaseData& c) {
    const int n = static_cast<int>(c.buses.size());
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& br : c.branches) {
        if (!br.in_service) continue;
        int f = -1, t = -1;
        for (int k = 0; k < n; ++k) {
            if (c.buses[k].id == br.from) f = k;
            if (c.buses[k].id == br.to) t = k;
        }
        Complex ys = 1.0 / Complex(br.r, br.x);
        Complex half_b(0, br.b / 2);
        double ratio = br.ratio == 0 ? 1.0 : br.ratio;
        Complex tap = std::polar(ratio, br.shift * std::numbers::pi / 180);
        y(f, f) += (ys + half_b) / (ratio * ratio);
        y(f, t) += -ys / std::conj(tap);
        y(t, f) += -ys / tap;
        y(t, t) += ys + half_b;
    }
    for (int k = 0; k < n; ++k) y(k, k) += Complex(c.buses[k].gs, c.buses[k].bs) / c.base_mva;
    return y;
}

enum class Kind { Slack, PV, PQ };

struct BusSpec {
    Kind kind = Kind::PQ;
    double pg = 0, qg = 0, vset = 1;  // MW, MVAr, p.u.
};

// Aggregated in-service generation per bus and the resulting bus kind.
inline std::vector<BusSpec> bus_specs(const CaseData& c) {
    std::vector<BusSpec> s(c.buses.size());
    std::vector<bool> has_gen(c.buses.size(), false);
    for (const auto& g : c.gens) {
        if (!g.in_service) continue;
        int k = c.bus_index(g.bus);
        s[k].pg += g.pg;
        s[k].qg += g.qg;
        if (!has_gen[k]) s[k].vset = g.vg;
        has_gen[k] = true;
    }
    for (std::size_t k = 0; k < c.buses.size(); ++k) {
        if (c.buses[k].type == 3)
            s[k].kind = Kind::Slack;
        else if (c.buses[k].type == 2 && has_gen[k])
            s[k].kind = Kind::PV;
    }
    return s;
}

// Reference power flow: polar Newton on the mismatch of the dense Ybus, with a
// finite-difference Jacobian. `force_pq` turns PV buses into PQ buses with the given Qg (MVAr).
inline std::vector<Complex> reference_power_flow(const CaseData& c, const std::map<int, double>& force_pq = {},
                                                 Zip zip = {}) {
    const int n = static_cast<int>(c.buses.size());
    const Eigen::MatrixXcd y = ybus_oracle(c);
    auto spec = bus_specs(c);
    for (auto [k, q] : force_pq) {
        spec[k].kind = Kind::PQ;
        spec[k].qg = q;
    }
    std::vector<int> ang, mag;
    for (int k = 0; k < n; ++k) {
        if (spec[k].kind != Kind::Slack) ang.push_back(k);
        if (spec[k].kind == Kind::PQ) mag.push_back(k);
    }
    Eigen::VectorXd va(n), vm(n);
    for (int k = 0; k < n; ++k) {
        va[k] = c.buses[k].va * std::numbers::pi / 180;
        vm[k] = spec[k].kind == Kind::PQ ? c.buses[k].vm : spec[k].vset;
    }
    const int m = static_cast<int>(ang.size() + mag.size());
    auto mismatch = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd a = va, v = vm;
        int i = 0;
        for (int k : ang) a[k] = x[i++];
        for (int k : mag) v[k] = x[i++];
        Eigen::VectorXcd volt(n);
        for (int k = 0; k < n; ++k) volt[k] = std::polar(v[k], a[k]);
        Eigen::VectorXcd cur = y * volt;
        auto load = [&](double p0, double vk) { return p0 * (zip.z * vk * vk + zip.i * vk + zip.p); };
        std::vector<Complex> s(n);
        for (int k = 0; k < n; ++k) {
            double p = (spec[k].pg - load(c.buses[k].pd, v[k])) / c.base_mva;
            double q = (spec[k].qg - load(c.buses[k].qd, v[k])) / c.base_mva;
            s[k] = volt[k] * std::conj(cur[k]) - Complex(p, q);
        }
        Eigen::VectorXd f(m);
        i = 0;
        for (int k : ang) f[i++] = s[k].real();
        for (int k : mag) f[i++] = s[k].imag();
        return f;
    };
    Eigen::VectorXd x(m);
    {
        int i = 0;
        for (int k : ang) x[i++] = va[k];
        for (int k : mag) x[i++] = vm[k];
    }
    for (int it = 0; it < 30; ++it) {
        Eigen::VectorXd f = mismatch(x);
        if (f.cwiseAbs().maxCoeff() < 1e-12) break;
        Eigen::MatrixXd jac(m, m);
        for (int j = 0; j < m; ++j) {
            const double h = 1e-7;
            Eigen::VectorXd xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            jac.col(j) = (mismatch(xp) - mismatch(xm)) / (2 * h);
        }
        x -= jac.partialPivLu().solve(f);
    }
    if (!(mismatch(x).cwiseAbs().maxCoeff() < 1e-11)) throw std::runtime_error("reference power flow did not converge");
    int i = 0;
    for (int k : ang) va[k] = x[i++];
    for (int k : mag) vm[k] = x[i++];
    std::vector<Complex> out(n);
    for (int k = 0; k < n; ++k) out[k] = std::polar(vm[k], va[k]);
    return out;
}

inline const OutputValue* find_output(const std::vector<OutputValue>& outs, const std::string& name) {
    for (const auto& o : outs)
        if (o.name == name) return &o;
    return nullptr;
}

// Bus voltage phasors from a run of an emitted model; the slack comes from the case.
inline std::vector<Complex> solved_voltages(const CaseData& c, const ConvertOptions& o, const RunReport& r) {
    std::vector<Complex> v(c.buses.size());
    auto spec = bus_specs(c);
    for (std::size_t k = 0; k < c.buses.size(); ++k) {
        auto [a, b] = voltage_names(c, static_cast<int>(k), o);
        const OutputValue* first = find_output(r.outputs, a);
        if (!first) {
            if (spec[k].kind != Kind::Slack) throw std::runtime_error("no solved value for " + a);
            v[k] = std::polar(spec[k].vset, c.buses[k].va * std::numbers::pi / 180);
            continue;
        }
        if (o.format == ModelFormat::Complex) {
            v[k] = first->value.z;
            continue;
        }
        const OutputValue* second = find_output(r.outputs, b);
        if (!second) throw std::runtime_error("no solved value for " + b);
        double x = first->value.z.real(), w = second->value.z.real();
        v[k] = o.format == ModelFormat::Polar ? std::polar(w, x) : Complex(x, w);
    }
    return v;
}

inline double max_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double d = 0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

}  // namespace symgrid::oracle
