#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dynam.hpp"

namespace opencospan {

// A fixed-step numeric solution; times are uniform and states all finite.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
};

struct GridSpec {
    double lo = -5.0;
    double hi = 5.0;
    int pointsPerDim = 3;
    int maxStarts = 729;
};

// One sampled point of the black-box relation: boundary values and flows
// together with the interior witness certifying them.
struct SteadySample {
    std::vector<double> inBoundary;
    std::vector<double> inflow;
    std::vector<double> outBoundary;
    std::vector<double> outflow;
    std::vector<double> witness;
    double residualNorm = 0.0;
};

namespace detail {

inline bool allFinite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double infNorm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline int workerThreads(int jobs) {
    int n = 0;
    if (const char* env = std::getenv("OPENCOSPAN_THREADS")) {
        char* end = nullptr;
        long parsed = std::strtol(env, &end, 10);
        if (end != env && parsed > 0) n = static_cast<int>(parsed);
    }
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return std::max(1, std::min(n, jobs));
}

} // namespace detail

// Classical fixed-step RK4 on the open-system right-hand side
// v(x) + i_*(I(t)) - o_*(O(t)); aborts with NonFiniteState on overflow.
inline Trajectory integrate(const OpenDynam& d, const std::vector<double>& x0,
                            const std::vector<Expr>& inflow, const std::vector<Expr>& outflow,
                            double t0, double t1, int steps) {
    if (steps < 1) throw TypeMismatch("integration needs at least one step");
    if (!(t1 > t0)) throw TypeMismatch("integration needs t1 > t0");
    if (static_cast<int>(x0.size()) != d.field.scope.size())
        throw ShapeMismatch("initial state length differs from scope size");
    auto rhs = [&](const std::vector<double>& x, double t) {
        return openResidual(d, x, inflow, outflow, t);
    };
    const double h = (t1 - t0) / steps;
    const int n = static_cast<int>(x0.size());
    Trajectory traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    std::vector<double> x = x0;
    traj.times.push_back(t0);
    traj.states.push_back(x);
    for (int s = 0; s < steps; ++s) {
        double t = t0 + s * h;
        std::vector<double> k1 = rhs(x, t);
        std::vector<double> tmp(n);
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        std::vector<double> k2 = rhs(tmp, t + 0.5 * h);
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        std::vector<double> k3 = rhs(tmp, t + 0.5 * h);
        for (int i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        std::vector<double> k4 = rhs(tmp, t + h);
        for (int i = 0; i < n; ++i)
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        double tNext = t0 + (s + 1) * h;
        if (!detail::allFinite(x))
            throw NonFiniteState("integration left the finite domain at t=" +
                                 std::to_string(tNext));
        traj.times.push_back(tNext);
        traj.states.push_back(x);
    }
    return traj;
}

namespace detail {

// Damped Newton with a central finite-difference Jacobian; rank-deficient
// Jacobians (steady-state manifolds) are handled by a complete orthogonal
// decomposition, giving a least-squares/minimum-norm step.
template <typename F>
std::optional<std::vector<double>> dampedNewton(const F& f, std::vector<double> x,
                                                double tol) {
    const int n = static_cast<int>(x.size());
    std::vector<double> fx = f(x);
    if (!allFinite(fx)) return std::nullopt;
    for (int iter = 0; iter < 100; ++iter) {
        double norm = infNorm(fx);
        if (norm <= tol) return x;
        Eigen::MatrixXd J(n, n);
        for (int j = 0; j < n; ++j) {
            double delta = 1e-6 * std::max(1.0, std::abs(x[j]));
            std::vector<double> xp = x, xm = x;
            xp[j] += delta;
            xm[j] -= delta;
            std::vector<double> fp = f(xp), fm = f(xm);
            if (!allFinite(fp) || !allFinite(fm)) return std::nullopt;
            for (int i = 0; i < n; ++i) J(i, j) = (fp[i] - fm[i]) / (2.0 * delta);
        }
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) r(i) = -fx[i];
        Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(r);
        if (!step.allFinite()) return std::nullopt;
        double lambda = 1.0;
        bool improved = false;
        for (int halving = 0; halving <= 40; ++halving) {
            std::vector<double> cand = x;
            for (int i = 0; i < n; ++i) cand[i] += lambda * step(i);
            std::vector<double> fc = f(cand);
            if (allFinite(fc) && (infNorm(fc) < norm || infNorm(fc) <= tol)) {
                x = std::move(cand);
                fx = std::move(fc);
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) return std::nullopt;
    }
    return infNorm(fx) <= tol ? std::optional<std::vector<double>>(std::move(x))
                              : std::nullopt;
}

} // namespace detail

// Multi-start damped-Newton sampling of steady states v(x)+i_*(I)-o_*(O)=0.
// Grid starts are solved in parallel (OPENCOSPAN_THREADS caps workers), then
// merged, canonically sorted, and deduplicated, so output is order-independent.
inline std::vector<SteadySample> steadyStates(const OpenDynam& d, const std::vector<double>& I,
                                              const std::vector<double>& O,
                                              const GridSpec& grid = {}) {
    if (static_cast<int>(I.size()) != d.cospan.left.size())
        throw ShapeMismatch("inflow length differs from the left foot");
    if (static_cast<int>(O.size()) != d.cospan.right.size())
        throw ShapeMismatch("outflow length differs from the right foot");
    const int n = d.field.scope.size();
    auto residual = [&](const std::vector<double>& x) { return openResidual(d, x, I, O, 0.0); };
    auto makeSample = [&](std::vector<double> x) {
        SteadySample s;
        s.residualNorm = detail::infNorm(residual(x));
        s.inflow = I;
        s.outflow = O;
        s.inBoundary.resize(d.cospan.left.size());
        for (int i = 0; i < d.cospan.left.size(); ++i)
            s.inBoundary[i] = x[d.cospan.inLeg.applyIndex(i)];
        s.outBoundary.resize(d.cospan.right.size());
        for (int j = 0; j < d.cospan.right.size(); ++j)
            s.outBoundary[j] = x[d.cospan.outLeg.applyIndex(j)];
        s.witness = std::move(x);
        return s;
    };
    if (n == 0) return {makeSample({})};

    const int ppd = std::max(1, grid.pointsPerDim);
    std::vector<double> values(ppd);
    if (ppd == 1) values[0] = 0.5 * (grid.lo + grid.hi);
    else
        for (int j = 0; j < ppd; ++j)
            values[j] = grid.lo + (grid.hi - grid.lo) * j / (ppd - 1);
    long long total = 1;
    for (int i = 0; i < n && total <= grid.maxStarts; ++i) total *= ppd;
    const int starts = static_cast<int>(std::min<long long>(total, grid.maxStarts));

    std::vector<std::vector<double>> startPoints;
    startPoints.reserve(starts);
    std::vector<int> digits(n, 0);
    for (int s = 0; s < starts; ++s) {
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = values[digits[i]];
        startPoints.push_back(std::move(x));
        for (int i = n - 1; i >= 0; --i) {
            if (++digits[i] < ppd) break;
            digits[i] = 0;
        }
    }

    const double tol = 1e-9;
    std::vector<std::vector<std::vector<double>>> perWorker;
    int workers = detail::workerThreads(starts);
    perWorker.resize(workers);
    auto runChunk = [&](int w) {
        for (int s = w; s < starts; s += workers)
            if (auto root = detail::dampedNewton(residual, startPoints[s], tol))
                perWorker[w].push_back(std::move(*root));
    };
    if (workers == 1) {
        runChunk(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(runChunk, w);
        for (auto& th : pool) th.join();
    }

    std::vector<std::vector<double>> roots;
    for (auto& chunk : perWorker)
        for (auto& r : chunk) roots.push_back(std::move(r));
    std::sort(roots.begin(), roots.end());

    std::vector<SteadySample> out;
    for (auto& r : roots) {
        bool dup = false;
        for (const SteadySample& kept : out) {
            double dist = 0.0;
            for (int i = 0; i < n; ++i)
                dist = std::max(dist, std::abs(kept.witness[i] - r[i]));
            if (dist < 1e-6) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(makeSample(std::move(r)));
    }
    return out;
}

// Glues steady samples along a shared foot: outflow of the first must equal the
// inflow of the second, and the witnesses must agree through the shared legs;
// the glued witness is assembled on the pushout apex and re-validated on the
// composite system.
inline SteadySample glueSteadyStates(const OpenDynam& p, const OpenDynam& q,
                                     const SteadySample& sp, const SteadySample& sq) {
    if (p.cospan.right != q.cospan.left)
        throw FootMismatch("gluing needs p.right = q.left");
    if (static_cast<int>(sp.witness.size()) != p.field.scope.size() ||
        static_cast<int>(sq.witness.size()) != q.field.scope.size())
        throw ShapeMismatch("sample witness length differs from its system's scope");
    if (static_cast<int>(sp.outflow.size()) != p.cospan.right.size() ||
        static_cast<int>(sq.inflow.size()) != q.cospan.left.size())
        throw ShapeMismatch("sample flow length differs from its foot");
    const double tol = 1e-9;
    for (int m = 0; m < p.cospan.right.size(); ++m) {
        if (std::abs(sp.outflow[m] - sq.inflow[m]) > tol)
            throw Mismatch("outflow of the first sample differs from inflow of the second at " +
                           p.cospan.right.label(m));
        double a = sp.witness[p.cospan.outLeg.applyIndex(m)];
        double b = sq.witness[q.cospan.inLeg.applyIndex(m)];
        if (std::abs(a - b) > tol)
            throw Mismatch("witnesses disagree on the shared boundary at " +
                           p.cospan.right.label(m));
    }
    PushoutResult po = pushout(p.cospan.outLeg, q.cospan.inLeg);
    std::vector<double> z(po.apex.size(), 0.0);
    std::vector<char> assigned(po.apex.size(), 0);
    for (int a = 0; a < p.field.scope.size(); ++a) {
        z[po.leftInj.applyIndex(a)] = sp.witness[a];
        assigned[po.leftInj.applyIndex(a)] = 1;
    }
    for (int b = 0; b < q.field.scope.size(); ++b) {
        int idx = po.rightInj.applyIndex(b);
        if (!assigned[idx]) {
            z[idx] = sq.witness[b];
            assigned[idx] = 1;
        }
    }
    OpenDynam composite = composeOpenDynam(p, q);
    std::vector<double> r = openResidual(composite, z, sp.inflow, sq.outflow, 0.0);
    double norm = detail::infNorm(r);
    if (norm > 1e-8)
        throw Mismatch("glued witness fails the composite steady equation (residual " +
                       std::to_string(norm) + ")");
    SteadySample out;
    out.inBoundary = sp.inBoundary;
    out.inflow = sp.inflow;
    out.outBoundary = sq.outBoundary;
    out.outflow = sq.outflow;
    out.witness = std::move(z);
    out.residualNorm = norm;
    return out;
}

} // namespace opencospan
