#include "newton.hpp"

#include <cmath>

#include "fracfold/linalg.hpp"

namespace fracfold::detail {

Field residual(const System& sys, const Field& u) {
    Field r = (*sys.a) * u + sys.shift * u;
    for (int i = 0; i < u.size(); ++i) {
        r[i] -= sys.weight[i] * std::pow(u[i] + sys.eps, -sys.delta);
        if (sys.f) r[i] -= sys.f_scale * sys.f->value(u[i]);
    }
    if (sys.rhs.size()) r -= sys.rhs;
    return r;
}

Matrix jacobian(const System& sys, const Field& u) {
    Matrix j = *sys.a;
    for (int i = 0; i < u.size(); ++i) {
        double d = sys.shift + sys.delta * sys.weight[i] * std::pow(u[i] + sys.eps, -sys.delta - 1.0);
        if (sys.f) d -= sys.f_scale * sys.f->derivative(u[i]);
        j(i, i) += d;
    }
    return j;
}

double roundoff_floor(const System& sys, const Field& u) {
    const double unit = std::numeric_limits<double>::epsilon();
    double terms = sys.a->cwiseAbs().rowwise().sum().maxCoeff() * sup_norm(u) + std::abs(sys.shift) * sup_norm(u);
    double singular = 0.0, nonlinear = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        singular = std::max(singular, sys.weight[i] * std::pow(u[i] + sys.eps, -sys.delta));
        if (sys.f) nonlinear = std::max(nonlinear, std::abs(sys.f_scale * sys.f->value(u[i])));
    }
    terms += singular + nonlinear + (sys.rhs.size() ? sup_norm(sys.rhs) : 0.0);
    return 64.0 * unit * terms;
}

namespace {

bool admissible(const Field& u, double eps) {
    for (int i = 0; i < u.size(); ++i) {
        if (!std::isfinite(u[i]) || !(u[i] + eps > 0.0)) return false;
    }
    return true;
}

}  // namespace

Outcome newton(const System& sys, Field u, double tol, int cap, Mode mode, double blowup) {
    Outcome out;
    Field r = residual(sys, u);
    out.residual = sup_norm(r);
    for (int it = 0; it < cap; ++it) {
        out.iterations = it;
        if (out.residual <= std::max(tol, roundoff_floor(sys, u))) {
            out.status = Status::Converged;
            out.u = std::move(u);
            return out;
        }
        Eigen::LLT<Matrix> llt(jacobian(sys, u));
        if (llt.info() != Eigen::Success) {
            out.status = Status::Indefinite;
            out.u = std::move(u);
            return out;
        }
        Field step = llt.solve(-r);
        if (mode == Mode::Monotone) {
            const double slack = 1e-8 * (sup_norm(u) + sup_norm(step));
            if (step.minCoeff() < -slack) {
                out.status = Status::Decrease;
                out.u = std::move(u);
                return out;
            }
            u += step.cwiseMax(0.0);
            if (!u.allFinite() || sup_norm(u) > blowup) {
                out.status = Status::Blowup;
                out.u = std::move(u);
                return out;
            }
            r = residual(sys, u);
            out.residual = sup_norm(r);
            continue;
        }
        // Damped: keep u + eps away from zero and ask for some decrease of |F|_2.
        const double norm0 = r.norm();
        double t = 1.0;
        Field trial;
        Field rt;
        bool accepted = false;
        for (int k = 0; k < 40; ++k, t *= 0.5) {
            trial = u + t * step;
            bool ok = admissible(trial, sys.eps);
            for (int i = 0; ok && i < u.size(); ++i) ok = trial[i] + sys.eps >= 0.1 * (u[i] + sys.eps);
            if (!ok) continue;
            rt = residual(sys, trial);
            if (rt.norm() <= (1.0 - 1e-4 * t) * norm0) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.status = Status::Stalled;
            out.u = std::move(u);
            return out;
        }
        u = std::move(trial);
        r = std::move(rt);
        out.residual = sup_norm(r);
        if (sup_norm(u) > blowup) {
            out.status = Status::Blowup;
            out.u = std::move(u);
            return out;
        }
    }
    out.iterations = cap;
    out.status = out.residual <= std::max(tol, roundoff_floor(sys, u)) ? Status::Converged : Status::Cap;
    out.u = std::move(u);
    return out;
}

const char* describe(Status s) {
    switch (s) {
        case Status::Converged: return "converged";
        case Status::Cap: return "iteration cap reached";
        case Status::Indefinite: return "linearization lost positive definiteness";
        case Status::Blowup: return "iterates blew up";
        case Status::Decrease: return "monotone Newton step decreased an iterate";
        case Status::Stalled: return "line search stalled";
    }
    return "unknown";
}

}  // namespace fracfold::detail
