#include "kahler/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kahler/errors.hpp"

namespace kahler {

struct LambdaFamily::Impl {
    std::function<LambdaValue(double)> eval;
    std::function<double(double)> second;  // empty: difference lambda'
    std::string description;
};

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require_positive_A(double A) {
    if (!(A > 0.0) || !std::isfinite(A)) throw RejectedInput("A must be a finite positive number");
}

// t^e for t >= 0, with 0^0 = 1 and coefficient-zero terms kept at zero.
double scaled_pow(double coeff, double t, double e) {
    if (coeff == 0.0) return 0.0;
    return coeff * std::pow(t, e);
}

double fd_second(const std::function<LambdaValue(double)>& eval, double t) {
    const double h = 1e-4 * std::max(1.0, t);
    auto d1 = [&](double s) { return eval(s).first; };
    auto central = [&](double step) { return (d1(t + step) - d1(t - step)) / (2.0 * step); };
    auto forward = [&](double step) { return (-3.0 * d1(t) + 4.0 * d1(t + step) - d1(t + 2.0 * step)) / (2.0 * step); };
    if (t - h >= 0.0) return (4.0 * central(0.5 * h) - central(h)) / 3.0;
    return (4.0 * forward(0.5 * h) - forward(h)) / 3.0;
}

}  // namespace

LambdaFamily::LambdaFamily(Kind kind, double A, std::shared_ptr<const Impl> impl)
    : kind_(kind), A_(A), impl_(std::move(impl)) {}

LambdaFamily LambdaFamily::constant(double A, double B) {
    require_positive_A(A);
    auto impl = std::make_shared<Impl>();
    impl->eval = [B](double) { return LambdaValue{B, 0.0}; };
    impl->second = [](double) { return 0.0; };
    impl->description = "constant(B=" + fmt_double(B) + ")";
    return LambdaFamily(Kind::Constant, A, std::move(impl));
}

LambdaFamily LambdaFamily::power_plus_constant(double A, double m, double B) {
    require_positive_A(A);
    auto impl = std::make_shared<Impl>();
    impl->eval = [m, B](double t) { return LambdaValue{std::pow(t, m) + B, scaled_pow(m, t, m - 1.0)}; };
    impl->second = [m](double t) { return scaled_pow(m * (m - 1.0), t, m - 2.0); };
    impl->description = "power-plus-constant(m=" + fmt_double(m) + ", B=" + fmt_double(B) + ")";
    return LambdaFamily(Kind::PowerPlusConstant, A, std::move(impl));
}

LambdaFamily LambdaFamily::inverse_sqrt(double A, double c, double B) {
    require_positive_A(A);
    auto impl = std::make_shared<Impl>();
    impl->eval = [A, c, B](double t) {
        const double u = 2.0 * c * t + B;
        return LambdaValue{A / std::sqrt(u), -c * A / (u * std::sqrt(u))};
    };
    impl->second = [A, c, B](double t) {
        const double u = 2.0 * c * t + B;
        return 3.0 * c * c * A / (u * u * std::sqrt(u));
    };
    impl->description = "inverse-sqrt(c=" + fmt_double(c) + ", B=" + fmt_double(B) + ")";
    return LambdaFamily(Kind::InverseSqrt, A, std::move(impl));
}

LambdaFamily LambdaFamily::table(double A, std::vector<LambdaNode> nodes) {
    require_positive_A(A);
    if (nodes.size() < 2) throw RejectedInput("lambda table needs at least two nodes");
    if (nodes.front().t != 0.0) throw RejectedInput("lambda table must start at t = 0");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i].t > nodes[i - 1].t)) throw RejectedInput("lambda table abscissae must be strictly increasing");

    auto locate = [nodes](double t) {
        if (t < 0.0 || t > nodes.back().t) {
            throw RejectedInput("t = " + fmt_double(t) + " outside lambda table range [0, " +
                                fmt_double(nodes.back().t) + "]");
        }
        auto it = std::upper_bound(nodes.begin(), nodes.end(), t, [](double v, const LambdaNode& n) { return v < n.t; });
        std::size_t hi = std::min<std::size_t>(std::max<std::size_t>(1, it - nodes.begin()), nodes.size() - 1);
        return std::pair{nodes[hi - 1], nodes[hi]};
    };

    auto impl = std::make_shared<Impl>();
    impl->eval = [locate](double t) {
        const auto [lo, hi] = locate(t);
        const double dt = hi.t - lo.t;
        const double s = (t - lo.t) / dt;
        const double s2 = s * s, s3 = s2 * s;
        const double value = (2 * s3 - 3 * s2 + 1) * lo.value + (s3 - 2 * s2 + s) * dt * lo.first +
                             (-2 * s3 + 3 * s2) * hi.value + (s3 - s2) * dt * hi.first;
        const double first = ((6 * s2 - 6 * s) * lo.value + (3 * s2 - 4 * s + 1) * dt * lo.first +
                               (-6 * s2 + 6 * s) * hi.value + (3 * s2 - 2 * s) * dt * hi.first) /
                              dt;
        return LambdaValue{value, first};
    };
    impl->second = [locate](double t) {
        const auto [lo, hi] = locate(t);
        const double dt = hi.t - lo.t;
        const double s = (t - lo.t) / dt;
        return ((12 * s - 6) * lo.value + (6 * s - 4) * dt * lo.first + (-12 * s + 6) * hi.value +
                (6 * s - 2) * dt * hi.first) /
               (dt * dt);
    };
    impl->description = "table(" + std::to_string(nodes.size()) + " nodes)";
    return LambdaFamily(Kind::Table, A, std::move(impl));
}

LambdaFamily LambdaFamily::custom(double A, std::string name, std::function<LambdaValue(double)> eval) {
    require_positive_A(A);
    if (!eval) throw RejectedInput("custom lambda family needs an evaluator");
    auto impl = std::make_shared<Impl>();
    impl->eval = std::move(eval);
    impl->description = "custom(" + name + ")";
    return LambdaFamily(Kind::Custom, A, std::move(impl));
}

std::string LambdaFamily::describe() const { return impl_->description + ", A=" + fmt_double(A_); }

LambdaValue LambdaFamily::operator()(double t) const { return impl_->eval(t); }

double LambdaFamily::second_derivative(double t) const {
    if (impl_->second) return impl_->second(t);
    return fd_second(impl_->eval, t);
}

namespace {

bool vanishes(double value, double scale) { return !(std::abs(value) > 1e-14 * std::max(scale, 1e-300)); }

void singular(const char* expr, double t) {
    throw SingularParameterError(std::string(expr) + " vanishes at t = " + fmt_double(t));
}

}  // namespace

CoefficientSet coefficients(const LambdaFamily& family, double c, double t, const Perturbation& perturbation) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw RejectedInput("energy density must be finite and >= 0");
    const LambdaValue lv = family(t);
    const double A = family.A();
    const double lam = lv.value;
    const double dlam = lv.first;
    if (!std::isfinite(lam) || !std::isfinite(dlam))
        throw RejectedInput("lambda or lambda' is not finite at t = " + fmt_double(t));
    if (!(lam > 0.0)) throw RejectedInput("lambda must be positive, got " + fmt_double(lam) + " at t = " + fmt_double(t));

    const double growth = lam + 2.0 * t * dlam;  // lambda + 2t lambda'
    if (vanishes(growth, std::abs(lam) + std::abs(2.0 * t * dlam))) singular("lambda + 2t*lambda'", t);
    const double gap = A * A - 2.0 * c * t * lam * lam;  // A^2 - 2ct lambda^2
    if (vanishes(gap, A * A + std::abs(2.0 * c * t * lam * lam))) singular("A^2 - 2ct*lambda^2", t);

    const double k = c * lam * lam * lam + A * A * dlam;  // c lambda^3 + A^2 lambda'

    CoefficientSet cs;
    cs.t = t;
    cs.A = A;
    cs.c = c;
    cs.lambda = lam;
    cs.lambda_prime = dlam;
    cs.mu = dlam + perturbation.mu_shift;

    cs.b1 = -k / (A * lam * growth);
    if (perturbation.b1_override) cs.b1 = *perturbation.b1_override;
    cs.b1 += perturbation.b1_shift;

    cs.a1 = A / lam;
    cs.a2 = lam / A;
    const double horizontal = A + 2.0 * t * lam * cs.b1;
    if (vanishes(horizontal, A + std::abs(2.0 * t * lam * cs.b1))) singular("A + 2t*lambda*b1", t);
    cs.b2 = -lam * lam * cs.b1 / (A * horizontal);

    cs.c1 = A;
    cs.c2 = lam * lam / A;
    cs.d1 = (-k + cs.mu * gap) / (A * growth);
    cs.d2 = (lam * k + cs.mu * A * A * (lam + 2.0 * dlam * t)) / (A * gap) + perturbation.d2_shift;
    return cs;
}

CoefficientRates coefficient_rates(const LambdaFamily& family, double c, double t, const Perturbation& perturbation) {
    const CoefficientSet cs = coefficients(family, c, t, perturbation);
    const double A = cs.A;
    const double lam = cs.lambda;
    const double dlam = cs.lambda_prime;
    const double ddlam = family.second_derivative(t);
    const double mu = cs.mu;
    const double dmu = ddlam;  // the shift is constant in t

    const double k = c * lam * lam * lam + A * A * dlam;
    const double dk = 3.0 * c * lam * lam * dlam + A * A * ddlam;
    const double gap = A * A - 2.0 * c * t * lam * lam;
    const double dgap = -2.0 * c * lam * lam - 4.0 * c * t * lam * dlam;
    const double growth = lam + 2.0 * t * dlam;
    const double dgrowth = 3.0 * dlam + 2.0 * t * ddlam;

    CoefficientRates r;
    r.lambda_second = ddlam;
    r.c1 = 0.0;
    r.c2 = 2.0 * lam * dlam / A;

    const double n1 = -k + mu * gap;
    const double dn1 = -dk + dmu * gap + mu * dgap;
    r.d1 = (dn1 * growth - n1 * dgrowth) / (A * growth * growth);

    const double n2 = lam * k + mu * A * A * (lam + 2.0 * dlam * t);
    const double dn2 = dlam * k + lam * dk + dmu * A * A * (lam + 2.0 * dlam * t) + mu * A * A * (3.0 * dlam + 2.0 * ddlam * t);
    r.d2 = (dn2 * gap - n2 * dgap) / (A * gap * gap);
    return r;
}

CoefficientResiduals coefficient_residuals(const CoefficientSet& cs) {
    const double t = cs.t;
    const double lam = cs.lambda;
    const double dlam = cs.lambda_prime;
    const double A = cs.A;
    const double c = cs.c;

    CoefficientResiduals r;
    const double h1 = cs.a1 + 2.0 * t * cs.b1;
    const double h2 = cs.a2 + 2.0 * t * cs.b2;
    r.almost_complex = std::max(std::abs(cs.a1 * cs.a2 - 1.0), std::abs(h1 * h2 - 1.0));

    const double factor = lam + 2.0 * t * cs.mu;
    const double v1 = cs.c1 + 2.0 * t * cs.d1;
    const double v2 = cs.c2 + 2.0 * t * cs.d2;
    r.proportionality = std::max(std::abs(v1 - factor * h1) / std::max(1.0, std::abs(v1)),
                                 std::abs(v2 - factor * h2) / std::max(1.0, std::abs(v2)));

    if (cs.mu == cs.lambda_prime) {
        const double d1_closed = -c * lam * lam / A;
        const double d2_closed = (c * lam * lam * lam * lam + 2.0 * A * A * dlam * (lam + dlam * t)) /
                                 (A * (A * A - 2.0 * c * t * lam * lam));
        r.kahler_closed_form = std::max(std::abs(cs.d1 - d1_closed) / std::max(1.0, std::abs(d1_closed)),
                                        std::abs(cs.d2 - d2_closed) / std::max(1.0, std::abs(d2_closed)));
    }
    r.horizontal_positivity = A + 2.0 * t * lam * cs.b1;
    return r;
}

bool AdmissibilityReport::all_passed() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.passed; });
}

const AdmissibilityCondition* AdmissibilityReport::first_failure() const {
    const AdmissibilityCondition* first = nullptr;
    for (const auto& c : conditions) {
        if (c.passed) continue;
        if (!first || *c.first_failure_t < *first->first_failure_t) first = &c;
    }
    return first;
}

AdmissibilityReport check_admissibility(const LambdaFamily& family, double c, double t_max, int samples) {
    if (samples < 2) throw RejectedInput("admissibility grid needs at least 2 samples");
    if (!(t_max > 0.0)) throw RejectedInput("t_max must be positive");

    AdmissibilityReport rep;
    rep.t_max = t_max;
    rep.samples = samples;
    rep.conditions = {
        {"lambda > 0", true, std::nullopt, INFINITY},
        {"A^2 - 2ct*lambda^2 > 0", true, std::nullopt, INFINITY},
        {"lambda + 2t*lambda' > 0", true, std::nullopt, INFINITY},
        {"(A^2 - 2ct*lambda^2)/(lambda + 2t*lambda') > 0", true, std::nullopt, INFINITY},
        {"c1, c2, c1 + 2t*d1, c2 + 2t*d2 > 0", true, std::nullopt, INFINITY},
    };
    auto record = [&](std::size_t idx, double t, double value) {
        auto& cond = rep.conditions[idx];
        if (!(value >= cond.worst_value)) cond.worst_value = value;  // NaN sticks
        if (!(value > 0.0) && cond.passed) {
            cond.passed = false;
            cond.first_failure_t = t;
        }
    };

    const double A = family.A();
    for (int k = 0; k < samples; ++k) {
        const double t = t_max * static_cast<double>(k) / static_cast<double>(samples - 1);
        const LambdaValue lv = family(t);
        const double gap = A * A - 2.0 * c * t * lv.value * lv.value;
        const double growth = lv.value + 2.0 * t * lv.first;
        record(0, t, lv.value);
        record(1, t, gap);
        record(2, t, growth);
        record(3, t, gap / growth);

        double metric_min = NAN;
        try {
            const CoefficientSet cs = coefficients(family, c, t);
            metric_min = std::min({cs.c1, cs.c2, cs.c1 + 2.0 * t * cs.d1, cs.c2 + 2.0 * t * cs.d2});
        } catch (const std::exception&) {
        }
        record(4, t, metric_min);
    }
    return rep;
}

double fd_lambda_prime_check(const LambdaFamily& family, double t) {
    if (!(t >= 0.0)) throw RejectedInput("t must be >= 0");
    const double h = 1e-5 * std::max(1.0, t);
    auto f = [&](double s) { return family(s).value; };
    double estimate;
    if (t - h >= 0.0) {
        estimate = (f(t + h) - f(t - h)) / (2.0 * h);
    } else {
        estimate = (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h);
    }
    return std::abs(estimate - family(t).first);
}

}  // namespace kahler
